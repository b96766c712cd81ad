// Compares the OpenMP kernels against their serial reference implementations:
// wall time for both paths plus the max elementwise difference (expected to be
// exactly zero; each output element is computed with an identical reduction
// order). Run with OMP_NUM_THREADS set to the worker count under test.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "nhqw/entropy.hpp"
#include "nhqw/pair.hpp"

using namespace nhqw;

namespace {

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial, double parallel, double maxdiff) {
    std::printf("%-34s serial %9.4f ms   omp %9.4f ms   speedup %5.2fx   maxdiff %g\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel, maxdiff);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    LatticeSpec spec;  // N = 9 defaults
    const auto basis = make_extended_basis(spec);
    const int d = basis.dim;

    // lifted-Hamiltonian sized sparse operands
    kernels::SparseCsr h = hamiltonian_pattern(spec);
    update_hamiltonian((spec.period_t / 3), spec, h);
    Matrix hl = lift_hamiltonian(h.to_dense(), basis);
    std::vector<kernels::SparseCsr::Triplet> t;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            if (hl(r, c) != Complex{0.0, 0.0}) t.push_back({r, c, hl(r, c)});
    const auto hs = kernels::SparseCsr::from_triplets(d, d, t);

    Matrix rho = Matrix::Random(d, d);
    rho = (rho + Matrix(rho.adjoint())).eval();

    Matrix out_a(d, d), out_b(d, d);
    report("spmm_left (lifted H * rho)",
           time_of([&] { kernels::spmm_left_serial(hs, rho, out_a); }, 20),
           time_of([&] { kernels::spmm_left(hs, rho, out_b); }, 20),
           (out_a - out_b).cwiseAbs().maxCoeff());
    report("spmm_right (rho * lifted H)",
           time_of([&] { kernels::spmm_right_serial(rho, hs, out_a); }, 20),
           time_of([&] { kernels::spmm_right(rho, hs, out_b); }, 20),
           (out_a - out_b).cwiseAbs().maxCoeff());

    Matrix k1 = Matrix::Random(d, d), k2 = Matrix::Random(d, d);
    Matrix k3 = Matrix::Random(d, d), k4 = Matrix::Random(d, d);
    report("rk4_combine",
           time_of([&] { kernels::rk4_combine_serial(rho, k1, k2, k3, k4, 0.01, out_a); }, 50),
           time_of([&] { kernels::rk4_combine(rho, k1, k2, k3, k4, 0.01, out_b); }, 50),
           (out_a - out_b).cwiseAbs().maxCoeff());

    // one full density-matrix period, direct-ODE phase at a modest step count
    PairEvolverOptions direct;
    direct.phase1 = Phase1Mode::direct_ode;
    direct.steps_per_period = 200;
    PairEvolver evolver_direct(spec, direct);
    PairEvolverOptions fact;
    fact.steps_per_period = 200;
    PairEvolver evolver_fact(spec, fact);
    const Matrix rho0 = evolver_fact.initial_pair(4, 5);
    const double t_direct = time_of([&] { out_a = evolver_direct.step(rho0); }, 1);
    const double t_fact = time_of([&] { out_b = evolver_fact.step(rho0); }, 1);
    std::printf("%-34s direct-ODE %9.2f ms   factorized %9.2f ms   maxdiff %g\n",
                "density period (200 steps)", t_direct * 1e3, t_fact * 1e3,
                (out_a - out_b).cwiseAbs().maxCoeff());

    // transmission matrix at production resolution
    const double t_u = time_of([&] { (void)transmission_matrix(spec, 2000); }, 1);
    std::printf("%-34s %9.2f ms\n", "transmission matrix (N=9, 2000)", t_u * 1e3);
    return 0;
}
