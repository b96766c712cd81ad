#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nhqw/floquet.hpp"
#include "nhqw/kernels.hpp"

using namespace nhqw;

namespace {

constexpr double kPi = std::numbers::pi;

LatticeSpec reference_spec(double phi = 0.0, int n = 9) {
    LatticeSpec s;
    s.n_straight = n;
    s.phase_phi = phi;
    return s;
}

}  // namespace

TEST_CASE("two-level beat oracle: constant coupler transfers sin^2(kappa l)") {
    // independent of the lattice machinery: integrate i dpsi/dz = H psi with
    // H = [[0, -k], [-k, 0]] and compare against the closed form
    const double kappa = 0.31;
    Matrix h(2, 2);
    h << 0.0, -kappa, -kappa, 0.0;
    for (double length : {0.7, 2.0, 5.5}) {
        Matrix psi(2, 1);
        psi << 1.0, 0.0;
        kernels::rk4_integrate(psi, 0.0, length, 2000, [&](double, const Matrix& x, Matrix& out) {
            out = -kImagUnit * (h * x);
        });
        CHECK(std::norm(psi(1, 0)) ==
              doctest::Approx(std::pow(std::sin(kappa * length), 2)).epsilon(1e-10));
        CHECK(std::norm(psi(0, 0)) + std::norm(psi(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("free evolution leaves the state unchanged") {
    auto spec = reference_spec();
    spec.coupling_a = 1e-30;  // effectively uncoupled, gauge 0 diagonal
    Vector psi = Vector::Zero(spec.total_sites());
    psi[4] = Complex{0.6, 0.8};
    const Vector out = propagate_period(spec, psi, 0.0, 500);
    CHECK((out - psi).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("closed-system propagation conserves the norm") {
    for (double phi : {0.0, kPi / 4, kPi / 2}) {
        const auto spec = reference_spec(phi);
        Vector psi = Vector::Zero(spec.total_sites());
        psi[6] = 1.0;
        const Vector out = propagate_period(spec, psi, 0.0);
        CHECK(std::abs(out.norm() - 1.0) < 1e-8);
    }
    // the full-lattice period propagator is unitary before truncation
    const auto spec = reference_spec(0.0);
    const Matrix w = full_period_propagator(spec, kDefaultStepsPerPeriod);
    const int m = spec.total_sites();
    CHECK((Matrix(w.adjoint() * w) - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("too few steps raises an integration error") {
    const auto spec = reference_spec();
    Vector psi = Vector::Zero(spec.total_sites());
    psi[0] = 1.0;
    CHECK_THROWS_AS((void)propagate_period(spec, psi, 0.0, 2), NumericalError);
}

TEST_CASE("truncation projects onto straight sites") {
    const auto spec = reference_spec();
    Vector full = Vector::Zero(spec.total_sites());
    SUBCASE("pure auxiliary occupation truncates to zero") {
        for (int j = 0; j < spec.n_aux(); ++j) full[aux_flat(j)] = 1.0;
        CHECK(truncate_aux(full, spec).norm() == 0.0);
    }
    SUBCASE("pure straight occupation is preserved") {
        for (int i = 0; i < spec.n_straight; ++i) full[straight_flat(i)] = Complex{0.1 * i, 0.2};
        const Vector s = truncate_aux(full, spec);
        CHECK(s.norm() == doctest::Approx(full.norm()));
        CHECK((embed_straight(s, spec) - full).norm() == 0.0);
    }
    SUBCASE("mixed state loses exactly the auxiliary weight") {
        full[straight_flat(2)] = 0.8;
        full[aux_flat(3)] = 0.6;
        const Vector s = truncate_aux(full, spec);
        CHECK(s.squaredNorm() == doctest::Approx(full.squaredNorm() - 0.36));
    }
}

TEST_CASE("transmission matrix of an uncoupled lattice is the identity") {
    auto spec = reference_spec();
    spec.coupling_a = 1e-30;
    const auto u = transmission_matrix(spec, 400);
    CHECK((u.entries - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transmission matrix is passive: singular values at most 1") {
    for (double phi : {0.0, kPi / 3, kPi / 2}) {
        const auto u = transmission_matrix(reference_spec(phi), 1000);
        Eigen::JacobiSVD<Matrix> svd(u.entries);
        CHECK(svd.singularValues()(0) <= 1.0 + 1e-6);
    }
}

TEST_CASE("transmission matrix converges in the step count") {
    const auto spec = reference_spec(0.3);
    const auto u1 = transmission_matrix(spec, kDefaultStepsPerPeriod);
    const auto u2 = transmission_matrix(spec, 2 * kDefaultStepsPerPeriod);
    CHECK((u1.entries - u2.entries).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("effective Hamiltonian trivial cases") {
    TransmissionMatrix u;
    u.period_t = 40.0;
    u.entries = Matrix::Identity(4, 4);
    SUBCASE("identity propagator has zero generator") {
        const auto h = effective_hamiltonian(u);
        CHECK(h.entries.cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("scalar phase maps to a uniform diagonal") {
        const double theta = 0.2;
        u.entries *= std::exp(-kImagUnit * theta);
        const auto h = effective_hamiltonian(u);
        CHECK((h.entries - (theta / 40.0) * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("eigenvalue at the branch cut is rejected") {
        u.entries(2, 2) = std::exp(kImagUnit * (0.95 * kPi));
        CHECK_THROWS_AS(effective_hamiltonian(u), NumericalError);
    }
    SUBCASE("numerically singular propagator is rejected") {
        u.entries(1, 1) = 1e-14;
        CHECK_THROWS_AS(effective_hamiltonian(u), NumericalError);
    }
}

TEST_CASE("effective Hamiltonian round trip and decay directions") {
    for (double phi : {0.0, kPi / 2}) {
        const auto u = transmission_matrix(reference_spec(phi), 1000);
        const auto h = effective_hamiltonian(u);
        // all eigenvalues decay (lossy system)
        for (const auto& e : Vector(Eigen::ComplexEigenSolver<Matrix>(h.entries).eigenvalues()))
            CHECK(e.imag() < 1e-10);
    }
}

TEST_CASE("evolve_n_periods composes the period map") {
    const auto u = transmission_matrix(reference_spec(0.5), 600);
    Vector psi = Vector::Zero(9);
    psi[4] = 1.0;
    CHECK((evolve_n_periods(u, psi, 0) - psi).norm() == 0.0);
    CHECK((evolve_n_periods(u, psi, 1) - Vector(u.entries * psi)).norm() == 0.0);
    // norm never grows with the period count
    double prev = 1.0;
    Vector cur = psi;
    for (int k = 1; k <= 8; ++k) {
        cur = u.entries * cur;
        CHECK(cur.norm() <= prev + 1e-9);
        prev = cur.norm();
    }
    // power() agrees with repeated application
    CHECK((power(u, 5).entries * psi - evolve_n_periods(u, psi, 5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("intensity distribution basics") {
    auto spec = reference_spec();
    spec.coupling_a = 1e-30;
    const auto u = transmission_matrix(spec, 300);
    const auto d = intensity_distribution(u, 3);
    for (int i = 0; i < 9; ++i) CHECK(d.normalized[i] == doctest::Approx(i == 3 ? 1.0 : 0.0));
}

TEST_CASE("packet center") {
    RealVector p = RealVector::Zero(9);
    p[3] = 1.0;
    CHECK(packet_center(p) == doctest::Approx(3.0));
    p.setConstant(1.0 / 9);
    CHECK(packet_center(p) == doctest::Approx(4.0));
    p.setZero();
    p[2] = p[8] = 0.5;  // symmetric about 5
    CHECK(packet_center(p) == doctest::Approx(5.0));
    p.setZero();
    CHECK_THROWS_AS(packet_center(p), DomainError);
}

TEST_CASE("symmetric lattice diffuses without drift; asymmetric drifts") {
    const auto u_sym = transmission_matrix(reference_spec(kPi / 2), kDefaultStepsPerPeriod);
    Vector psi = Vector::Zero(9);
    psi[5] = 1.0;
    const auto d_sym = intensity_of(evolve_n_periods(u_sym, psi, 6));
    CHECK(std::abs(packet_center(d_sym.normalized) - 5.0) < 0.05);

    const auto u_asym = transmission_matrix(reference_spec(0.0), kDefaultStepsPerPeriod);
    const auto d_asym = intensity_of(evolve_n_periods(u_asym, psi, 6));
    const double shift = 5.0 - packet_center(d_asym.normalized);
    // leftward drift, frozen against independent reference runs
    CHECK(shift == doctest::Approx(1.684).epsilon(0.01));
}

TEST_CASE("mirror lattice: exact propagator relation and mirrored intensities") {
    const double phi = 0.4;
    const int n = 7;
    const auto u = transmission_matrix(reference_spec(phi, n), 1500);
    const auto u_mirror = transmission_matrix(reference_spec(kPi - phi, n), 1500);
    // U_mirror = P U_half^T P with U_half the half-period-offset stroboscopic map
    LatticeSpec spec = reference_spec(phi, n);
    Matrix w_half = Matrix::Identity(spec.total_sites(), spec.total_sites());
    {
        auto h = hamiltonian_pattern(spec);
        Matrix hx;
        kernels::rk4_integrate(w_half, spec.period_t / 2, spec.period_t, 1500,
                               [&](double z, const Matrix& x, Matrix& out) {
                                   update_hamiltonian(z, spec, h);
                                   kernels::spmm_left(h, x, hx);
                                   out = -kImagUnit * hx;
                               });
    }
    Matrix u_half(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) u_half(r, c) = w_half(straight_flat(r), straight_flat(c));
    Matrix expected(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) expected(r, c) = u_half(n - 1 - c, n - 1 - r);
    CHECK((u_mirror.entries - expected).cwiseAbs().maxCoeff() < 1e-10);

    // mirrored injection gives the mirrored distribution
    Vector psi = Vector::Zero(n);
    psi[2] = 1.0;
    const auto d = intensity_of(evolve_n_periods(u, psi, 4));
    Vector psi_m = Vector::Zero(n);
    psi_m[n - 1 - 2] = 1.0;
    const auto d_m = intensity_of(evolve_n_periods(u_mirror, psi_m, 4));
    for (int i = 0; i < n; ++i)
        CHECK(d.normalized[i] == doctest::Approx(d_m.normalized[n - 1 - i]).epsilon(0.02));
}

TEST_CASE("lyapunov estimator") {
    SUBCASE("window boundary check raises by default on a small lattice") {
        CHECK_THROWS_AS((void)lyapunov_exponent(reference_spec(0.0, 12), 6, 4, 12, 400), NumericalError);
    }
    SUBCASE("symmetric uniform Hermitian lattice decays to zero rate as the window grows") {
        // reference: a plain tight-binding chain whose |psi_m| decays
        // algebraically, so the log-slope estimate shrinks with the window
        const int n = 121;
        const double kappa = 0.02, period = 40.0;
        Matrix h = Matrix::Zero(n, n);
        for (int i = 0; i + 1 < n; ++i) {
            h(i, i + 1) = -kappa;
            h(i + 1, i) = -kappa;
        }
        Matrix w = Matrix::Identity(n, n);
        kernels::rk4_integrate(w, 0.0, period, 400, [&](double, const Matrix& x, Matrix& out) {
            out = -kImagUnit * (h * x);
        });
        auto lam_for = [&](int k1, int k2) {
            Vector psi = Vector::Zero(n);
            psi[n / 2] = 1.0;
            double a1 = 0, a2 = 0;
            for (int k = 1; k <= k2; ++k) {
                psi = w * psi;
                if (k == k1) a1 = std::abs(psi[n / 2]);
                if (k == k2) a2 = std::abs(psi[n / 2]);
            }
            return (std::log(a2) - std::log(a1)) / ((k2 - k1) * period);
        };
        const double lam_short = std::abs(lam_for(4, 8));
        const double lam_long = std::abs(lam_for(16, 32));
        CHECK(lam_long < lam_short);
        CHECK(lam_long < 5e-4);
    }
    SUBCASE("asymmetric lattice decays faster at the injection site than symmetric") {
        const auto asym = lyapunov_exponent(reference_spec(0.0, 30), 15, 20, 40, 1000, true);
        const auto sym = lyapunov_exponent(reference_spec(kPi / 2, 30), 15, 20, 40, 1000, true);
        CHECK(asym.per_period < 0.0);
        CHECK(std::abs(sym.per_period) < 0.11 * std::abs(asym.per_period));
        CHECK(asym.per_um * 40.0 == doctest::Approx(asym.per_period));
    }
}
