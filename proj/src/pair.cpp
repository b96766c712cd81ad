#include "nhqw/pair.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>

namespace nhqw {

namespace {

std::vector<int> straight_flats(const ExtendedBasis& basis) {
    std::vector<int> s;
    for (int f = 0; f < basis.total_sites; ++f)
        if (!basis.is_aux_site[f]) s.push_back(f);
    return s;
}

ExtendedBasis build_basis(int total_sites, std::vector<uint8_t> is_aux) {
    ExtendedBasis b;
    b.total_sites = total_sites;
    b.dim = total_sites * total_sites + total_sites + 1;
    b.is_aux_site = std::move(is_aux);
    b.aux_photons.assign(static_cast<size_t>(b.dim), 0);
    for (int n = 0; n < total_sites; ++n)
        for (int m = 0; m < total_sites; ++m)
            b.aux_photons[static_cast<size_t>(b.idx_two(n, m))] =
                static_cast<uint8_t>(b.is_aux_site[n] + b.is_aux_site[m]);
    for (int l = 0; l < total_sites; ++l)
        b.aux_photons[static_cast<size_t>(b.idx_one(l))] = b.is_aux_site[l];
    return b;
}

// Fock-space index -> extended-space column, for symmetric physical states.
Matrix fock_embedding(const ExtendedBasis& basis, const fock::Basis& fb) {
    Matrix c = Matrix::Zero(basis.dim, fb.dim());
    c(basis.idx_vac(), fb.index_vac()) = 1.0;
    for (int l = 0; l < basis.total_sites; ++l) c(basis.idx_one(l), fb.index_one(l)) = 1.0;
    for (int i = 0; i < basis.total_sites; ++i) {
        for (int j = i; j < basis.total_sites; ++j) {
            const int col = fb.index_two(i, j);
            if (i == j) {
                c(basis.idx_two(i, i), col) = 1.0;
            } else {
                c(basis.idx_two(i, j), col) = 1.0 / std::numbers::sqrt2;
                c(basis.idx_two(j, i), col) = 1.0 / std::numbers::sqrt2;
            }
        }
    }
    return c;
}

}  // namespace

ExtendedBasis make_extended_basis(const LatticeSpec& spec) {
    spec.validate();
    const int m = spec.total_sites();
    std::vector<uint8_t> is_aux(static_cast<size_t>(m), 0);
    for (int f = 0; f < m; ++f) is_aux[static_cast<size_t>(f)] = (f % 2 == 1) ? 1 : 0;
    return build_basis(m, std::move(is_aux));
}

ExtendedBasis make_extended_basis(int total_sites, const std::vector<uint8_t>& is_aux_site) {
    if (total_sites < 1 || static_cast<int>(is_aux_site.size()) != total_sites)
        throw DomainError("site flag vector must have one entry per site");
    return build_basis(total_sites, is_aux_site);
}

Matrix lift_hamiltonian(const Matrix& h, const ExtendedBasis& basis) {
    const int m = basis.total_sites;
    if (h.rows() != m || h.cols() != m)
        throw DomainError("single-particle matrix size must match the basis site count");
    Matrix out = Matrix::Zero(basis.dim, basis.dim);
    for (int n = 0; n < m; ++n)
        for (int k = 0; k < m; ++k) {
            if (h(n, k) == Complex{0.0, 0.0}) continue;
            for (int other = 0; other < m; ++other) {
                out(basis.idx_two(n, other), basis.idx_two(k, other)) += h(n, k);
                out(basis.idx_two(other, n), basis.idx_two(other, k)) += h(n, k);
            }
            out(basis.idx_one(n), basis.idx_one(k)) += h(n, k);
        }
    return out;
}

OperatorLift lift_annihilation(int j, const ExtendedBasis& basis) {
    const int m = basis.total_sites;
    if (j < 0 || j >= m) throw DomainError("site out of range");
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    std::vector<kernels::SparseCsr::Triplet> t;
    t.reserve(static_cast<size_t>(2 * m + 1));
    for (int other = 0; other < m; ++other) {
        t.push_back({basis.idx_one(other), basis.idx_two(j, other), inv_sqrt2});
        t.push_back({basis.idx_one(other), basis.idx_two(other, j), inv_sqrt2});
    }
    t.push_back({basis.idx_vac(), basis.idx_one(j), 1.0});
    OperatorLift lift;
    lift.site = j;
    lift.matrix = kernels::SparseCsr::from_triplets(basis.dim, basis.dim, std::move(t));

    // construction-time guard: the lift must reproduce the brute-force Fock
    // operator on every physical (symmetric) state
    const fock::Basis fb = fock::make_basis(m);
    const Matrix c = fock_embedding(basis, fb);
    const Matrix lhs = lift.matrix.to_dense() * c;
    const Matrix rhs = c * fock::annihilation(fb, j);
    const double mismatch = (lhs - rhs).cwiseAbs().maxCoeff();
    if (mismatch > 1e-12) {
        std::ostringstream msg;
        msg << "annihilation lift for site " << j << " disagrees with the Fock oracle by "
            << mismatch;
        throw NumericalError(msg.str());
    }

    kernels::SparseCsr adj = lift.matrix;  // adjoint transpose = conjugate, same pattern
    for (auto& v : adj.val) v = std::conj(v);
    lift.adjoint_t = std::move(adj);
    return lift;
}

PairEvolver::PairEvolver(const LatticeSpec& spec, PairEvolverOptions options)
    : basis_(make_extended_basis(spec)), options_(options), spec_storage_(spec) {
    spec_ = &spec_storage_;
    w_ = full_period_propagator(spec, options_.steps_per_period);
    build(spec_);
}

PairEvolver::PairEvolver(Matrix full_propagator, ExtendedBasis basis, PairEvolverOptions options)
    : basis_(std::move(basis)), options_(options), w_(std::move(full_propagator)) {
    if (w_.rows() != basis_.total_sites || w_.cols() != basis_.total_sites)
        throw DomainError("propagator size must match the basis site count");
    if (options_.phase1 == Phase1Mode::direct_ode)
        throw DomainError("the direct-ODE phase needs a lattice; use the LatticeSpec constructor");
    build(nullptr);
}

void PairEvolver::build(const LatticeSpec*) {
    const int m = basis_.total_sites;
    // lifted one-period propagator V = blockdiag(W (x) W, W, 1)
    v_ = Matrix::Zero(basis_.dim, basis_.dim);
    for (int i1 = 0; i1 < m; ++i1)
        for (int i2 = 0; i2 < m; ++i2)
            for (int j1 = 0; j1 < m; ++j1)
                for (int j2 = 0; j2 < m; ++j2)
                    v_(basis_.idx_two(i1, i2), basis_.idx_two(j1, j2)) = w_(i1, j1) * w_(i2, j2);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) v_(basis_.idx_one(i), basis_.idx_one(j)) = w_(i, j);
    v_(basis_.idx_vac(), basis_.idx_vac()) = 1.0;

    aux_ops_.clear();
    for (int f = 0; f < m; ++f)
        if (basis_.is_aux_site[f]) aux_ops_.push_back(lift_annihilation(f, basis_));
}

Matrix PairEvolver::initial_pair(int n0, int m0) const {
    const auto flats = straight_flats(basis_);
    if (n0 < 0 || m0 < 0 || n0 >= static_cast<int>(flats.size()) ||
        m0 >= static_cast<int>(flats.size()))
        throw DomainError("injection sites out of range");
    Vector psi = Vector::Zero(basis_.dim);
    const int a = flats[static_cast<size_t>(n0)];
    const int b = flats[static_cast<size_t>(m0)];
    if (a == b) {
        psi[basis_.idx_two(a, a)] = 1.0;
    } else {
        psi[basis_.idx_two(a, b)] = 1.0 / std::numbers::sqrt2;
        psi[basis_.idx_two(b, a)] = 1.0 / std::numbers::sqrt2;
    }
    return psi * psi.adjoint();
}

Matrix PairEvolver::propagation_phase(const Matrix& rho) const {
    if (rho.rows() != basis_.dim || rho.cols() != basis_.dim)
        throw DomainError("density matrix size must match the extended basis");
    const Complex trace_in = rho.trace();
    Matrix out;
    if (options_.phase1 == Phase1Mode::factorized) {
        out = v_ * rho * v_.adjoint();
    } else {
        // integrate d rho / dz = -i (H_L(z) rho - rho H_L(z)) with the lifted
        // instantaneous Hamiltonian; H_L is symmetric, so it serves as its own
        // transpose for the right multiplication
        kernels::SparseCsr h = hamiltonian_pattern(*spec_);
        const int m = basis_.total_sites;
        kernels::SparseCsr hl;
        std::vector<std::pair<int, int>> gather;  // (lifted value index, lattice value index)
        {
            std::vector<kernels::SparseCsr::Triplet> tr;
            for (int r = 0; r < m; ++r)
                for (int i = h.row_ptr[r]; i < h.row_ptr[r + 1]; ++i) {
                    const int c = h.col_idx[i];
                    for (int other = 0; other < m; ++other) {
                        tr.push_back({basis_.idx_two(r, other), basis_.idx_two(c, other), 0.0});
                        tr.push_back({basis_.idx_two(other, r), basis_.idx_two(other, c), 0.0});
                    }
                    tr.push_back({basis_.idx_one(r), basis_.idx_one(c), 0.0});
                }
            hl = kernels::SparseCsr::from_triplets(basis_.dim, basis_.dim, tr);
            auto position = [&](int row, int col) {
                for (int i = hl.row_ptr[row]; i < hl.row_ptr[row + 1]; ++i)
                    if (hl.col_idx[i] == col) return i;
                throw NumericalError("lifted pattern assembly is inconsistent");
            };
            for (int r = 0; r < m; ++r)
                for (int i = h.row_ptr[r]; i < h.row_ptr[r + 1]; ++i) {
                    const int c = h.col_idx[i];
                    for (int other = 0; other < m; ++other) {
                        gather.emplace_back(position(basis_.idx_two(r, other), basis_.idx_two(c, other)), i);
                        gather.emplace_back(position(basis_.idx_two(other, r), basis_.idx_two(other, c)), i);
                    }
                    gather.emplace_back(position(basis_.idx_one(r), basis_.idx_one(c)), i);
                }
        }
        Matrix x = rho;
        Matrix left, right;
        kernels::rk4_integrate(x, 0.0, spec_->period_t, options_.steps_per_period,
                               [&](double z, const Matrix& v, Matrix& outm) {
                                   update_hamiltonian(z, *spec_, h);
                                   std::fill(hl.val.begin(), hl.val.end(), Complex{0.0, 0.0});
                                   for (const auto& [dst, srcv] : gather) hl.val[dst] += h.val[srcv];
                                   kernels::spmm_left(hl, v, left);
                                   kernels::spmm_right(v, hl, right);
                                   outm = -kImagUnit * (left - right);
                               });
        out = std::move(x);
    }
    const double drift = std::abs(out.trace() - trace_in);
    if (drift > kChannelAgreementTolerance * std::max(1.0, std::abs(trace_in))) {
        std::ostringstream msg;
        msg << "propagation phase failed to conserve the trace: drift " << drift;
        throw NumericalError(msg.str());
    }
    return out;
}

namespace {

// X restricted to rows with nu == k_row and columns with nu == k_col.
Matrix masked_block(const Matrix& x, const ExtendedBasis& basis, int k_row, int k_col) {
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (int c = 0; c < x.cols(); ++c) {
        if (basis.aux_photons[static_cast<size_t>(c)] != k_col) continue;
        for (int r = 0; r < x.rows(); ++r)
            if (basis.aux_photons[static_cast<size_t>(r)] == k_row) out(r, c) = x(r, c);
    }
    return out;
}

}  // namespace

Matrix PairEvolver::dissipation_phase(const Matrix& rho) const {
    auto jump = [&](const Matrix& x) {
        Matrix acc = Matrix::Zero(x.rows(), x.cols());
        Matrix tmp, tmp2;
        for (const auto& op : aux_ops_) {
            kernels::spmm_left(op.matrix, x, tmp);
            kernels::spmm_right(tmp, op.adjoint_t, tmp2);
            acc += tmp2;
        }
        return acc;
    };
    if (options_.dissipation == DissipationMode::closed_form) {
        // infinite-strength limit: every auxiliary photon is lost with
        // certainty; coherences between different auxiliary contents vanish
        Matrix out = masked_block(rho, basis_, 0, 0);
        out += jump(masked_block(rho, basis_, 1, 1));
        out += 0.5 * jump(jump(masked_block(rho, basis_, 2, 2)));
        return out;
    }
    // finite-strength jump ODE in s = gamma*t:
    // d rho/ds = -(N rho + rho N) + 2 sum_j A_j rho A_j^dag, N = diag(aux count)
    RealVector nu(basis_.dim);
    for (int i = 0; i < basis_.dim; ++i) nu[i] = basis_.aux_photons[static_cast<size_t>(i)];
    Matrix x = rho;
    kernels::rk4_integrate(x, 0.0, options_.gamma_tau, options_.dissipation_steps,
                           [&](double, const Matrix& v, Matrix& outm) {
                               outm = 2.0 * jump(v);
                               outm.noalias() -= nu.asDiagonal() * v;
                               outm.noalias() -= v * nu.asDiagonal();
                           });
    return x;
}

Matrix PairEvolver::step(const Matrix& rho) const { return dissipation_phase(propagation_phase(rho)); }

Matrix propagate_density_period(const LatticeSpec& spec, const Matrix& rho,
                                PairEvolverOptions options) {
    PairEvolver evolver(spec, options);
    const auto before = check_density_invariants(rho, evolver.basis());
    if (!before.passes())
        throw DomainError("input density matrix violates its invariants");
    Matrix out = evolver.step(rho);
    const auto after = check_density_invariants(out, evolver.basis());
    if (!after.passes()) {
        std::ostringstream msg;
        msg << "density-matrix invariants violated after one period: hermiticity "
            << after.hermiticity_residual << ", min eigenvalue " << after.min_eigenvalue
            << ", trace " << after.trace;
        throw NumericalError(msg.str());
    }
    if (after.trace > before.trace + 1e-10)
        throw NumericalError("trace increased across a period");
    return out;
}

Matrix evolve_pair(const LatticeSpec& spec, int n0, int m0, int k, PairEvolverOptions options) {
    if (k < 0) throw DomainError("period count must be non-negative");
    PairEvolver evolver(spec, options);
    Matrix rho = evolver.initial_pair(n0, m0);
    double prev_trace = 1.0;
    for (int i = 0; i < k; ++i) {
        rho = evolver.step(rho);
        const auto rep = check_density_invariants(rho, evolver.basis());
        if (!rep.passes() || rep.trace > prev_trace + 1e-10) {
            std::ostringstream msg;
            msg << "density-matrix invariants violated at period " << (i + 1) << ": hermiticity "
                << rep.hermiticity_residual << ", min eigenvalue " << rep.min_eigenvalue
                << ", trace " << rep.trace << " (previous " << prev_trace << ")";
            throw NumericalError(msg.str());
        }
        prev_trace = rep.trace;
    }
    return rho;
}

CorrelationMatrix correlation_matrix(const Matrix& rho, const ExtendedBasis& basis,
                                     const LatticeSpec& spec) {
    const auto flats = straight_flats(basis);
    if (static_cast<int>(flats.size()) != spec.n_straight)
        throw DomainError("basis does not match the lattice");
    const int n = spec.n_straight;
    CorrelationMatrix cm;
    cm.gamma_raw.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int d = basis.idx_two(flats[static_cast<size_t>(i)], flats[static_cast<size_t>(j)]);
            const double v = rho(d, d).real();
            if (v < -1e-12) {
                std::ostringstream msg;
                msg << "negative coincidence weight " << v << " at (" << i << ", " << j << ")";
                throw NumericalError(msg.str());
            }
            cm.gamma_raw(i, j) = std::max(v, 0.0);
        }
    cm.survival_p2 = cm.gamma_raw.sum();
    cm.gamma_normalized =
        cm.survival_p2 > 0 ? RealMatrix(cm.gamma_raw / cm.survival_p2) : cm.gamma_raw;
    return cm;
}

CorrelationMatrix pair_correlation_via_u(const TransmissionMatrix& u, int n0, int m0) {
    const int n = static_cast<int>(u.entries.rows());
    if (n0 < 0 || m0 < 0 || n0 >= n || m0 >= n) throw DomainError("injection sites out of range");
    Matrix phi = Matrix::Zero(n, n);
    if (n0 == m0) {
        phi(n0, n0) = 1.0;
    } else {
        phi(n0, m0) = 1.0 / std::numbers::sqrt2;
        phi(m0, n0) = 1.0 / std::numbers::sqrt2;
    }
    const Matrix out = u.entries * phi * u.entries.transpose();
    CorrelationMatrix cm;
    cm.gamma_raw = out.cwiseAbs2();
    cm.survival_p2 = cm.gamma_raw.sum();
    cm.gamma_normalized =
        cm.survival_p2 > 0 ? RealMatrix(cm.gamma_raw / cm.survival_p2) : cm.gamma_raw;
    return cm;
}

bool DensityInvariantReport::passes(double trace_cap) const {
    return hermiticity_residual <= kHermTolerance && min_eigenvalue >= -kPsdTolerance &&
           trace >= -1e-12 && trace <= trace_cap;
}

DensityInvariantReport check_density_invariants(const Matrix& rho, const ExtendedBasis& basis) {
    DensityInvariantReport rep;
    rep.trace = rho.trace().real();
    const double denom = std::max(rho.norm(), 1e-300);
    rep.hermiticity_residual = (rho - Matrix(rho.adjoint())).norm() / denom;
    const Matrix herm = 0.5 * (rho + Matrix(rho.adjoint()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    const int m2 = basis.total_sites * basis.total_sites;
    for (int i = 0; i < m2; ++i) rep.two_photon_trace += rho(i, i).real();
    for (int i = m2; i < m2 + basis.total_sites; ++i) rep.one_photon_trace += rho(i, i).real();
    rep.vacuum_weight = rho(basis.idx_vac(), basis.idx_vac()).real();
    return rep;
}

}  // namespace nhqw
