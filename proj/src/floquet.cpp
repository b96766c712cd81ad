#include "nhqw/floquet.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace nhqw {

namespace {

// RHS of i dX/dz = H(z) X for a reusable sparse H pattern.
struct CoupledModeRhs {
    const LatticeSpec& spec;
    kernels::SparseCsr h;
    Matrix hx;

    explicit CoupledModeRhs(const LatticeSpec& s) : spec(s), h(hamiltonian_pattern(s)) {}

    void operator()(double z, const Matrix& x, Matrix& out) {
        update_hamiltonian(z, spec, h);
        kernels::spmm_left(h, x, hx);
        out = -kImagUnit * hx;
    }
};

}  // namespace

Vector propagate_period(const LatticeSpec& spec, const Vector& psi, double z0, int steps) {
    if (psi.size() != spec.total_sites())
        throw DomainError("state length must equal the total site count M");
    if (steps < 1) throw DomainError("steps must be positive");
    const double norm_in = psi.norm();
    Matrix x = psi;
    CoupledModeRhs rhs(spec);
    kernels::rk4_integrate(x, z0, spec.period_t, steps, rhs);
    Vector out = x.col(0);
    if (norm_in > 0) {
        const double drift = std::abs(out.norm() / norm_in - 1.0);
        if (drift > kNormTolerance) {
            std::ostringstream msg;
            msg << "propagation norm drift " << drift << " exceeds " << kNormTolerance
                << " at " << steps << " steps/period; increase the step count";
            throw NumericalError(msg.str());
        }
    }
    return out;
}

Matrix full_period_propagator(const LatticeSpec& spec, int steps) {
    spec.validate();
    if (steps < 1) throw DomainError("steps must be positive");
    const int m = spec.total_sites();
    Matrix w = Matrix::Identity(m, m);
    CoupledModeRhs rhs(spec);
    kernels::rk4_integrate(w, 0.0, spec.period_t, steps, rhs);
    // closed-system unitarity check, columnwise
    double drift = 0.0;
    for (int j = 0; j < m; ++j) drift = std::max(drift, std::abs(w.col(j).norm() - 1.0));
    if (drift > kNormTolerance) {
        std::ostringstream msg;
        msg << "propagator unitarity drift " << drift << " exceeds " << kNormTolerance
            << " at " << steps << " steps/period; increase the step count";
        throw NumericalError(msg.str());
    }
    return w;
}

Vector truncate_aux(const Vector& full, const LatticeSpec& spec) {
    if (full.size() != spec.total_sites())
        throw DomainError("state length must equal the total site count M");
    Vector out(spec.n_straight);
    for (int i = 0; i < spec.n_straight; ++i) out[i] = full[straight_flat(i)];
    return out;
}

Vector embed_straight(const Vector& straight, const LatticeSpec& spec) {
    if (straight.size() != spec.n_straight)
        throw DomainError("state length must equal the straight site count N");
    Vector out = Vector::Zero(spec.total_sites());
    for (int i = 0; i < spec.n_straight; ++i) out[straight_flat(i)] = straight[i];
    return out;
}

TransmissionMatrix transmission_matrix(const LatticeSpec& spec, int steps) {
    const Matrix w = full_period_propagator(spec, steps);
    const int n = spec.n_straight;
    TransmissionMatrix u;
    u.entries.resize(n, n);
    u.period_t = spec.period_t;
    u.steps_per_period = steps;
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) u.entries(r, c) = w(straight_flat(r), straight_flat(c));
    return u;
}

TransmissionMatrix power(const TransmissionMatrix& u, int k) {
    if (k < 0) throw DomainError("period count must be non-negative");
    TransmissionMatrix out = u;
    out.entries = Matrix::Identity(u.entries.rows(), u.entries.cols());
    Matrix base = u.entries;
    int e = k;
    while (e > 0) {
        if (e & 1) out.entries = out.entries * base;
        base = base * base;
        e >>= 1;
    }
    out.period_t = u.period_t * k;
    return out;
}

EffectiveHamiltonian effective_hamiltonian(const TransmissionMatrix& u) {
    const auto& m = u.entries;
    if (m.rows() != m.cols() || m.rows() < 1) throw DomainError("transmission matrix must be square");
    if (u.period_t <= 0) throw DomainError("transmission matrix carries no period length");
    // Branch guard on the eigenvalues: the principal matrix logarithm equals
    // the principal branch per eigenvalue, and refuses to get near the cut.
    Eigen::ComplexEigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of U failed");
    double max_phase = 0.0;
    for (const Complex& lambda : Vector(es.eigenvalues())) {
        if (std::abs(lambda) < 1e-12)
            throw NumericalError("transmission matrix is numerically singular (total absorption); "
                                 "cannot take the logarithm");
        const double phase = std::arg(lambda);
        max_phase = std::max(max_phase, std::abs(phase));
        if (std::abs(phase) > 0.9 * std::numbers::pi) {
            std::ostringstream msg;
            msg << "eigenvalue phase " << phase << " too close to the branch cut (|phase| > 0.9*pi); "
                   "refusing to unwrap silently";
            throw NumericalError(msg.str());
        }
    }
    // Schur-based principal logarithm; skin-effect propagators have
    // exponentially ill-conditioned eigenvectors, so a raw eigendecomposition
    // route would lose all accuracy here.
    EffectiveHamiltonian h;
    h.entries = (kImagUnit / u.period_t) * Matrix(m.log());
    {
        std::ostringstream note;
        note << "principal branch per eigenvalue; max |phase| = " << max_phase;
        h.branch_note = note.str();
    }
    // round trip through an independent matrix exponential
    const Matrix back = (-kImagUnit * u.period_t * h.entries).exp();
    const double resid = (back - m).norm() / m.norm();
    if (resid > kRoundTripTolerance) {
        std::ostringstream msg;
        msg << "exp(-iT H_eff) fails to reconstruct U: relative residual " << resid;
        throw NumericalError(msg.str());
    }
    return h;
}

Vector evolve_n_periods(const TransmissionMatrix& u, Vector psi0, int k) {
    if (k < 0) throw DomainError("period count must be non-negative");
    for (int i = 0; i < k; ++i) psi0 = u.entries * psi0;
    return psi0;
}

IntensityDistribution intensity_distribution(const TransmissionMatrix& u, int n0) {
    if (n0 < 0 || n0 >= u.entries.cols()) throw DomainError("injection site out of range");
    Vector col = u.entries.col(n0);
    return intensity_of(col);
}

IntensityDistribution intensity_of(const Vector& straight_state) {
    IntensityDistribution d;
    d.raw = straight_state.cwiseAbs2();
    const double total = d.raw.sum();
    d.normalized = total > 0 ? RealVector(d.raw / total) : d.raw;
    return d;
}

double packet_center(const RealVector& p) {
    double total = 0.0, weighted = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        total += p[i];
        weighted += i * p[i];
    }
    if (total <= 0.0) throw DomainError("packet_center of an all-zero distribution");
    return weighted / total;
}

LyapunovResult lyapunov_exponent(const LatticeSpec& spec, int m, int k1, int k2, int steps,
                                 bool allow_boundary_contact) {
    if (m < 0 || m >= spec.n_straight) throw DomainError("excitation site out of range");
    if (!(0 <= k1 && k1 < k2)) throw DomainError("window must satisfy 0 <= k1 < k2");
    const TransmissionMatrix u = transmission_matrix(spec, steps);
    Vector psi = Vector::Zero(spec.n_straight);
    psi[m] = 1.0;
    double amp1 = 0.0, amp2 = 0.0;
    for (int k = 1; k <= k2; ++k) {
        psi = u.entries * psi;
        if (k == k1) amp1 = std::abs(psi[m]);
        if (k == k2) amp2 = std::abs(psi[m]);
    }
    if (k1 == 0) amp1 = 1.0;
    const double peak = psi.cwiseAbs().maxCoeff();
    const double boundary = std::max(std::abs(psi[0]), std::abs(psi[spec.n_straight - 1]));

    LyapunovResult r;
    r.k1 = k1;
    r.k2 = k2;
    r.boundary_ratio = peak > 0 ? boundary / peak : 0.0;
    r.boundary_contaminated = r.boundary_ratio >= kBoundaryContactTolerance;
    if (r.boundary_contaminated && !allow_boundary_contact) {
        std::ostringstream msg;
        msg << "wavefront reached the lattice boundary by k2=" << k2 << " periods "
            << "(boundary/peak = " << r.boundary_ratio << "); enlarge N or shorten the window";
        throw NumericalError(msg.str());
    }
    if (amp1 <= 0 || amp2 <= 0)
        throw NumericalError("amplitude at the excitation site vanished inside the window");
    r.per_um = (std::log(amp2) - std::log(amp1)) / ((k2 - k1) * spec.period_t);
    r.per_period = r.per_um * spec.period_t;
    return r;
}

}  // namespace nhqw
