#pragma once

// Single-photon Floquet engine: coupled-mode propagation over one period,
// truncation of the auxiliary waveguides, the resulting transmission matrix
// on the straight-waveguide subspace, its effective Hamiltonian, and
// diagnostics built on top (intensity distributions, packet center,
// Lyapunov exponent).

#include <string>

#include "nhqw/lattice.hpp"
#include "nhqw/types.hpp"

namespace nhqw {

inline constexpr int kDefaultStepsPerPeriod = 2000;
inline constexpr double kNormTolerance = 1e-8;
inline constexpr double kRoundTripTolerance = 1e-8;

// Complex amplitudes on either the full interleaved lattice (M sites) or the
// straight subspace (N sites).
struct SinglePhotonState {
    Vector amplitudes;
    bool full_lattice = true;
};

// Single-period propagator restricted to the straight waveguides. Generally
// non-unitary: truncation only removes amplitude, so singular values stay
// at or below 1.
struct TransmissionMatrix {
    Matrix entries;  // N x N
    double period_t = 0.0;
    int steps_per_period = kDefaultStepsPerPeriod;
};

struct EffectiveHamiltonian {
    Matrix entries;  // N x N, U = exp(-i T H)
    std::string branch_note;
};

// Integrates i dpsi/dz = H(z) psi from z0 over one period with fixed-step
// RK4. Throws NumericalError if the closed-system norm drifts beyond
// kNormTolerance relative.
Vector propagate_period(const LatticeSpec& spec, const Vector& psi, double z0,
                        int steps = kDefaultStepsPerPeriod);

// Full-lattice propagator W over one period starting at z0 = 0 (M x M).
Matrix full_period_propagator(const LatticeSpec& spec, int steps = kDefaultStepsPerPeriod);

// Projects a full-lattice state onto the straight sites, discarding
// auxiliary amplitude.
Vector truncate_aux(const Vector& full, const LatticeSpec& spec);

// Embeds straight-site amplitudes into the full lattice (auxiliaries empty).
Vector embed_straight(const Vector& straight, const LatticeSpec& spec);

TransmissionMatrix transmission_matrix(const LatticeSpec& spec,
                                       int steps = kDefaultStepsPerPeriod);

// U^k applied to the given matrix, as a TransmissionMatrix for downstream use.
TransmissionMatrix power(const TransmissionMatrix& u, int k);

// H_eff = (i/T) log U via eigendecomposition, principal branch per
// eigenvalue. Round trip through an independent matrix exponential is
// verified to kRoundTripTolerance.
EffectiveHamiltonian effective_hamiltonian(const TransmissionMatrix& u);

Vector evolve_n_periods(const TransmissionMatrix& u, Vector psi0, int k);

struct IntensityDistribution {
    RealVector raw;         // p_n = |amplitude_n|^2
    RealVector normalized;  // raw / sum(raw)
};

// Distribution after one period for a photon injected at straight site n0
// (0-based): p_n = |U_{n,n0}|^2.
IntensityDistribution intensity_distribution(const TransmissionMatrix& u, int n0);
IntensityDistribution intensity_of(const Vector& straight_state);

// Mean site coordinate sum(n p_n)/sum(p_n). Throws DomainError on an
// all-zero distribution.
double packet_center(const RealVector& p);

struct LyapunovResult {
    double per_um = 0.0;
    double per_period = 0.0;
    int k1 = 0, k2 = 0;
    double boundary_ratio = 0.0;  // boundary amplitude / peak amplitude at k2
    bool boundary_contaminated = false;
};

inline constexpr double kBoundaryContactTolerance = 1e-6;

// Estimates the asymptotic growth rate of the amplitude at the excitation
// site m over the window [k1, k2] periods. By default throws NumericalError
// when the wavefront has reached the lattice boundary by k2 periods
// (boundary amplitude above kBoundaryContactTolerance of the peak); callers
// that have verified the estimate is insensitive to the boundary can opt in
// via allow_boundary_contact, and the achieved ratio is reported either way.
LyapunovResult lyapunov_exponent(const LatticeSpec& spec, int m, int k1, int k2,
                                 int steps = kDefaultStepsPerPeriod,
                                 bool allow_boundary_contact = false);

}  // namespace nhqw
