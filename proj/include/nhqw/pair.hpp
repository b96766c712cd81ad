#pragma once

// Two-photon dynamics in the explicit extended linear space of the <= 2
// photon sector. Basis layout: the first M^2 indices are ordered pairs
// (n, m) of two-photon kets, the next M are one-photon kets, the last is the
// vacuum. Components follow the first-quantized symmetric-tensor convention:
// a normalized pure two-photon state has phi_{nm} = phi_{mn} with
// sum |phi_{nm}|^2 = 1; the separate-site Fock ket |1_n 1_m> corresponds to
// phi_{nm} = phi_{mn} = 1/sqrt(2) and |2_n> to phi_{nn} = 1. Under this
// convention the lifted Hamiltonian of the two-photon block is exactly
// H (x) I + I (x) H and its one-period propagator factorizes as W (x) W.
//
// One Floquet period = unitary propagation of the full lattice followed by
// loss of every photon left in an auxiliary waveguide. The loss channel is
// implemented in closed form (the infinite-strength limit, photon-number
// block lowering with certainty) and, for validation, as the finite-strength
// jump ODE; the two must agree to kChannelAgreementTolerance.

#include <cstdint>
#include <vector>

#include "nhqw/floquet.hpp"
#include "nhqw/fock.hpp"
#include "nhqw/kernels.hpp"
#include "nhqw/lattice.hpp"
#include "nhqw/types.hpp"

namespace nhqw {

inline constexpr double kHermTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kChannelAgreementTolerance = 1e-8;
// Slowest dissipation component (one-auxiliary-photon coherence) decays as
// e^{-gamma tau}; 30 leaves a ~1e-13 residual.
inline constexpr double kDefaultGammaTau = 30.0;

struct ExtendedBasis {
    int total_sites = 0;  // M
    int dim = 0;          // M^2 + M + 1
    std::vector<uint8_t> aux_photons;  // auxiliary-photon count per basis ket
    std::vector<uint8_t> is_aux_site;  // per flat site

    int idx_two(int n, int m) const { return n * total_sites + m; }
    int idx_one(int l) const { return total_sites * total_sites + l; }
    int idx_vac() const { return total_sites * total_sites + total_sites; }
};

ExtendedBasis make_extended_basis(const LatticeSpec& spec);
// Basis over explicit site flags (for oracle-driven tests on custom systems).
ExtendedBasis make_extended_basis(int total_sites, const std::vector<uint8_t>& is_aux_site);

// Block-diagonal lift of an M x M single-particle matrix: two-photon block
// H (x) I + I (x) H, one-photon block H, vacuum 0.
Matrix lift_hamiltonian(const Matrix& h, const ExtendedBasis& basis);

struct OperatorLift {
    int site = 0;
    kernels::SparseCsr matrix;     // D x D annihilation lift
    kernels::SparseCsr adjoint_t;  // transpose of the adjoint, for right-multiplication
};

// Lift of the annihilation operator a_j onto the extended space. Validated
// entry-by-entry against the brute-force Fock oracle at construction; a
// mismatch throws NumericalError.
OperatorLift lift_annihilation(int j, const ExtendedBasis& basis);

enum class Phase1Mode {
    factorized,  // rho -> V rho V^dag with V = blockdiag(W (x) W, W, 1)
    direct_ode,  // RK4 on the lifted commutator equation
};
enum class DissipationMode {
    closed_form,   // infinite-strength limit of the loss channel
    finite_gamma,  // jump ODE integrated to gamma*tau
};

struct PairEvolverOptions {
    int steps_per_period = kDefaultStepsPerPeriod;
    Phase1Mode phase1 = Phase1Mode::factorized;
    DissipationMode dissipation = DissipationMode::closed_form;
    double gamma_tau = kDefaultGammaTau;
    int dissipation_steps = 12000;
};

// Precomputed one-period evolution of the extended density matrix for a
// fixed lattice. Step order per period: propagation, then dissipation.
class PairEvolver {
  public:
    PairEvolver(const LatticeSpec& spec, PairEvolverOptions options = {});
    // Oracle/test entry: custom single-period propagator and basis.
    PairEvolver(Matrix full_propagator, ExtendedBasis basis, PairEvolverOptions options = {});

    const ExtendedBasis& basis() const { return basis_; }
    const PairEvolverOptions& options() const { return options_; }
    const Matrix& full_propagator() const { return w_; }

    // Pure two-photon initial state at straight sites (0-based straight
    // ordinals); n0 == m0 puts both photons on one site.
    Matrix initial_pair(int n0, int m0) const;

    Matrix step(const Matrix& rho) const;            // one full period
    Matrix propagation_phase(const Matrix& rho) const;
    Matrix dissipation_phase(const Matrix& rho) const;

  private:
    void build(const LatticeSpec* spec);

    ExtendedBasis basis_;
    PairEvolverOptions options_;
    const LatticeSpec* spec_ = nullptr;  // only set for lattice-backed evolvers
    LatticeSpec spec_storage_;
    Matrix w_;       // M x M one-period propagator
    Matrix v_;       // D x D lifted propagator (factorized mode)
    std::vector<OperatorLift> aux_ops_;
};

// Spec-level operations.
Matrix propagate_density_period(const LatticeSpec& spec, const Matrix& rho,
                                PairEvolverOptions options = {});
Matrix evolve_pair(const LatticeSpec& spec, int n0, int m0, int k,
                   PairEvolverOptions options = {});

struct CorrelationMatrix {
    RealMatrix gamma_raw;         // Gamma_nm over ordered straight pairs; sums to survival_p2
    RealMatrix gamma_normalized;  // gamma_raw / survival_p2
    double survival_p2 = 0.0;
};

// Reads the two-photon diagonal at straight-site pairs. Throws
// NumericalError if a diagonal entry is below -1e-12.
CorrelationMatrix correlation_matrix(const Matrix& rho, const ExtendedBasis& basis,
                                     const LatticeSpec& spec);

// Transmission-matrix shortcut: the two-photon amplitude evolves as
// U phi U^T, so Gamma_jl = |(U phi U^T)_{jl}|^2 with the initial phi of the
// injected pair. Pass power(u, k) for multi-period evolution.
CorrelationMatrix pair_correlation_via_u(const TransmissionMatrix& u, int n0, int m0);

struct DensityInvariantReport {
    double trace = 0.0;
    double hermiticity_residual = 0.0;  // relative Frobenius
    double min_eigenvalue = 0.0;
    double two_photon_trace = 0.0;  // per photon-number block, for triangularity checks
    double one_photon_trace = 0.0;
    double vacuum_weight = 0.0;
    bool passes(double trace_cap = 1.0 + 1e-10) const;
};

DensityInvariantReport check_density_invariants(const Matrix& rho, const ExtendedBasis& basis);

}  // namespace nhqw
