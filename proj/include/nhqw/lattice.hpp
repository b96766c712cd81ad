#pragma once

// Lattice geometry: an array of straight waveguides with sinusoidally
// oscillating auxiliary waveguides interleaved between them. The auxiliary
// centerline sits midway between its straight neighbors at rest; at
// propagation distance z its transverse offset is radius_r*sin(2*pi*z/T + phi),
// so the two gaps are spacing_a +/- offset. All lengths in micrometers,
// angles in radians.

#include <span>
#include <vector>

#include "nhqw/kernels.hpp"
#include "nhqw/types.hpp"

namespace nhqw {

enum class Boundary { open, ring };

struct LatticeSpec {
    int n_straight = 9;
    Boundary boundary = Boundary::open;
    double spacing_a = 0.9;    // straight-to-auxiliary rest distance
    double radius_r = 0.21;    // transverse oscillation amplitude
    double period_t = 40.0;    // Floquet period along z
    double phase_phi = 0.0;    // geometric phase of the oscillation
    double coupling_a = 13.99; // coupling-law prefactor, 1/um
    double coupling_b = 8.26;  // coupling-law decay constant, 1/um
    double onsite_beta0 = 0.0; // uniform propagation constant (gauge)

    int n_aux() const { return boundary == Boundary::ring ? n_straight : n_straight - 1; }
    int total_sites() const { return n_straight + n_aux(); }

    // Throws ConfigError when the geometry is inconsistent.
    void validate() const;
};

struct SiteIndex {
    enum class Kind { straight, auxiliary };
    Kind kind;
    int ordinal;  // index within its kind
    int flat;     // position in interleaved order s0, a0, s1, a1, ...
};

inline int straight_flat(int i) { return 2 * i; }
inline int aux_flat(int j) { return 2 * j + 1; }
SiteIndex site_of_flat(int flat, const LatticeSpec& spec);
int flat_of(SiteIndex::Kind kind, int ordinal);

// kappa(d) = A*exp(-b*d). Throws DomainError for non-positive distance.
double coupling_strength(double distance, const LatticeSpec& spec);

// Transverse auxiliary offset R*sin(2*pi*z/T + phi), bounded in [-R, R].
double aux_offset(double z, const LatticeSpec& spec);

// Nearest-neighbor bond couplings in flat order at propagation distance z.
// Bond b connects flat sites b and (b+1) mod M. Even bonds are the left gap
// (a + offset), odd bonds the right gap (a - offset).
std::vector<double> bond_couplings(double z, const LatticeSpec& spec);

// Hermitian coupled-mode Hamiltonian H(z) in flat order: off-diagonal
// entries -kappa(gap), diagonal onsite_beta0.
Matrix instantaneous_hamiltonian(double z, const LatticeSpec& spec);

// Fixed sparsity pattern of H(z) with values for a given z; the pattern is
// reusable across z so integrators can update values in place.
kernels::SparseCsr hamiltonian_pattern(const LatticeSpec& spec);
void update_hamiltonian(double z, const LatticeSpec& spec, kernels::SparseCsr& h);

}  // namespace nhqw
