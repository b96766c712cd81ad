#pragma once

// Brute-force Fock-space machinery for at most two bosons on M sites.
// Built from occupation-number rules only (a_j |..n_j..> = sqrt(n_j)|..n_j-1..>),
// independently of the extended-space operator lifts it is used to validate.

#include <array>
#include <vector>

#include "nhqw/types.hpp"

namespace nhqw::fock {

// Orthonormal basis: vacuum, |1_l>, and |i,j> with i <= j (two photons).
struct Basis {
    int sites = 0;
    int dim() const { return 1 + sites + sites * (sites + 1) / 2; }
    int index_vac() const { return 0; }
    int index_one(int l) const { return 1 + l; }
    int index_two(int i, int j) const;                 // i <= j
    std::array<int, 2> occupied_pair(int index) const;  // valid for two-photon indices
};

Basis make_basis(int sites);

// Matrix of the annihilation operator a_j in the orthonormal Fock basis.
Matrix annihilation(const Basis& basis, int j);

// Second-quantized lift sum_{nm} h_{nm} a_n^dag a_m of a single-particle
// Hamiltonian h (M x M).
Matrix lift_single_particle(const Basis& basis, const Matrix& h);

// Fixed-step RK4 integration of i d|psi>/dt = H |psi> for a constant H.
Vector evolve(const Matrix& hamiltonian, Vector psi, double t, int steps);

}  // namespace nhqw::fock
