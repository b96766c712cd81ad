#include "nhqw/lattice.hpp"

#include <cmath>
#include <numbers>

namespace nhqw {

void LatticeSpec::validate() const {
    if (n_straight < 2) throw ConfigError("n_straight must be >= 2");
    if (period_t <= 0) throw ConfigError("period_T must be positive");
    if (coupling_a <= 0) throw ConfigError("coupling_A must be positive");
    if (coupling_b <= 0) throw ConfigError("coupling_b must be positive");
    if (spacing_a <= 0) throw ConfigError("spacing_a must be positive");
    if (radius_r < 0) throw ConfigError("radius_R must be non-negative");
    if (radius_r >= spacing_a)
        throw ConfigError("radius_R must be smaller than spacing_a; the auxiliary "
                          "waveguide may not cross a straight one");
}

SiteIndex site_of_flat(int flat, const LatticeSpec& spec) {
    if (flat < 0 || flat >= spec.total_sites()) throw DomainError("flat site index out of range");
    SiteIndex s;
    s.flat = flat;
    s.kind = (flat % 2 == 0) ? SiteIndex::Kind::straight : SiteIndex::Kind::auxiliary;
    s.ordinal = flat / 2;
    return s;
}

int flat_of(SiteIndex::Kind kind, int ordinal) {
    return kind == SiteIndex::Kind::straight ? straight_flat(ordinal) : aux_flat(ordinal);
}

double coupling_strength(double distance, const LatticeSpec& spec) {
    if (distance <= 0) throw DomainError("coupling distance must be positive");
    return spec.coupling_a * std::exp(-spec.coupling_b * distance);
}

double aux_offset(double z, const LatticeSpec& spec) {
    return spec.radius_r * std::sin(2.0 * std::numbers::pi * z / spec.period_t + spec.phase_phi);
}

std::vector<double> bond_couplings(double z, const LatticeSpec& spec) {
    spec.validate();
    const double off = aux_offset(z, spec);
    const double gap_left = spec.spacing_a + off;
    const double gap_right = spec.spacing_a - off;
    if (gap_left <= 0 || gap_right <= 0)
        throw ConfigError("auxiliary offset closes a gap; radius_R too large");
    const double k_left = coupling_strength(gap_left, spec);
    const double k_right = coupling_strength(gap_right, spec);
    const int n_bonds = spec.boundary == Boundary::ring ? spec.total_sites()
                                                        : spec.total_sites() - 1;
    std::vector<double> k(n_bonds);
    for (int b = 0; b < n_bonds; ++b) k[b] = (b % 2 == 0) ? k_left : k_right;
    return k;
}

Matrix instantaneous_hamiltonian(double z, const LatticeSpec& spec) {
    const int m = spec.total_sites();
    const auto k = bond_couplings(z, spec);
    Matrix h = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) h(i, i) = spec.onsite_beta0;
    for (size_t b = 0; b < k.size(); ++b) {
        const int i = static_cast<int>(b);
        const int j = (i + 1) % m;
        h(i, j) = -k[b];
        h(j, i) = -k[b];
    }
    return h;
}

kernels::SparseCsr hamiltonian_pattern(const LatticeSpec& spec) {
    spec.validate();
    const int m = spec.total_sites();
    const int n_bonds = spec.boundary == Boundary::ring ? m : m - 1;
    std::vector<kernels::SparseCsr::Triplet> t;
    t.reserve(m + 2 * n_bonds);
    for (int i = 0; i < m; ++i) t.push_back({i, i, spec.onsite_beta0});
    for (int b = 0; b < n_bonds; ++b) {
        const int j = (b + 1) % m;
        t.push_back({b, j, 0.0});
        t.push_back({j, b, 0.0});
    }
    return kernels::SparseCsr::from_triplets(m, m, std::move(t));
}

void update_hamiltonian(double z, const LatticeSpec& spec, kernels::SparseCsr& h) {
    const auto k = bond_couplings(z, spec);
    const int m = spec.total_sites();
    for (int r = 0; r < m; ++r) {
        for (int i = h.row_ptr[r]; i < h.row_ptr[r + 1]; ++i) {
            const int c = h.col_idx[i];
            if (c == r) {
                h.val[i] = spec.onsite_beta0;
            } else {
                // bond index is min(r,c) except for the ring wraparound pair
                int b = std::min(r, c);
                if (std::abs(r - c) != 1) b = m - 1;
                h.val[i] = -k[b];
            }
        }
    }
}

}  // namespace nhqw
