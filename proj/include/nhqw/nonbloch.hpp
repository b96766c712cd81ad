#pragma once

// Non-Bloch band analysis of the effective Hamiltonian: bulk hopping
// extraction on a ring, PBC/OBC spectra, the generalized Brillouin zone,
// skin depth, and the skin-removing similarity transform.
//
// Hopping convention: kappa_order is the amplitude for hopping BY `order`
// sites, i.e. the matrix element H[(n+order) mod N, n]. Under this
// convention a dominant kappa_{-1} means leftward transport, the GBZ radius
// for a nearest-neighbor model is sqrt(|kappa_{+1}/kappa_{-1}|), and a
// radius below 1 (g < 0) signals left-localized skin modes.

#include <span>
#include <utility>
#include <vector>

#include "nhqw/floquet.hpp"
#include "nhqw/lattice.hpp"
#include "nhqw/types.hpp"

namespace nhqw {

// Default truncation range for bulk hoppings.
inline constexpr int kDefaultMinOrder = -4;
inline constexpr int kDefaultMaxOrder = 5;
// Smallest ring that keeps the truncation range alias-free: displacement o
// and o +/- n_ring must not collide inside [min_order, max_order].
inline constexpr int kDefaultGbzRing = 20;
inline constexpr double kGbzPairTolerance = 1e-3;
inline constexpr double kCircularityThreshold = 0.05;

struct BulkHoppings {
    int min_order = kDefaultMinOrder;
    int max_order = kDefaultMaxOrder;
    std::vector<Complex> kappa;  // kappa[order - min_order], 1/um
    int source_ring_size = 0;
    double circulant_residual = 0.0;  // max deviation from circulant / max |kappa|
    bool circulant_warning = false;

    Complex at(int order) const { return kappa.at(static_cast<size_t>(order - min_order)); }
    int left_range() const { return -min_order; }   // q
    int right_range() const { return max_order; }   // p
};

// Builds the ring effective Hamiltonian on n_ring sites (geometry taken from
// spec, boundary forced to ring) and averages each hopping order.
BulkHoppings bulk_hoppings(const LatticeSpec& spec, int n_ring,
                           int min_order = kDefaultMinOrder, int max_order = kDefaultMaxOrder,
                           int steps = kDefaultStepsPerPeriod);

struct SpectrumResult {
    enum class Kind { pbc, obc };
    Kind kind;
    std::vector<Complex> eigenvalues;
    int lattice_size = 0;
};

// E(k) = sum_order kappa_order e^{-i k order} sampled at k = 2 pi j / n_samples.
SpectrumResult pbc_spectrum(const BulkHoppings& h, int n_samples);

// Eigenvalues of the open-boundary effective Hamiltonian on n_sites.
SpectrumResult obc_spectrum(const LatticeSpec& spec, int n_sites = 30,
                            int steps = kDefaultStepsPerPeriod);

// Eigenvalues of an explicitly supplied matrix.
std::vector<Complex> spectrum_of(const Matrix& h);

// Signed area enclosed by the ordered loop of points (shoelace).
double loop_signed_area(std::span<const Complex> loop);

// Roots of sum_i coeffs[i] x^i via the companion matrix.
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs);

struct GbzPoint {
    Complex energy;
    Complex beta;
};

struct GbzCurve {
    std::vector<GbzPoint> samples;
    double fitted_radius = 0.0;
    double circle_residual = 0.0;  // max | |beta| - fitted_radius |
    int skipped = 0;               // energies with no modulus-matched root pair
    int total_energies = 0;
    double pair_tolerance = kGbzPairTolerance;
};

// For each energy E solves sum_order kappa_order beta^{p-order} = E beta^p
// (degree p+q, p = right range, q = left range) and accepts the p-th and
// (p+1)-th roots by ascending modulus when their moduli agree within
// pair_tol relative. Throws NumericalError when more than half of the
// energies yield no matched pair.
GbzCurve gbz(const BulkHoppings& h, std::span<const Complex> energies,
             double pair_tol = kGbzPairTolerance);

// g = log(fitted radius); requires the GBZ to be circular within
// kCircularityThreshold (the diagonal similarity transform presumes a single
// radius). g < 0 means left-localized skin modes.
double skin_depth(const GbzCurve& curve);

// Hbar = S H S^{-1} with S = diag(e^{-g}, e^{-2g}, ..., e^{-Ng}).
Matrix similarity_transform(const Matrix& h, double g);

// Htilde = i Hbar plus the Hermiticity residual |Htilde - Htilde^dag| / |Htilde|.
std::pair<Matrix, double> hermitianize(const Matrix& hbar);

}  // namespace nhqw
