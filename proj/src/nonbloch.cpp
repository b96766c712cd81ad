#include "nhqw/nonbloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace nhqw {

BulkHoppings bulk_hoppings(const LatticeSpec& spec, int n_ring, int min_order, int max_order,
                           int steps) {
    if (spec.boundary != Boundary::ring)
        throw ConfigError("bulk hoppings require a ring boundary");
    if (min_order >= 0 || max_order <= 0 || min_order >= max_order)
        throw DomainError("order range must straddle zero");
    const int span = max_order - min_order;
    if (n_ring < span + 1) {
        std::ostringstream msg;
        msg << "ring of " << n_ring << " sites cannot resolve hopping orders [" << min_order
            << ", " << max_order << "]; need at least " << span + 1 << " sites";
        throw DomainError(msg.str());
    }
    LatticeSpec ring = spec;
    ring.n_straight = n_ring;
    const EffectiveHamiltonian heff = effective_hamiltonian(transmission_matrix(ring, steps));
    const Matrix& h = heff.entries;

    BulkHoppings out;
    out.min_order = min_order;
    out.max_order = max_order;
    out.source_ring_size = n_ring;
    out.kappa.resize(static_cast<size_t>(span) + 1);
    double max_abs = 0.0;
    double max_dev = 0.0;
    for (int order = min_order; order <= max_order; ++order) {
        Complex mean{0.0, 0.0};
        for (int n = 0; n < n_ring; ++n) mean += h(((n + order) % n_ring + n_ring) % n_ring, n);
        mean /= static_cast<double>(n_ring);
        out.kappa[static_cast<size_t>(order - min_order)] = mean;
        max_abs = std::max(max_abs, std::abs(mean));
        for (int n = 0; n < n_ring; ++n)
            max_dev = std::max(max_dev,
                               std::abs(h(((n + order) % n_ring + n_ring) % n_ring, n) - mean));
    }
    out.circulant_residual = max_abs > 0 ? max_dev / max_abs : max_dev;
    out.circulant_warning = out.circulant_residual > 0.01;
    return out;
}

SpectrumResult pbc_spectrum(const BulkHoppings& h, int n_samples) {
    if (n_samples < 3) throw DomainError("need at least 3 momentum samples");
    SpectrumResult r;
    r.kind = SpectrumResult::Kind::pbc;
    r.lattice_size = n_samples;
    r.eigenvalues.reserve(n_samples);
    for (int j = 0; j < n_samples; ++j) {
        const double k = 2.0 * std::numbers::pi * j / n_samples;
        Complex e{0.0, 0.0};
        for (int o = h.min_order; o <= h.max_order; ++o)
            e += h.at(o) * std::exp(-kImagUnit * (k * o));
        r.eigenvalues.push_back(e);
    }
    return r;
}

SpectrumResult obc_spectrum(const LatticeSpec& spec, int n_sites, int steps) {
    if (n_sites < 2) throw DomainError("need at least 2 sites");
    LatticeSpec open = spec;
    open.boundary = Boundary::open;
    open.n_straight = n_sites;
    const EffectiveHamiltonian heff = effective_hamiltonian(transmission_matrix(open, steps));
    SpectrumResult r;
    r.kind = SpectrumResult::Kind::obc;
    r.lattice_size = n_sites;
    r.eigenvalues = spectrum_of(heff.entries);
    return r;
}

std::vector<Complex> spectrum_of(const Matrix& h) {
    Eigen::ComplexEigenSolver<Matrix> es(h, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
    std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return ev;
}

double loop_signed_area(std::span<const Complex> loop) {
    double area = 0.0;
    const size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
        const Complex& a = loop[i];
        const Complex& b = loop[(i + 1) % n];
        area += a.real() * b.imag() - b.real() * a.imag();
    }
    return 0.5 * area;
}

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs) {
    // strip trailing (highest-order) zeros
    int degree = static_cast<int>(coeffs.size()) - 1;
    while (degree > 0 && std::abs(coeffs[degree]) == 0.0) --degree;
    if (degree < 1) return {};
    Matrix companion = Matrix::Zero(degree, degree);
    const Complex lead = coeffs[degree];
    for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeffs[i] / lead;
    Eigen::ComplexEigenSolver<Matrix> es(companion, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("companion eigensolver failed");
    std::vector<Complex> roots(es.eigenvalues().data(),
                               es.eigenvalues().data() + es.eigenvalues().size());
    return roots;
}

GbzCurve gbz(const BulkHoppings& h, std::span<const Complex> energies, double pair_tol) {
    if (energies.empty()) throw DomainError("need a nonempty energy set");
    const int q = h.left_range();
    const int p = h.right_range();
    if (q < 1 || p < 1) throw DomainError("hopping range must include orders -1 and +1");
    const int degree = p + q;

    GbzCurve curve;
    curve.total_energies = static_cast<int>(energies.size());
    curve.pair_tolerance = pair_tol;

    std::vector<std::vector<GbzPoint>> per_energy(energies.size());
    std::vector<char> matched(energies.size(), 0);
    const int n_e = static_cast<int>(energies.size());
#pragma omp parallel for schedule(dynamic)
    for (int e = 0; e < n_e; ++e) {
        // sum_o kappa_o beta^{p-o} - E beta^p = 0
        std::vector<Complex> c(static_cast<size_t>(degree) + 1, Complex{0.0, 0.0});
        for (int o = h.min_order; o <= h.max_order; ++o) c[static_cast<size_t>(p - o)] += h.at(o);
        c[static_cast<size_t>(p)] -= energies[e];
        auto roots = polynomial_roots(c);
        if (static_cast<int>(roots.size()) != degree) continue;
        std::sort(roots.begin(), roots.end(),
                  [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });
        const Complex b1 = roots[static_cast<size_t>(p - 1)];
        const Complex b2 = roots[static_cast<size_t>(p)];
        if (std::abs(std::abs(b2) - std::abs(b1)) <= pair_tol * std::abs(b1)) {
            per_energy[e] = {{energies[e], b1}, {energies[e], b2}};
            matched[e] = 1;
        }
    }
    for (int e = 0; e < n_e; ++e) {
        if (matched[e])
            curve.samples.insert(curve.samples.end(), per_energy[e].begin(), per_energy[e].end());
        else
            curve.skipped++;
    }
    if (2 * curve.skipped > curve.total_energies) {
        std::ostringstream msg;
        msg << "generalized Brillouin zone construction failed: " << curve.skipped << " of "
            << curve.total_energies << " energies had no modulus-matched root pair at tolerance "
            << pair_tol;
        throw NumericalError(msg.str());
    }
    double sum = 0.0;
    for (const auto& s : curve.samples) sum += std::abs(s.beta);
    curve.fitted_radius = sum / static_cast<double>(curve.samples.size());
    for (const auto& s : curve.samples)
        curve.circle_residual = std::max(curve.circle_residual,
                                         std::abs(std::abs(s.beta) - curve.fitted_radius));
    return curve;
}

double skin_depth(const GbzCurve& curve) {
    if (curve.fitted_radius <= 0) throw DomainError("GBZ radius must be positive");
    if (curve.circle_residual >= kCircularityThreshold * curve.fitted_radius) {
        std::ostringstream msg;
        msg << "GBZ deviates from a circle (residual " << curve.circle_residual << " vs radius "
            << curve.fitted_radius << "); a single-radius similarity transform does not apply";
        throw NumericalError(msg.str());
    }
    return std::log(curve.fitted_radius);
}

Matrix similarity_transform(const Matrix& h, double g) {
    if (h.rows() != h.cols()) throw DomainError("matrix must be square");
    if (!std::isfinite(g)) throw DomainError("skin depth must be finite");
    const int n = static_cast<int>(h.rows());
    if (n * std::abs(g) >= 300.0)
        throw NumericalError("N*|g| too large; diagonal similarity transform would overflow");
    Matrix out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out(r, c) = h(r, c) * std::exp((c - r) * g);
    return out;
}

std::pair<Matrix, double> hermitianize(const Matrix& hbar) {
    Matrix ht = kImagUnit * hbar;
    const double denom = ht.norm();
    const double resid = denom > 0 ? (ht - Matrix(ht.adjoint())).norm() / denom : 0.0;
    return {std::move(ht), resid};
}

}  // namespace nhqw
