#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nhqw/nonbloch.hpp"

using namespace nhqw;

namespace {

constexpr double kPi = std::numbers::pi;

LatticeSpec reference_spec(double phi, int n, Boundary b = Boundary::open) {
    LatticeSpec s;
    s.n_straight = n;
    s.phase_phi = phi;
    s.boundary = b;
    return s;
}

BulkHoppings hand_hoppings(std::initializer_list<std::pair<int, Complex>> values, int min_order,
                           int max_order) {
    BulkHoppings h;
    h.min_order = min_order;
    h.max_order = max_order;
    h.kappa.assign(static_cast<size_t>(max_order - min_order) + 1, Complex{0.0, 0.0});
    for (const auto& [o, v] : values) h.kappa[static_cast<size_t>(o - min_order)] = v;
    return h;
}

}  // namespace

TEST_CASE("polynomial roots of a cubic with known factorization") {
    // (x - 1)(x - 2i)(x + 3) = x^3 + (2 - 2i) x^2 + (-3 - 4i) x + 6i... use direct expansion
    const Complex r1{1.0, 0.0}, r2{0.0, 2.0}, r3{-3.0, 0.0};
    std::vector<Complex> c{-r1 * r2 * r3, r1 * r2 + r1 * r3 + r2 * r3, -(r1 + r2 + r3), 1.0};
    auto roots = polynomial_roots(c);
    REQUIRE(roots.size() == 3);
    std::sort(roots.begin(), roots.end(),
              [](const Complex& a, const Complex& b) { return a.real() < b.real(); });
    CHECK(std::abs(roots[0] - r3) < 1e-10);
    CHECK(std::abs(roots[1] - r2) < 1e-10);
    CHECK(std::abs(roots[2] - r1) < 1e-10);
}

TEST_CASE("bulk hoppings vanish for an uncoupled ring") {
    auto spec = reference_spec(0.0, 10, Boundary::ring);
    spec.coupling_a = 1e-30;
    const auto h = bulk_hoppings(spec, 10, -4, 5, 300);
    for (int o = -4; o <= 5; ++o) CHECK(std::abs(h.at(o)) < 1e-12);
}

TEST_CASE("bulk hoppings require a ring and enough sites") {
    CHECK_THROWS_AS((void)bulk_hoppings(reference_spec(0.0, 10, Boundary::open), 10, -4, 5, 300),
                    ConfigError);
    CHECK_THROWS_AS((void)bulk_hoppings(reference_spec(0.0, 8, Boundary::ring), 8, -4, 5, 300),
                    DomainError);
}

TEST_CASE("ring effective Hamiltonian matches the reference hopping table") {
    const auto h = bulk_hoppings(reference_spec(0.0, 10, Boundary::ring), 10, -4, 5, 2000);
    // frozen reference values, units 1e-4 / um
    const std::vector<std::pair<int, double>> expected{
        {-4, -3.55}, {-3, -9.70}, {-2, -29.8}, {-1, -123.0}, {0, -113.0},
        {1, -12.2},  {2, -0.240}, {3, -0.239}, {4, -0.565},  {5, -1.38}};
    for (const auto& [o, im] : expected) {
        CHECK(std::abs(h.at(o).real()) < 1e-8);  // real part always zero
        CHECK(h.at(o).imag() * 1e4 == doctest::Approx(im).epsilon(0.06));
    }
    CHECK(h.circulant_residual < 0.01);
    CHECK_FALSE(h.circulant_warning);
}

TEST_CASE("symmetric phase gives equal-magnitude left and right hoppings") {
    const auto h = bulk_hoppings(reference_spec(kPi / 2, 10, Boundary::ring), 10, -4, 5, 1200);
    CHECK(std::abs(h.at(-1)) == doctest::Approx(std::abs(h.at(1))).epsilon(0.01));
}

TEST_CASE("pbc spectrum basics") {
    SUBCASE("single onsite term gives a constant spectrum") {
        const auto h = hand_hoppings({{0, Complex{0.3, -0.1}}}, -1, 1);
        const auto s = pbc_spectrum(h, 32);
        for (const auto& e : s.eigenvalues) CHECK(std::abs(e - Complex{0.3, -0.1}) < 1e-14);
    }
    SUBCASE("symmetric real nearest-neighbor hopping gives a flat real segment") {
        const auto h = hand_hoppings({{-1, 0.5}, {1, 0.5}}, -1, 1);
        const auto s = pbc_spectrum(h, 64);
        double max_im = 0.0;
        for (const auto& e : s.eigenvalues) max_im = std::max(max_im, std::abs(e.imag()));
        CHECK(max_im < 1e-14);
        CHECK(std::abs(loop_signed_area(s.eigenvalues)) < 1e-12);
    }
    SUBCASE("matches the ring eigenvalues of the source Hamiltonian") {
        const int n_ring = 10;
        const auto spec = reference_spec(0.0, n_ring, Boundary::ring);
        const auto h = bulk_hoppings(spec, n_ring, -4, 5, 1000);
        const auto pbc = pbc_spectrum(h, n_ring);
        auto direct = spectrum_of(effective_hamiltonian(transmission_matrix(spec, 1000)).entries);
        // compare as sets
        for (const auto& e : pbc.eigenvalues) {
            double best = 1e9;
            for (const auto& d : direct) best = std::min(best, std::abs(e - d));
            CHECK(best < 1e-6);
        }
    }
    SUBCASE("asymmetric lattice encloses nonvanishing area") {
        const auto h = bulk_hoppings(reference_spec(0.0, 20, Boundary::ring), 20, -4, 5, 1000);
        const auto s = pbc_spectrum(h, 101);
        CHECK(std::abs(loop_signed_area(s.eigenvalues)) > 1e-6);
    }
}

TEST_CASE("obc spectrum basics") {
    SUBCASE("uncoupled lattice collapses to zero") {
        auto spec = reference_spec(0.0, 9);
        spec.coupling_a = 1e-30;
        const auto s = obc_spectrum(spec, 12, 300);
        for (const auto& e : s.eigenvalues) CHECK(std::abs(e) < 1e-10);
    }
    SUBCASE("a Hermitian matrix has a real spectrum") {
        Matrix h = Matrix::Zero(6, 6);
        for (int i = 0; i + 1 < 6; ++i) {
            h(i, i + 1) = Complex{0.4, 0.1};
            h(i + 1, i) = std::conj(h(i, i + 1));
        }
        for (const auto& e : spectrum_of(h)) CHECK(std::abs(e.imag()) < 1e-12);
    }
}

TEST_CASE("obc spectrum lies inside the pbc loop for the asymmetric lattice") {
    const auto hops = bulk_hoppings(reference_spec(0.0, 20, Boundary::ring), 20, -4, 5, 1000);
    const auto pbc = pbc_spectrum(hops, 721);
    const auto obc = obc_spectrum(reference_spec(0.0, 9), 30, 1000);
    // winding-number point-in-polygon test against the sampled loop
    auto inside = [&](Complex p) {
        double angle = 0.0;
        const auto& loop = pbc.eigenvalues;
        for (size_t i = 0; i < loop.size(); ++i) {
            const Complex a = loop[i] - p;
            const Complex b = loop[(i + 1) % loop.size()] - p;
            angle += std::arg(b / a);
        }
        return std::abs(angle) > kPi;  // winding +-2pi when enclosed
    };
    int enclosed = 0;
    for (const auto& e : obc.eigenvalues)
        if (inside(e)) ++enclosed;
    CHECK(enclosed == static_cast<int>(obc.eigenvalues.size()));
}

TEST_CASE("gbz of Hermitian hoppings is the unit circle") {
    const auto h = hand_hoppings({{-1, 0.7}, {0, Complex{0.2, 0.0}}, {1, 0.7}}, -1, 1);
    std::vector<Complex> energies;
    for (int i = 0; i <= 20; ++i) energies.push_back(0.2 + 1.4 * std::cos(kPi * i / 21.0));
    const auto curve = gbz(h, energies);
    CHECK(curve.skipped == 0);
    for (const auto& s : curve.samples) CHECK(std::abs(std::abs(s.beta) - 1.0) < 1e-6);
    CHECK(curve.fitted_radius == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gbz of asymmetric nearest-neighbor hopping matches the closed form") {
    // kappa_{-1} = 2 kappa_{+1}, both imaginary: |beta| = sqrt(|k_{+1}/k_{-1}|)
    const Complex kp{0.0, -0.01};
    const Complex km = 2.0 * kp;
    const auto h = hand_hoppings({{-1, km}, {1, kp}}, -1, 1);
    // energies on the open-boundary limit set E = 2 sqrt(km kp) cos(theta)
    const Complex scale = std::sqrt(km * kp);
    std::vector<Complex> energies;
    for (int i = 1; i < 16; ++i) energies.push_back(2.0 * scale * std::cos(kPi * i / 16.0));
    const auto curve = gbz(h, energies);
    CHECK(curve.skipped == 0);
    const double expected = 1.0 / std::sqrt(2.0);
    for (const auto& s : curve.samples)
        CHECK(std::abs(s.beta) == doctest::Approx(expected).epsilon(1e-6));
    CHECK(skin_depth(curve) == doctest::Approx(std::log(expected)).epsilon(1e-9));
    CHECK(skin_depth(curve) == doctest::Approx(-0.34657).epsilon(1e-4));
}

TEST_CASE("gbz failure when no root pair matches") {
    const auto h = hand_hoppings({{-1, Complex{0.0, -0.02}}, {1, Complex{0.0, -0.01}}}, -1, 1);
    // energies far off the limit set: every one is skipped
    std::vector<Complex> energies{{5.0, 0.0}, {0.0, 5.0}, {3.0, 3.0}};
    CHECK_THROWS_AS((void)gbz(h, energies, 1e-6), NumericalError);
}

TEST_CASE("skin depth guards non-circular curves") {
    GbzCurve curve;
    curve.fitted_radius = 1.0;
    curve.circle_residual = 0.2;
    CHECK_THROWS_AS(skin_depth(curve), NumericalError);
    curve.circle_residual = 0.0;
    CHECK(skin_depth(curve) == doctest::Approx(0.0));
}

TEST_CASE("similarity transform") {
    Matrix h(3, 3);
    h << Complex{0.1, 0.0}, Complex{0.0, -0.02}, 0.0, Complex{0.0, -0.01}, Complex{0.1, 0.0},
        Complex{0.0, -0.02}, 0.0, Complex{0.0, -0.01}, Complex{0.1, 0.0};
    SUBCASE("g = 0 is the identity transform") {
        CHECK((similarity_transform(h, 0.0) - h).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("spectrum is preserved") {
        const auto before = spectrum_of(h);
        const auto after = spectrum_of(similarity_transform(h, -0.4));
        for (const auto& e : before) {
            double best = 1e9;
            for (const auto& f : after) best = std::min(best, std::abs(e - f));
            CHECK(best < 1e-10);
        }
    }
    SUBCASE("matched g symmetrizes asymmetric nearest-neighbor hopping") {
        // upper |H_{n,n+1}| = 0.02 scales by e^{+g}, lower 0.01 by e^{-g}
        const double g = 0.5 * std::log(0.01 / 0.02);
        const Matrix hb = similarity_transform(h, g);
        CHECK(std::abs(hb(0, 1)) == doctest::Approx(std::abs(hb(1, 0))).epsilon(1e-12));
        CHECK(std::abs(hb(1, 2)) == doctest::Approx(std::abs(hb(2, 1))).epsilon(1e-12));
    }
    SUBCASE("overflow guard") {
        CHECK_THROWS_AS(similarity_transform(Matrix::Identity(200, 200), 2.0), NumericalError);
    }
}

TEST_CASE("hermitianize") {
    SUBCASE("minus i times a real symmetric matrix becomes Hermitian") {
        Matrix s = Matrix::Random(4, 4).real().cast<Complex>();
        s = (s + Matrix(s.transpose())).eval();
        const auto [ht, resid] = hermitianize(-kImagUnit * s);
        CHECK(resid < 1e-14);
        CHECK((ht - s).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("an already Hermitian input is flagged by a large residual") {
        Matrix h = Matrix::Identity(3, 3);
        h(0, 1) = Complex{0.1, 0.2};
        h(1, 0) = std::conj(h(0, 1));
        const auto [ht, resid] = hermitianize(h);
        CHECK(resid > 0.5);
    }
}

TEST_CASE("skin modes pile at one edge and the transform delocalizes them") {
    const auto u = transmission_matrix(reference_spec(0.0, 30), 1000);
    const auto heff = effective_hamiltonian(u);
    const auto hops = bulk_hoppings(reference_spec(0.0, kDefaultGbzRing, Boundary::ring), kDefaultGbzRing,
                                    -4, 5, 1000);
    const auto obc = obc_spectrum(reference_spec(0.0, 30), 30, 1000);
    const double g = skin_depth(gbz(hops, obc.eigenvalues));
    CHECK(g < 0.0);  // left-localized

    auto mean_centroid = [](const Matrix& h) {
        Eigen::ComplexEigenSolver<Matrix> es(h);
        double sum = 0.0;
        const int n = static_cast<int>(h.rows());
        for (int v = 0; v < n; ++v) {
            const Vector vec = es.eigenvectors().col(v);
            double w = 0.0, c = 0.0;
            for (int i = 0; i < n; ++i) {
                w += std::norm(vec[i]);
                c += i * std::norm(vec[i]);
            }
            sum += c / w;
        }
        return sum / n;
    };
    const double n_half = 29.0 / 2.0;
    const double centroid_raw = mean_centroid(heff.entries);
    const double centroid_bar = mean_centroid(similarity_transform(heff.entries, g));
    CHECK(std::abs(centroid_raw - n_half) > 0.2 * 30);
    CHECK(std::abs(centroid_bar - n_half) < 0.1 * 30);
}
