#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nhqw/lattice.hpp"

using namespace nhqw;

namespace {
constexpr double kPi = std::numbers::pi;
LatticeSpec defaults() { return LatticeSpec{}; }
}  // namespace

TEST_CASE("coupling law at the rest gap") {
    const auto spec = defaults();
    // direct evaluation of A exp(-b x) at the quoted parameters
    CHECK(coupling_strength(0.9, spec) == doctest::Approx(13.99 * std::exp(-8.26 * 0.9)).epsilon(1e-15));
    CHECK(coupling_strength(0.9, spec) == doctest::Approx(8.26556e-3).epsilon(1e-5));
    // strictly decreasing
    CHECK(coupling_strength(0.8, spec) > coupling_strength(0.9, spec));
}

TEST_CASE("coupling at large distance is negligible") {
    const auto spec = defaults();
    CHECK(coupling_strength(10.0, spec) < 1e-30);
    // straight-to-straight rest distance 2a sits ~3 orders below straight-aux
    const double ratio = coupling_strength(0.9, spec) / coupling_strength(1.8, spec);
    CHECK(coupling_strength(1.8, spec) == doctest::Approx(4.8835e-6).epsilon(1e-4));
    CHECK(ratio > 1e3);
}

TEST_CASE("coupling domain errors") {
    const auto spec = defaults();
    CHECK_THROWS_AS(coupling_strength(0.0, spec), DomainError);
    CHECK_THROWS_AS(coupling_strength(-1.0, spec), DomainError);
}

TEST_CASE("auxiliary offset") {
    auto spec = defaults();
    spec.phase_phi = 0.0;
    CHECK(aux_offset(0.0, spec) == doctest::Approx(0.0));
    CHECK(aux_offset(spec.period_t / 4, spec) == doctest::Approx(0.21));
    spec.phase_phi = kPi / 2;
    CHECK(aux_offset(0.0, spec) == doctest::Approx(0.21));
    for (double z : {1.0, 13.0, 25.0}) {
        CHECK(std::abs(aux_offset(z, spec)) <= spec.radius_r + 1e-15);
    }
}

TEST_CASE("site indexing is a bijection") {
    auto spec = defaults();
    for (Boundary b : {Boundary::open, Boundary::ring}) {
        spec.boundary = b;
        for (int f = 0; f < spec.total_sites(); ++f) {
            const auto s = site_of_flat(f, spec);
            CHECK(flat_of(s.kind, s.ordinal) == f);
        }
    }
    CHECK_THROWS_AS(site_of_flat(spec.total_sites(), spec), DomainError);
}

TEST_CASE("instantaneous Hamiltonian structure") {
    auto spec = defaults();
    spec.n_straight = 2;  // 3x3 open lattice
    const Matrix h = instantaneous_hamiltonian(1.0, spec);
    CHECK(h.rows() == 3);
    int nonzero_offdiag = 0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (r != c && h(r, c) != Complex{0.0, 0.0}) ++nonzero_offdiag;
    CHECK(nonzero_offdiag == 4);
    CHECK((h - Matrix(h.adjoint())).norm() == 0.0);
    // all couplings negative of kappa, diagonal at the gauge value
    CHECK(h(0, 1).real() < 0.0);
    CHECK(h(0, 0) == Complex{0.0, 0.0});
}

TEST_CASE("offset zero gives equal left and right couplings") {
    auto spec = defaults();
    spec.phase_phi = 0.0;
    const Matrix h = instantaneous_hamiltonian(0.0, spec);  // offset sin(0) = 0
    CHECK(h(0, 1) == h(1, 2));
}

TEST_CASE("Hamiltonian is T-periodic") {
    const auto spec = defaults();
    for (double z : {0.3, 7.7, 19.0}) {
        const Matrix a = instantaneous_hamiltonian(z, spec);
        const Matrix b = instantaneous_hamiltonian(z + spec.period_t, spec);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("ring boundary wraps the last auxiliary") {
    auto spec = defaults();
    spec.boundary = Boundary::ring;
    const int m = spec.total_sites();
    const Matrix h = instantaneous_hamiltonian(3.0, spec);
    CHECK(h(m - 1, 0) != Complex{0.0, 0.0});
    CHECK(h(m - 1, 0) == h(0, m - 1));
}

TEST_CASE("mirror of the lattice: site reversal + phi -> pi - phi at reflected z") {
    auto spec = defaults();
    spec.phase_phi = 0.37;
    auto mirrored = spec;
    mirrored.phase_phi = kPi - spec.phase_phi;
    for (double z : {0.0, 3.1, 17.5, 33.3}) {
        const auto orig = bond_couplings(spec.period_t / 2 - z, spec);
        const auto mirr = bond_couplings(z, mirrored);
        REQUIRE(orig.size() == mirr.size());
        for (size_t b = 0; b < mirr.size(); ++b)
            CHECK(mirr[b] == doctest::Approx(orig[orig.size() - 1 - b]).epsilon(1e-14));
    }
}

TEST_CASE("sparse pattern matches the dense Hamiltonian") {
    for (Boundary b : {Boundary::open, Boundary::ring}) {
        auto spec = defaults();
        spec.boundary = b;
        spec.onsite_beta0 = 0.013;
        auto h = hamiltonian_pattern(spec);
        for (double z : {0.0, 11.0, 26.5}) {
            update_hamiltonian(z, spec, h);
            CHECK((h.to_dense() - instantaneous_hamiltonian(z, spec)).cwiseAbs().maxCoeff() <
                  1e-15);
        }
    }
}

TEST_CASE("spec validation") {
    auto spec = defaults();
    spec.radius_r = spec.spacing_a;  // would cross
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = defaults();
    spec.n_straight = 1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = defaults();
    spec.period_t = 0.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = defaults();
    spec.coupling_a = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_NOTHROW(defaults().validate());
}

TEST_CASE("site counts for both boundaries") {
    auto spec = defaults();
    CHECK(spec.n_aux() == 8);
    CHECK(spec.total_sites() == 17);
    spec.boundary = Boundary::ring;
    CHECK(spec.n_aux() == 9);
    CHECK(spec.total_sites() == 18);
}
