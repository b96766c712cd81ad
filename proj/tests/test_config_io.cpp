#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "nhqw/config.hpp"
#include "nhqw/io.hpp"

using namespace nhqw;
namespace fs = std::filesystem;

TEST_CASE("angle tokens") {
    CHECK(parse_angle("0.5") == doctest::Approx(0.5));
    CHECK(parse_angle("pi") == doctest::Approx(std::numbers::pi));
    CHECK(parse_angle("pi/2") == doctest::Approx(std::numbers::pi / 2));
    CHECK(parse_angle("3pi/8") == doctest::Approx(3 * std::numbers::pi / 8));
    CHECK(parse_angle(" pi/4 ") == doctest::Approx(std::numbers::pi / 4));
    CHECK_THROWS_AS(parse_angle("pi*2"), ConfigError);
    CHECK_THROWS_AS(parse_angle("two"), ConfigError);
}

TEST_CASE("config text round trip") {
    RunConfig cfg;
    cfg.spec.n_straight = 11;
    cfg.spec.boundary = Boundary::ring;
    cfg.spec.phase_phi = std::numbers::pi / 8;
    cfg.experiment = Experiment::entropy_curve;
    cfg.injection = 4;
    cfg.injection_pair = {3, 4};
    cfg.periods = {2, 4};
    cfg.phi_list = {0.0, 0.25, std::numbers::pi / 2};
    cfg.steps_per_period = 123;
    cfg.format = "json";
    cfg.out_dir = "somewhere";
    cfg.dump_density = true;
    cfg.gbz_ring = 24;
    cfg.entropy_periods = 7;
    const std::string text = run_config_to_text(cfg);
    const RunConfig back = run_config_from_text(text);
    CHECK(back.spec.n_straight == 11);
    CHECK(back.spec.boundary == Boundary::ring);
    CHECK(back.spec.phase_phi == doctest::Approx(cfg.spec.phase_phi));
    CHECK(back.experiment == Experiment::entropy_curve);
    CHECK(back.injection == 4);
    CHECK(back.injection_pair == std::pair<int, int>{3, 4});
    CHECK(back.periods == std::vector<int>{2, 4});
    CHECK(back.phi_list.size() == 3);
    CHECK(back.phi_list[2] == doctest::Approx(std::numbers::pi / 2));
    CHECK(back.steps_per_period == 123);
    CHECK(back.format == "json");
    CHECK(back.out_dir == fs::path("somewhere"));
    CHECK(back.dump_density);
    CHECK(back.gbz_ring == 24);
    CHECK(back.entropy_periods == 7);
}

TEST_CASE("config defaults follow the published parameters") {
    const RunConfig cfg = run_config_from_text("[lattice]\n[run]\n");
    CHECK(cfg.spec.n_straight == 9);
    CHECK(cfg.spec.spacing_a == doctest::Approx(0.9));
    CHECK(cfg.spec.radius_r == doctest::Approx(0.21));
    CHECK(cfg.spec.period_t == doctest::Approx(40.0));
    CHECK(cfg.spec.coupling_a == doctest::Approx(13.99));
    CHECK(cfg.spec.coupling_b == doctest::Approx(8.26));
    CHECK(cfg.spec.boundary == Boundary::open);
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(run_config_from_text("[lattice]\nuh oh\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("[lattice]\nmystery = 3\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("[wat]\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("[lattice]\nn_straight = 1\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("[run]\nexperiment = dance\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("[run]\ninjection = 99\n"), ConfigError);
    CHECK_THROWS_AS(run_config_from_text("[run]\nformat = yaml\n"), ConfigError);
}

TEST_CASE("comments and spacing are tolerated") {
    const auto cfg = run_config_from_text(
        "# top comment\n[lattice]\n  n_straight = 5  # inline\n\n[run]\nperiods = 1, 2 ,3\n");
    CHECK(cfg.spec.n_straight == 5);
    CHECK(cfg.periods == std::vector<int>{1, 2, 3});
}

TEST_CASE("deterministic number formatting") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-1.5e-7) == "-1.4999999999999999e-07");
}

TEST_CASE("checksums are stable") {
    CHECK(checksum_hex("") == "cbf29ce484222325");
    CHECK(checksum_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64("abc") != fnv1a64("acb"));
}

TEST_CASE("csv table rendering") {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{"1", "2"}, {"3", "4"}};
    CHECK(t.to_string() == "a,b\n1,2\n3,4\n");
}

TEST_CASE("density matrix byte dump is little-endian interleaved") {
    Matrix rho(1, 2);
    rho(0, 0) = Complex{1.0, -2.0};
    rho(0, 1) = Complex{0.0, 0.5};
    const std::string bytes = density_matrix_bytes(rho);
    REQUIRE(bytes.size() == 32);
    auto read_d = [&](size_t off) {
        double v;
        std::memcpy(&v, bytes.data() + off, 8);
        return v;
    };
    CHECK(read_d(0) == 1.0);
    CHECK(read_d(8) == -2.0);
    CHECK(read_d(16) == 0.0);
    CHECK(read_d(24) == 0.5);
}

TEST_CASE("run outputs land on disk with a manifest; failures clean up") {
    const fs::path dir = fs::temp_directory_path() / "nhqw_io_test";
    fs::remove_all(dir);
    SUBCASE("success writes files plus manifest") {
        const auto manifest =
            write_run_outputs(dir, "echo", {{"a.csv", "x,y\n"}, {"sub/b.json", "{}\n"}}, 0.25);
        CHECK(fs::exists(dir / "a.csv"));
        CHECK(fs::exists(dir / "sub/b.json"));
        CHECK(fs::exists(dir / "manifest.json"));
        CHECK(manifest.checksums.size() == 2);
        CHECK(manifest.run_id.size() == 16);
        // manifest checksum matches the file bytes
        std::ifstream in(dir / "a.csv", std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CHECK(checksum_hex(content) == manifest.checksums[0].second);
    }
    SUBCASE("identical payloads produce identical run ids") {
        const auto m1 = write_run_outputs(dir, "echo", {{"a.csv", "1\n"}}, 0.1);
        const auto m2 = write_run_outputs(dir, "echo", {{"a.csv", "1\n"}}, 99.0);
        CHECK(m1.run_id == m2.run_id);  // wall time excluded
    }
    fs::remove_all(dir);
}
