#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "nhqw/experiments.hpp"

using namespace nhqw;
namespace fs = std::filesystem;

namespace {

RunConfig small_config(Experiment e) {
    RunConfig cfg;
    cfg.spec.n_straight = 5;
    cfg.experiment = e;
    cfg.injection = 3;
    cfg.injection_pair = {2, 3};
    cfg.periods = {1, 2};
    cfg.phi_list = {0.0, std::numbers::pi / 2};
    cfg.steps_per_period = 300;
    cfg.entropy_periods = 3;
    cfg.lyapunov_sites = 13;
    cfg.lyapunov_k1 = 2;
    cfg.lyapunov_k2 = 5;
    cfg.obc_sites = 12;
    cfg.gbz_ring = 20;
    cfg.table_ring = 10;
    return cfg;
}

std::string file_content(const std::vector<OutputFile>& files, const std::string& name) {
    for (const auto& f : files)
        if (f.name == name) return f.contents;
    FAIL("missing output file ", name);
    return {};
}

}  // namespace

TEST_CASE("experiment outputs are byte-identical across runs") {
    for (Experiment e : {Experiment::single_walk, Experiment::lyapunov_sweep, Experiment::table1,
                         Experiment::entropy_curve}) {
        const auto cfg = small_config(e);
        const auto a = build_experiment_outputs(cfg);
        const auto b = build_experiment_outputs(cfg);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].name == b[i].name);
            CHECK(a[i].contents == b[i].contents);
        }
    }
}

TEST_CASE("single walk emits per-phase tables and figure metadata") {
    const auto files = build_experiment_outputs(small_config(Experiment::single_walk));
    const auto json_text = file_content(files, "single_walk.json");
    const auto summary = Json::parse(json_text);
    CHECK(summary["figure"] == "fig2");
    CHECK(summary["lattice"]["n_straight"] == 5);
    CHECK(summary["results"].size() == 2);
    const auto csv = file_content(files, "single_walk_phi0.csv");
    CHECK(csv.find("site,raw_k1,normalized_k1,raw_k2,normalized_k2") == 0);
}

TEST_CASE("pair walk reports both evolution paths") {
    auto cfg = small_config(Experiment::pair_walk);
    cfg.periods = {1};
    cfg.phi_list = {0.4};
    cfg.dump_density = true;
    const auto files = build_experiment_outputs(cfg);
    const auto summary = Json::parse(file_content(files, "pair_walk.json"));
    CHECK(summary["figure"] == "fig3");
    const auto& k1 = summary["results"][0]["periods"][0];
    CHECK(k1["survival_p2"].get<double>() > 0.0);
    CHECK(k1["survival_p2"].get<double>() <= 1.0);
    CHECK(k1["sup_diff_vs_transmission_path"].get<double>() < 1e-8);
    // density dump: D^2 complex entries, 16 bytes each
    const auto& bin = file_content(files, "pair_walk_phi0_k1_rho.bin");
    const auto sidecar = Json::parse(file_content(files, "pair_walk_phi0_k1_rho.json"));
    const int dim = sidecar["dimension"].get<int>();
    CHECK(bin.size() == static_cast<size_t>(dim) * dim * 16);
}

TEST_CASE("gbz experiment summarizes the curve") {
    auto cfg = small_config(Experiment::gbz);
    cfg.spec.phase_phi = 0.0;
    cfg.steps_per_period = 600;
    const auto files = build_experiment_outputs(cfg);
    const auto summary = Json::parse(file_content(files, "gbz.json"));
    CHECK(summary["fitted_radius"].get<double>() < 1.0);
    CHECK(summary["figure"] == "fig1f");
    const auto csv = file_content(files, "gbz.csv");
    CHECK(csv.find("E_re,E_im,beta_re,beta_im,beta_abs") == 0);
}

TEST_CASE("table experiment reports the hopping asymmetry") {
    auto cfg = small_config(Experiment::table1);
    cfg.steps_per_period = 600;
    const auto files = build_experiment_outputs(cfg);
    const auto summary = Json::parse(file_content(files, "table1.json"));
    CHECK(summary["im_ratio_m1_p1"].get<double>() > 5.0);
    CHECK(summary["hoppings"].size() == 10);
}

TEST_CASE("entropy experiment pairs each curve with the symmetric reference") {
    const auto files = build_experiment_outputs(small_config(Experiment::entropy_curve));
    const auto csv = file_content(files, "entropy_phi0.csv");
    CHECK(csv.find("k,s2,s2_sym,s_norm,survival_p2") == 0);
    const auto summary = Json::parse(file_content(files, "entropy.json"));
    CHECK(summary["reference_phi"].get<double>() == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("run writes the manifest and the files it lists") {
    auto cfg = small_config(Experiment::single_walk);
    const fs::path dir = fs::temp_directory_path() / "nhqw_run_test";
    fs::remove_all(dir);
    cfg.out_dir = dir;
    const auto manifest = run(cfg);
    for (const auto& [name, checksum] : manifest.checksums) {
        std::ifstream in(dir / name, std::ios::binary);
        REQUIRE(in.good());
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(checksum_hex(content) == checksum);
    }
    // rerun reproduces identical bytes (manifest timestamps excluded)
    const auto manifest2 = run(cfg);
    CHECK(manifest.run_id == manifest2.run_id);
    fs::remove_all(dir);
}

TEST_CASE("svg renderings") {
    CsvTable t;
    t.header = {"x", "y"};
    for (int i = 0; i <= 10; ++i)
        t.rows.push_back({std::to_string(i), std::to_string(i * i)});
    const std::string svg = render_line_svg(t);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("polyline") != std::string::npos);

    RealMatrix m(2, 3);
    m << 0.0, 0.5, 1.0, 0.25, 0.75, 0.125;
    const std::string heat = render_heatmap_svg(m);
    CHECK(heat.find("<svg") == 0);
    CHECK(heat.find("rect") != std::string::npos);

    const CsvTable parsed = parse_csv("a,b\n1,2\n");
    CHECK(parsed.header == std::vector<std::string>{"a", "b"});
    REQUIRE(parsed.rows.size() == 1);
}
