// Command-line front end: experiment runs, dataset export, and the
// end-to-end reproduction report. Exit codes: 0 success, 2 configuration
// error, 3 numerical-tolerance failure, 4 reproduction-report failure.
// OMP_NUM_THREADS bounds the worker count of the parallel kernels.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nhqw/acceptance.hpp"
#include "nhqw/entropy.hpp"
#include "nhqw/experiments.hpp"
#include "nhqw/version.hpp"

namespace {

struct CommonArgs {
    std::string config_file;
    std::string out_dir;
    int steps = 0;
    std::string format;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_file, "config file (key = value sections)");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--steps-per-period", args.steps, "integration steps per period");
    cmd->add_option("--format", args.format, "payload format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

nhqw::RunConfig make_config(const CommonArgs& args, nhqw::Experiment experiment) {
    nhqw::RunConfig cfg;
    if (!args.config_file.empty()) cfg = nhqw::load_config(args.config_file);
    cfg.experiment = experiment;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.steps > 0) cfg.steps_per_period = args.steps;
    if (!args.format.empty()) cfg.format = args.format;
    if (cfg.phi_list.empty())
        cfg.phi_list = {0.0, std::numbers::pi / 4, std::numbers::pi / 2};
    return cfg;
}

int run_and_report(const nhqw::RunConfig& cfg) {
    const auto manifest = nhqw::run(cfg);
    std::cout << "run " << manifest.run_id << ": " << manifest.checksums.size() + 1
              << " files under " << cfg.out_dir.string() << " (" << manifest.wall_seconds
              << " s)\n";
    return 0;
}

std::vector<double> parse_phi_option(const std::vector<std::string>& tokens) {
    std::vector<double> out;
    for (const auto& t : tokens) out.push_back(nhqw::parse_angle(t));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet waveguide-lattice quantum-walk simulator"};
    app.set_version_flag("--version", nhqw::kVersion);
    app.require_subcommand(1);

    // simulate single | simulate pair
    auto* simulate = app.add_subcommand("simulate", "propagate photons through the lattice");
    simulate->require_subcommand(1);
    CommonArgs sim_args;
    std::vector<std::string> phi_tokens;
    int injection = 0;
    std::pair<int, int> pair_sites{0, 0};
    std::vector<int> periods;
    bool dump_density = false;

    auto* single = simulate->add_subcommand("single", "single-photon walk distributions");
    add_common(single, sim_args);
    single->add_option("--phi", phi_tokens, "geometric phases (accepts pi fractions)");
    single->add_option("--injection", injection, "injection site, 1-based");
    single->add_option("--periods", periods, "evolution periods to record");

    auto* pair = simulate->add_subcommand("pair", "two-photon walk correlation matrices");
    add_common(pair, sim_args);
    pair->add_option("--phi", phi_tokens, "geometric phases (accepts pi fractions)");
    pair->add_option("--injection-pair", pair_sites, "two injection sites, 1-based");
    pair->add_option("--periods", periods, "evolution periods to record");
    pair->add_flag("--dump-density", dump_density, "write extended density matrices");

    // analyze spectra | gbz | table1
    auto* analyze = app.add_subcommand("analyze", "spectral and non-Bloch analysis");
    analyze->require_subcommand(1);
    CommonArgs an_args;
    std::string an_phi_token;
    int gbz_ring = 0, obc_sites = 0, table_ring = 0;
    auto* spectra = analyze->add_subcommand("spectra", "PBC and OBC spectra");
    auto* gbz_cmd = analyze->add_subcommand("gbz", "generalized Brillouin zone");
    auto* table_cmd = analyze->add_subcommand("table1", "bulk hopping table on a ring");
    for (CLI::App* cmd : {spectra, gbz_cmd, table_cmd}) {
        add_common(cmd, an_args);
        cmd->add_option("--phi", an_phi_token, "geometric phase (accepts pi fractions)");
    }
    spectra->add_option("--obc-sites", obc_sites, "open-lattice size");
    gbz_cmd->add_option("--obc-sites", obc_sites, "open-lattice size for the energy set");
    gbz_cmd->add_option("--ring", gbz_ring, "ring size for hopping extraction");
    table_cmd->add_option("--ring", table_ring, "ring size for the table");

    // entropy
    CommonArgs ent_args;
    std::vector<std::string> ent_phi_tokens;
    int ent_periods = 0;
    std::pair<int, int> ent_pair{0, 0};
    auto* entropy_cmd = app.add_subcommand("entropy", "Renyi-entropy evolution curves");
    add_common(entropy_cmd, ent_args);
    entropy_cmd->add_option("--phi", ent_phi_tokens, "phases; the largest is the reference");
    entropy_cmd->add_option("--periods", ent_periods, "curve length in periods");
    entropy_cmd->add_option("--injection-pair", ent_pair, "two injection sites, 1-based");

    // sweep phi
    auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
    sweep->require_subcommand(1);
    CommonArgs sw_args;
    std::vector<std::string> sw_phi_tokens;
    int sw_sites = 0, sw_k1 = 0, sw_k2 = 0;
    auto* sweep_phi = sweep->add_subcommand("phi", "Lyapunov exponent vs geometric phase");
    add_common(sweep_phi, sw_args);
    sweep_phi->add_option("--phi", sw_phi_tokens, "phases to sweep");
    sweep_phi->add_option("--sites", sw_sites, "open-lattice size");
    sweep_phi->add_option("--k1", sw_k1, "window start, periods");
    sweep_phi->add_option("--k2", sw_k2, "window end, periods");

    // reproduce-all
    CommonArgs rep_args;
    int inject_failure = 0;
    std::vector<int> only_criteria;
    auto* reproduce = app.add_subcommand("reproduce-all", "run every reproduction criterion");
    add_common(reproduce, rep_args);
    reproduce->add_option("--only", only_criteria, "run only the listed criterion ids");
    reproduce->add_option("--inject-failure", inject_failure,
                          "force the given criterion to fail (harness testing)")
        ->group("");  // hidden

    // render
    std::string render_type = "line", render_in, render_out;
    auto* render = app.add_subcommand("render", "render an exported CSV as SVG");
    render->add_option("--type", render_type, "line or heatmap")
        ->check(CLI::IsMember({"line", "heatmap"}));
    render->add_option("input", render_in, "CSV file")->required();
    render->add_option("output", render_out, "SVG file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (single->parsed() || pair->parsed()) {
            auto cfg = make_config(sim_args, single->parsed() ? nhqw::Experiment::single_walk
                                                              : nhqw::Experiment::pair_walk);
            if (!phi_tokens.empty()) cfg.phi_list = parse_phi_option(phi_tokens);
            if (injection > 0) cfg.injection = injection;
            if (pair_sites.first > 0) cfg.injection_pair = pair_sites;
            if (!periods.empty()) cfg.periods = periods;
            cfg.dump_density = dump_density;
            return run_and_report(cfg);
        }
        if (spectra->parsed() || gbz_cmd->parsed() || table_cmd->parsed()) {
            nhqw::Experiment e = nhqw::Experiment::spectra;
            if (gbz_cmd->parsed()) e = nhqw::Experiment::gbz;
            if (table_cmd->parsed()) e = nhqw::Experiment::table1;
            auto cfg = make_config(an_args, e);
            if (!an_phi_token.empty()) cfg.spec.phase_phi = nhqw::parse_angle(an_phi_token);
            if (obc_sites > 0) cfg.obc_sites = obc_sites;
            if (gbz_ring > 0) cfg.gbz_ring = gbz_ring;
            if (table_ring > 0) cfg.table_ring = table_ring;
            return run_and_report(cfg);
        }
        if (entropy_cmd->parsed()) {
            auto cfg = make_config(ent_args, nhqw::Experiment::entropy_curve);
            if (!ent_phi_tokens.empty()) cfg.phi_list = parse_phi_option(ent_phi_tokens);
            if (ent_periods > 0) cfg.entropy_periods = ent_periods;
            if (ent_pair.first > 0) cfg.injection_pair = ent_pair;
            return run_and_report(cfg);
        }
        if (sweep_phi->parsed()) {
            auto cfg = make_config(sw_args, nhqw::Experiment::lyapunov_sweep);
            if (!sw_phi_tokens.empty()) cfg.phi_list = parse_phi_option(sw_phi_tokens);
            else {
                cfg.phi_list.clear();
                for (int i = 0; i <= 8; ++i)
                    cfg.phi_list.push_back(i * std::numbers::pi / 16.0);
            }
            if (sw_sites > 0) cfg.lyapunov_sites = sw_sites;
            if (sw_k1 > 0) cfg.lyapunov_k1 = sw_k1;
            if (sw_k2 > 0) cfg.lyapunov_k2 = sw_k2;
            return run_and_report(cfg);
        }
        if (reproduce->parsed()) {
            nhqw::acceptance::Options opts;
            if (rep_args.steps > 0) opts.steps_per_period = rep_args.steps;
            opts.only = only_criteria;
            opts.inject_failure_id = inject_failure;
            opts.on_result = [](const nhqw::acceptance::CriterionResult& r) {
                std::cout << "criterion " << r.id << ": "
                          << (r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL")) << " - "
                          << r.name << "\n"
                          << std::flush;
            };
            const auto results = nhqw::acceptance::run_all(opts);
            std::ostringstream report;
            const bool ok = nhqw::acceptance::print_report(results, report);
            std::cout << "\n" << report.str();
            const std::string out_dir = rep_args.out_dir.empty() ? "out" : rep_args.out_dir;
            std::ostringstream echo;
            echo << "reproduce-all steps_per_period=" << opts.steps_per_period;
            for (int id : opts.only) echo << " only=" << id;
            nhqw::write_run_outputs(out_dir, echo.str(),
                                    {{"reproduction_report.txt", report.str()}}, 0.0);
            std::cout << (ok ? "all criteria passed\n" : "criteria failed\n");
            return ok ? 0 : 4;
        }
        if (render->parsed()) {
            std::ifstream in(render_in);
            if (!in) throw nhqw::ConfigError("cannot open " + render_in);
            std::ostringstream buf;
            buf << in.rdbuf();
            const auto table = nhqw::parse_csv(buf.str());
            std::string svg;
            if (render_type == "heatmap") {
                // numeric cells only; first column and header row are labels
                const int rows = static_cast<int>(table.rows.size());
                const int cols = rows > 0 ? static_cast<int>(table.rows[0].size()) - 1 : 0;
                nhqw::RealMatrix m(rows, cols);
                for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c) m(r, c) = std::stod(table.rows[r][c + 1]);
                svg = nhqw::render_heatmap_svg(m);
            } else {
                svg = nhqw::render_line_svg(table);
            }
            std::ofstream out(render_out, std::ios::binary);
            if (!out) throw nhqw::ConfigError("cannot write " + render_out);
            out << svg;
            return 0;
        }
    } catch (const nhqw::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nhqw::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const nhqw::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
