#include "nhqw/experiments.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "nhqw/entropy.hpp"
#include "nhqw/pair.hpp"
#include "nhqw/version.hpp"

namespace nhqw {

namespace {

Json base_summary(const RunConfig& cfg, const char* figure_tag) {
    Json j;
    j["experiment"] = experiment_name(cfg.experiment);
    j["figure"] = figure_tag;
    j["version"] = kVersion;
    j["geometry"] = geometry_note();
    Json spec;
    spec["n_straight"] = cfg.spec.n_straight;
    spec["boundary"] = boundary_name(cfg.spec.boundary);
    spec["spacing_a"] = cfg.spec.spacing_a;
    spec["radius_R"] = cfg.spec.radius_r;
    spec["period_T"] = cfg.spec.period_t;
    spec["phase_phi"] = cfg.spec.phase_phi;
    spec["coupling_A"] = cfg.spec.coupling_a;
    spec["coupling_b"] = cfg.spec.coupling_b;
    spec["onsite_beta0"] = cfg.spec.onsite_beta0;
    j["lattice"] = std::move(spec);
    j["lattice_checksum"] = checksum_hex(lattice_to_config_text(cfg.spec));
    j["steps_per_period"] = cfg.steps_per_period;
    return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string phi_tag(size_t index) { return "phi" + std::to_string(index); }

LatticeSpec with_phi(const LatticeSpec& spec, double phi) {
    LatticeSpec s = spec;
    s.phase_phi = phi;
    return s;
}

LatticeSpec with_ring(const LatticeSpec& spec) {
    LatticeSpec s = spec;
    s.boundary = Boundary::ring;
    return s;
}

// ---- single-photon walk -------------------------------------------------

std::vector<OutputFile> single_walk_outputs(const RunConfig& cfg) {
    std::vector<OutputFile> files;
    Json summary = base_summary(cfg, "fig2");
    summary["injection_site"] = cfg.injection;
    Json per_phi = Json::array();
    const int n0 = cfg.injection - 1;
    for (size_t pi_idx = 0; pi_idx < cfg.phi_list.size(); ++pi_idx) {
        const double phi = cfg.phi_list[pi_idx];
        const auto u = transmission_matrix(with_phi(cfg.spec, phi), cfg.steps_per_period);
        CsvTable t;
        t.header = {"site"};
        std::vector<IntensityDistribution> dists;
        for (int k : cfg.periods) {
            t.header.push_back("raw_k" + std::to_string(k));
            t.header.push_back("normalized_k" + std::to_string(k));
            Vector psi = Vector::Zero(cfg.spec.n_straight);
            psi[n0] = 1.0;
            dists.push_back(intensity_of(evolve_n_periods(u, psi, k)));
        }
        for (int s = 0; s < cfg.spec.n_straight; ++s) {
            std::vector<std::string> row{std::to_string(s + 1)};
            for (const auto& d : dists) {
                row.push_back(format_double(d.raw[s]));
                row.push_back(format_double(d.normalized[s]));
            }
            t.rows.push_back(std::move(row));
        }
        Json jp;
        jp["phi"] = phi;
        Json centers = Json::array();
        for (size_t i = 0; i < dists.size(); ++i) {
            const double c = packet_center(dists[i].normalized);
            centers.push_back(Json{{"k", cfg.periods[i]},
                                   {"packet_center", c + 1.0},  // 1-based for I/O
                                   {"shift", c - n0},
                                   {"survival", dists[i].raw.sum()}});
        }
        jp["packet_centers"] = std::move(centers);
        if (cfg.format == "json") {
            Json dist = Json::array();
            for (size_t i = 0; i < dists.size(); ++i)
                dist.push_back(Json{{"k", cfg.periods[i]},
                                    {"raw", std::vector<double>(dists[i].raw.data(),
                                                                dists[i].raw.data() + dists[i].raw.size())},
                                    {"normalized",
                                     std::vector<double>(dists[i].normalized.data(),
                                                         dists[i].normalized.data() +
                                                             dists[i].normalized.size())}});
            jp["distributions"] = std::move(dist);
        } else {
            files.push_back({"single_walk_" + phi_tag(pi_idx) + ".csv", t.to_string()});
        }
        per_phi.push_back(std::move(jp));
    }
    summary["results"] = std::move(per_phi);
    files.push_back({"single_walk.json", dump_json(summary)});
    return files;
}

// ---- two-photon walk ----------------------------------------------------

std::vector<OutputFile> pair_walk_outputs(const RunConfig& cfg) {
    std::vector<OutputFile> files;
    Json summary = base_summary(cfg, "fig3");
    summary["injection_pair"] = Json::array({cfg.injection_pair.first, cfg.injection_pair.second});
    const int n0 = cfg.injection_pair.first - 1;
    const int m0 = cfg.injection_pair.second - 1;
    Json per_phi = Json::array();
    for (size_t pi_idx = 0; pi_idx < cfg.phi_list.size(); ++pi_idx) {
        const double phi = cfg.phi_list[pi_idx];
        const LatticeSpec spec = with_phi(cfg.spec, phi);
        PairEvolverOptions opt;
        opt.steps_per_period = cfg.steps_per_period;
        PairEvolver evolver(spec, opt);
        const auto u = transmission_matrix(spec, cfg.steps_per_period);
        Matrix rho = evolver.initial_pair(n0, m0);
        Json jp;
        jp["phi"] = phi;
        Json per_k = Json::array();
        int done = 0;
        for (int k : cfg.periods) {
            for (; done < k; ++done) rho = evolver.step(rho);
            const auto cm = correlation_matrix(rho, evolver.basis(), spec);
            const auto cm_u = pair_correlation_via_u(power(u, k), n0, m0);
            const double supdiff =
                (cm.gamma_normalized - cm_u.gamma_normalized).cwiseAbs().maxCoeff();
            Json jk;
            jk["k"] = k;
            jk["survival_p2"] = cm.survival_p2;
            jk["sup_diff_vs_transmission_path"] = supdiff;
            if (cfg.format == "json") {
                jk["gamma_raw"] = json_of_real_matrix(cm.gamma_raw);
                jk["gamma_normalized"] = json_of_real_matrix(cm.gamma_normalized);
            } else {
                files.push_back({"pair_walk_" + phi_tag(pi_idx) + "_k" + std::to_string(k) + ".csv",
                                 csv_of_real_matrix(cm.gamma_normalized, "gamma_norm")});
            }
            if (cfg.dump_density) {
                const std::string stem =
                    "pair_walk_" + phi_tag(pi_idx) + "_k" + std::to_string(k) + "_rho";
                files.push_back({stem + ".bin", density_matrix_bytes(rho)});
                Json sidecar;
                sidecar["format"] = "little-endian float64, interleaved re/im, row-major";
                sidecar["dimension"] = evolver.basis().dim;
                sidecar["total_sites"] = evolver.basis().total_sites;
                sidecar["layout"] =
                    "first M^2 indices: ordered two-photon pairs (n,m); next M: one-photon; last: vacuum";
                files.push_back({stem + ".json", dump_json(sidecar)});
            }
            per_k.push_back(std::move(jk));
        }
        jp["periods"] = std::move(per_k);
        per_phi.push_back(std::move(jp));
    }
    summary["results"] = std::move(per_phi);
    files.push_back({"pair_walk.json", dump_json(summary)});
    return files;
}

// ---- Lyapunov sweep -----------------------------------------------------

std::vector<OutputFile> lyapunov_outputs(const RunConfig& cfg) {
    std::vector<OutputFile> files;
    Json summary = base_summary(cfg, "fig1c");
    LatticeSpec spec = cfg.spec;
    spec.boundary = Boundary::open;
    spec.n_straight = cfg.lyapunov_sites;
    const int m = spec.n_straight / 2;
    summary["excitation_site"] = m + 1;
    summary["window"] = Json::array({cfg.lyapunov_k1, cfg.lyapunov_k2});
    CsvTable t;
    t.header = {"phi", "lambda_per_um", "lambda_per_period", "boundary_ratio"};
    Json rows = Json::array();
    for (double phi : cfg.phi_list) {
        const auto r = lyapunov_exponent(with_phi(spec, phi), m, cfg.lyapunov_k1, cfg.lyapunov_k2,
                                         cfg.steps_per_period, /*allow_boundary_contact=*/true);
        t.rows.push_back({format_double(phi), format_double(r.per_um),
                          format_double(r.per_period), format_double(r.boundary_ratio)});
        rows.push_back(Json{{"phi", phi},
                            {"lambda_per_um", r.per_um},
                            {"lambda_per_period", r.per_period},
                            {"boundary_ratio", r.boundary_ratio},
                            {"boundary_contaminated", r.boundary_contaminated}});
    }
    summary["results"] = std::move(rows);
    if (cfg.format == "csv") files.push_back({"lyapunov.csv", t.to_string()});
    files.push_back({"lyapunov.json", dump_json(summary)});
    return files;
}

// ---- spectra / GBZ / hopping table ---------------------------------------

CsvTable complex_list_csv(const std::vector<Complex>& values, const char* label) {
    CsvTable t;
    t.header = {std::string(label) + "_re", std::string(label) + "_im"};
    for (const auto& v : values)
        t.rows.push_back({format_double(v.real()), format_double(v.imag())});
    return t;
}

std::vector<OutputFile> spectra_outputs(const RunConfig& cfg) {
    std::vector<OutputFile> files;
    Json summary = base_summary(cfg, "fig1bd");
    const auto hops = bulk_hoppings(with_ring(cfg.spec), cfg.gbz_ring, kDefaultMinOrder,
                                    kDefaultMaxOrder, cfg.steps_per_period);
    const auto pbc = pbc_spectrum(hops, 201);
    const auto obc = obc_spectrum(cfg.spec, cfg.obc_sites, cfg.steps_per_period);
    // the period map and its generator on the configured lattice
    const auto u = transmission_matrix(cfg.spec, cfg.steps_per_period);
    const auto heff = effective_hamiltonian(u);
    summary["pbc_samples"] = pbc.lattice_size;
    summary["obc_sites"] = obc.lattice_size;
    summary["hopping_ring"] = hops.source_ring_size;
    summary["circulant_residual"] = hops.circulant_residual;
    summary["pbc_loop_area"] = loop_signed_area(pbc.eigenvalues);
    summary["log_branch"] = heff.branch_note;
    if (cfg.format == "csv") {
        files.push_back({"spectrum_pbc.csv", complex_list_csv(pbc.eigenvalues, "E").to_string()});
        files.push_back({"spectrum_obc.csv", complex_list_csv(obc.eigenvalues, "E").to_string()});
        files.push_back({"transmission_matrix.csv", csv_of_complex_matrix(u.entries, "U")});
        files.push_back({"effective_hamiltonian.csv", csv_of_complex_matrix(heff.entries, "H")});
    } else {
        summary["transmission_matrix"] = json_of_complex_matrix(u.entries);
        summary["effective_hamiltonian"] = json_of_complex_matrix(heff.entries);
        Json jp = Json::array(), jo = Json::array();
        for (const auto& e : pbc.eigenvalues) jp.push_back(Json::array({e.real(), e.imag()}));
        for (const auto& e : obc.eigenvalues) jo.push_back(Json::array({e.real(), e.imag()}));
        summary["pbc"] = std::move(jp);
        summary["obc"] = std::move(jo);
    }
    files.push_back({"spectra.json", dump_json(summary)});
    return files;
}

std::vector<OutputFile> gbz_outputs(const RunConfig& cfg) {
    std::vector<OutputFile> files;
    Json summary = base_summary(cfg, "fig1f");
    const auto hops = bulk_hoppings(with_ring(cfg.spec), cfg.gbz_ring, kDefaultMinOrder,
                                    kDefaultMaxOrder, cfg.steps_per_period);
    const auto obc = obc_spectrum(cfg.spec, cfg.obc_sites, cfg.steps_per_period);
    const auto curve = gbz(hops, obc.eigenvalues, cfg.gbz_pair_tol);
    summary["hopping_ring"] = hops.source_ring_size;
    summary["hopping_orders"] = Json::array({hops.min_order, hops.max_order});
    summary["obc_sites"] = obc.lattice_size;
    summary["pair_tolerance"] = curve.pair_tolerance;
    summary["fitted_radius"] = curve.fitted_radius;
    summary["circle_residual"] = curve.circle_residual;
    summary["skipped_energies"] = curve.skipped;
    if (curve.circle_residual < kCircularityThreshold * curve.fitted_radius) {
        const double g = skin_depth(curve);
        summary["skin_depth_g"] = g;
        // how close the rotated, skin-removed generator is to Hermitian
        const auto heff = effective_hamiltonian(transmission_matrix(cfg.spec, cfg.steps_per_period));
        const auto [ht, resid] = hermitianize(similarity_transform(heff.entries, g));
        (void)ht;
        summary["hermitianized_residual"] = resid;
    } else {
        summary["skin_depth_g"] = Json();
    }
    CsvTable t;
    t.header = {"E_re", "E_im", "beta_re", "beta_im", "beta_abs"};
    for (const auto& s : curve.samples)
        t.rows.push_back({format_double(s.energy.real()), format_double(s.energy.imag()),
                          format_double(s.beta.real()), format_double(s.beta.imag()),
                          format_double(std::abs(s.beta))});
    if (cfg.format == "csv") files.push_back({"gbz.csv", t.to_string()});
    files.push_back({"gbz.json", dump_json(summary)});
    return files;
}

std::vector<OutputFile> table1_outputs(const RunConfig& cfg) {
    std::vector<OutputFile> files;
    Json summary = base_summary(cfg, "table1");
    const auto hops = bulk_hoppings(with_ring(cfg.spec), cfg.table_ring, kDefaultMinOrder,
                                    kDefaultMaxOrder, cfg.steps_per_period);
    CsvTable t;
    t.header = {"order", "kappa_re", "kappa_im", "kappa_abs"};
    Json rows = Json::array();
    for (int o = hops.min_order; o <= hops.max_order; ++o) {
        const Complex k = hops.at(o);
        t.rows.push_back({std::to_string(o), format_double(k.real()), format_double(k.imag()),
                          format_double(std::abs(k))});
        rows.push_back(Json{{"order", o}, {"re", k.real()}, {"im", k.imag()}});
    }
    summary["ring_sites"] = hops.source_ring_size;
    summary["circulant_residual"] = hops.circulant_residual;
    summary["im_ratio_m1_p1"] = std::abs(hops.at(-1).imag()) / std::abs(hops.at(1).imag());
    summary["hoppings"] = std::move(rows);
    if (cfg.format == "csv") files.push_back({"table1.csv", t.to_string()});
    files.push_back({"table1.json", dump_json(summary)});
    return files;
}

// ---- entropy curves -------------------------------------------------------

std::vector<OutputFile> entropy_outputs(const RunConfig& cfg) {
    std::vector<OutputFile> files;
    Json summary = base_summary(cfg, "fig1e_fig3mn");
    const int n0 = cfg.injection_pair.first - 1;
    const int m0 = cfg.injection_pair.second - 1;
    const int kmax = cfg.entropy_periods;
    // symmetric reference is the largest phi in the list (by |lambda| ordering
    // the list is expected to end at pi/2)
    std::vector<std::vector<double>> s2(cfg.phi_list.size());
    std::vector<std::vector<double>> p2(cfg.phi_list.size());
    for (size_t pi_idx = 0; pi_idx < cfg.phi_list.size(); ++pi_idx) {
        const LatticeSpec spec = with_phi(cfg.spec, cfg.phi_list[pi_idx]);
        PairEvolverOptions opt;
        opt.steps_per_period = cfg.steps_per_period;
        PairEvolver evolver(spec, opt);
        Matrix rho = evolver.initial_pair(n0, m0);
        for (int k = 1; k <= kmax; ++k) {
            rho = evolver.step(rho);
            const auto cm = correlation_matrix(rho, evolver.basis(), spec);
            s2[pi_idx].push_back(renyi2_diagonal(cm).s2);
            p2[pi_idx].push_back(cm.survival_p2);
        }
    }
    size_t ref = 0;
    for (size_t i = 1; i < cfg.phi_list.size(); ++i)
        if (cfg.phi_list[i] > cfg.phi_list[ref]) ref = i;
    summary["reference_phi"] = cfg.phi_list[ref];
    summary["injection_pair"] = Json::array({cfg.injection_pair.first, cfg.injection_pair.second});
    Json per_phi = Json::array();
    for (size_t pi_idx = 0; pi_idx < cfg.phi_list.size(); ++pi_idx) {
        CsvTable t;
        t.header = {"k", "s2", "s2_sym", "s_norm", "survival_p2"};
        Json rows = Json::array();
        for (int k = 1; k <= kmax; ++k) {
            const double s = s2[pi_idx][k - 1];
            const double ssym = s2[ref][k - 1];
            t.rows.push_back({std::to_string(k), format_double(s), format_double(ssym),
                              format_double(normalized_entropy(s, ssym)),
                              format_double(p2[pi_idx][k - 1])});
            rows.push_back(Json{{"k", k},
                                {"s2", s},
                                {"s2_sym", ssym},
                                {"s_norm", normalized_entropy(s, ssym)},
                                {"survival_p2", p2[pi_idx][k - 1]}});
        }
        if (cfg.format == "csv")
            files.push_back({"entropy_" + phi_tag(pi_idx) + ".csv", t.to_string()});
        per_phi.push_back(Json{{"phi", cfg.phi_list[pi_idx]}, {"curve", std::move(rows)}});
    }
    summary["results"] = std::move(per_phi);
    files.push_back({"entropy.json", dump_json(summary)});
    return files;
}

}  // namespace

std::vector<OutputFile> build_experiment_outputs(const RunConfig& cfg) {
    cfg.validate();
    switch (cfg.experiment) {
        case Experiment::single_walk: return single_walk_outputs(cfg);
        case Experiment::pair_walk: return pair_walk_outputs(cfg);
        case Experiment::lyapunov_sweep: return lyapunov_outputs(cfg);
        case Experiment::spectra: return spectra_outputs(cfg);
        case Experiment::gbz: return gbz_outputs(cfg);
        case Experiment::table1: return table1_outputs(cfg);
        case Experiment::entropy_curve: return entropy_outputs(cfg);
    }
    throw ConfigError("unknown experiment");
}

RunManifest run(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const std::string stage = experiment_name(cfg.experiment);
    std::vector<OutputFile> files;
    try {
        files = build_experiment_outputs(cfg);
    } catch (const ConfigError& e) {
        throw ConfigError(stage + " failed: " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(stage + " failed: " + e.what());
    } catch (const std::exception& e) {
        throw NumericalError(stage + " failed: " + e.what());
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return write_run_outputs(cfg.out_dir, run_config_to_text(cfg), std::move(files), wall);
}

// ---- SVG rendering --------------------------------------------------------

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

namespace {

std::string svg_header(int w, int h) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return s.str();
}

}  // namespace

std::string render_line_svg(const CsvTable& table) {
    const int w = 640, h = 420, margin = 50;
    if (table.header.size() < 2 || table.rows.empty())
        throw DomainError("need at least two columns and one row to plot");
    const size_t ncols = table.header.size();
    std::vector<std::vector<double>> cols(ncols);
    for (const auto& row : table.rows) {
        if (row.size() != ncols) throw DomainError("ragged CSV rows");
        for (size_t c = 0; c < ncols; ++c) {
            try {
                cols[c].push_back(std::stod(row[c]));
            } catch (const std::exception&) {
                cols[c].push_back(static_cast<double>(cols[c].size()));
            }
        }
    }
    auto minmax = [](const std::vector<double>& v) {
        double lo = v[0], hi = v[0];
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (hi == lo) hi = lo + 1.0;
        return std::pair{lo, hi};
    };
    const auto [x_lo, x_hi] = minmax(cols[0]);
    double y_lo = cols[1][0], y_hi = cols[1][0];
    for (size_t c = 1; c < ncols; ++c) {
        const auto [lo, hi] = minmax(cols[c]);
        y_lo = std::min(y_lo, lo);
        y_hi = std::max(y_hi, hi);
    }
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream s;
    s << svg_header(w, h);
    s << "<rect x=\"" << margin << "\" y=\"" << margin / 2 << "\" width=\"" << w - 2 * margin
      << "\" height=\"" << h - 2 * margin << "\" fill=\"none\" stroke=\"#444\"/>\n";
    auto px = [&](double x) {
        return margin + (x - x_lo) / (x_hi - x_lo) * (w - 2 * margin);
    };
    auto py = [&](double y) {
        return (h - 1.5 * margin) - (y - y_lo) / (y_hi - y_lo) * (h - 2 * margin);
    };
    for (size_t c = 1; c < ncols; ++c) {
        s << "<polyline fill=\"none\" stroke=\"" << palette[(c - 1) % 6]
          << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < cols[0].size(); ++i)
            s << px(cols[0][i]) << "," << py(cols[c][i]) << " ";
        s << "\"/>\n";
        s << "<text x=\"" << margin + 8 << "\" y=\"" << margin / 2 + 16 * c << "\" fill=\""
          << palette[(c - 1) % 6] << "\" font-size=\"12\">" << table.header[c] << "</text>\n";
    }
    s << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << table.header[0] << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string render_heatmap_svg(const RealMatrix& values) {
    const int cell = 36, margin = 40;
    const int rows = static_cast<int>(values.rows());
    const int cols = static_cast<int>(values.cols());
    if (rows < 1 || cols < 1) throw DomainError("empty matrix");
    const double vmax = std::max(values.maxCoeff(), 1e-300);
    const int w = margin * 2 + cell * cols;
    const int h = margin * 2 + cell * rows;
    std::ostringstream s;
    s << svg_header(w, h);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double v = std::max(values(r, c), 0.0) / vmax;
            const int red = static_cast<int>(255 * v);
            const int blue = static_cast<int>(255 * (1.0 - v));
            s << "<rect x=\"" << margin + c * cell << "\" y=\"" << margin + r * cell
              << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << red << ",40,"
              << blue << ")\"/>\n";
        }
    s << "</svg>\n";
    return s.str();
}

}  // namespace nhqw
