#include "nhqw/acceptance.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "nhqw/entropy.hpp"
#include "nhqw/experiments.hpp"
#include "nhqw/pair.hpp"

namespace nhqw::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;

LatticeSpec reference_spec(double phi, int n, Boundary boundary = Boundary::open) {
    LatticeSpec s;
    s.n_straight = n;
    s.boundary = boundary;
    s.phase_phi = phi;
    return s;
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream s;
    s.precision(prec);
    s << v;
    return s.str();
}

CriterionResult lyapunov_monotonicity(const Options& opt) {
    CriterionResult r{1, "Lyapunov exponent monotonic in phi", false, false, ""};
    const std::vector<double> phis{0.0, kPi / 8, kPi / 4, 3 * kPi / 8, kPi / 2};
    std::vector<double> lam;
    for (double phi : phis) {
        const LatticeSpec spec = reference_spec(phi, 30);
        lam.push_back(lyapunov_exponent(spec, 15, 20, 40, opt.steps_per_period,
                                        /*allow_boundary_contact=*/true)
                          .per_period);
    }
    // the spec window touches the boundary for small phi; verify the estimate
    // is insensitive by repeating the worst case on a wider lattice
    const double lam_wide = lyapunov_exponent(reference_spec(0.0, 80), 40, 20, 40,
                                              opt.steps_per_period, true)
                                .per_period;
    const double wide_dev = std::abs(lam_wide - lam[0]) / std::abs(lam_wide);
    bool increasing = true;
    for (size_t i = 1; i < lam.size(); ++i) increasing = increasing && lam[i] > lam[i - 1];
    const double ratio = std::abs(lam.back()) / std::abs(lam.front());
    r.pass = increasing && lam.back() < 0.0 && ratio < opt.lyapunov_ratio_cap && wide_dev < 0.05;
    std::ostringstream d;
    d << "lambda/period = {";
    for (size_t i = 0; i < lam.size(); ++i) d << (i ? ", " : "") << fmt(lam[i], 4);
    d << "}, |lambda(pi/2)|/|lambda(0)| = " << fmt(ratio, 4) << " (cap "
      << opt.lyapunov_ratio_cap << "), wide-lattice deviation " << fmt(wide_dev, 2);
    r.details = d.str();
    return r;
}

CriterionResult skin_drift(const Options& opt) {
    CriterionResult r{2, "Skin-effect packet drift at 6 periods", false, false, ""};
    auto shift_at = [&](double phi) {
        const auto u = transmission_matrix(reference_spec(phi, 9), opt.steps_per_period);
        Vector psi = Vector::Zero(9);
        psi[5] = 1.0;  // site 6, 1-based
        psi = evolve_n_periods(u, psi, 6);
        const auto d = intensity_of(psi);
        int peak = 0;
        for (int i = 1; i < 9; ++i)
            if (d.normalized[i] > d.normalized[peak]) peak = i;
        return std::pair{std::abs(packet_center(d.normalized) - 5.0), std::abs(peak - 5)};
    };
    const auto [shift_asym, peak_asym] = shift_at(0.0);
    const auto [shift_sym, peak_sym] = shift_at(kPi / 2);
    r.pass = shift_asym >= opt.drift_min_shift && shift_sym <= opt.drift_max_sym_shift;
    std::ostringstream d;
    d << "mean shift(phi=0) = " << fmt(shift_asym, 4) << " (need >= " << opt.drift_min_shift
      << "; distribution peak moved " << peak_asym << " sites), shift(phi=pi/2) = "
      << fmt(shift_sym, 4) << " (cap " << opt.drift_max_sym_shift << ")";
    r.details = d.str();
    return r;
}

CriterionResult hopping_table(const Options& opt) {
    CriterionResult r{3, "Ring hopping table structure", false, false, ""};
    const auto hops = bulk_hoppings(reference_spec(0.0, 10, Boundary::ring), 10, kDefaultMinOrder,
                                    kDefaultMaxOrder, opt.steps_per_period);
    double max_re = 0.0, max_im = 0.0;
    for (int o = hops.min_order; o <= hops.max_order; ++o) {
        max_re = std::max(max_re, std::abs(hops.at(o).real()));
        max_im = std::max(max_im, std::abs(hops.at(o).imag()));
    }
    const double ratio = std::abs(hops.at(-1).imag()) / std::abs(hops.at(1).imag());
    double max_other = 0.0;
    for (int o = hops.min_order; o <= hops.max_order; ++o)
        if (o != -1 && o != 0) max_other = std::max(max_other, std::abs(hops.at(o).imag()));
    const double dominance =
        std::min(std::abs(hops.at(-1).imag()), std::abs(hops.at(0).imag())) / max_other;
    r.pass = max_re <= opt.table_real_part_cap * max_im && ratio >= opt.table_ratio_lo &&
             ratio <= opt.table_ratio_hi && dominance >= opt.table_dominance;
    std::ostringstream d;
    d << "max|Re|/max|Im| = " << fmt(max_re / max_im, 3) << " (cap " << opt.table_real_part_cap
      << "), |Im k(-1)|/|Im k(+1)| = " << fmt(ratio, 4) << " (band [" << opt.table_ratio_lo << ", "
      << opt.table_ratio_hi << "]), orders {-1,0} dominate others by " << fmt(dominance, 3)
      << "x (need >= " << opt.table_dominance << ")";
    r.details = d.str();
    return r;
}

CriterionResult gbz_circle(const Options& opt) {
    CriterionResult r{4, "Generalized Brillouin zone radii", false, false, ""};
    auto curve_at = [&](double phi) {
        const auto hops = bulk_hoppings(reference_spec(phi, kDefaultGbzRing, Boundary::ring),
                                        kDefaultGbzRing, kDefaultMinOrder, kDefaultMaxOrder,
                                        opt.steps_per_period);
        const auto obc = obc_spectrum(reference_spec(phi, 30), 30, opt.steps_per_period);
        return gbz(hops, obc.eigenvalues);
    };
    const auto asym = curve_at(0.0);
    const auto sym = curve_at(kPi / 2);
    const double asym_resid_rel = asym.circle_residual / asym.fitted_radius;
    const double sym_dev = std::abs(sym.fitted_radius - 1.0);
    r.pass = asym.fitted_radius < 1.0 && asym_resid_rel < opt.gbz_residual_cap &&
             sym_dev <= opt.gbz_sym_radius_tol;
    std::ostringstream d;
    d << "phi=0: radius = " << fmt(asym.fitted_radius, 5) << " (< 1), residual "
      << fmt(100 * asym_resid_rel, 3) << "% (cap " << 100 * opt.gbz_residual_cap
      << "%), skipped " << asym.skipped << "/" << asym.total_energies
      << "; phi=pi/2: radius = " << fmt(sym.fitted_radius, 6) << " (|radius-1| = "
      << fmt(sym_dev, 3) << ", tol " << opt.gbz_sym_radius_tol << ")";
    r.details = d.str();
    return r;
}

CriterionResult correlation_agreement(const Options& opt) {
    CriterionResult r{5, "Master equation vs transmission-matrix correlations", false, false, ""};
    double worst = 0.0;
    for (double phi : {0.0, kPi / 2}) {
        const LatticeSpec spec = reference_spec(phi, 9);
        PairEvolverOptions popts;
        popts.steps_per_period = opt.steps_per_period;
        PairEvolver evolver(spec, popts);
        const auto u = transmission_matrix(spec, opt.steps_per_period);
        Matrix rho = evolver.initial_pair(4, 5);  // sites (5,6), 1-based
        for (int k = 1; k <= 6; ++k) {
            rho = evolver.step(rho);
            if (k < 3) continue;
            const auto me = correlation_matrix(rho, evolver.basis(), spec);
            const auto via_u = pair_correlation_via_u(power(u, k), 4, 5);
            const double sup =
                (me.gamma_normalized - via_u.gamma_normalized).cwiseAbs().maxCoeff() /
                via_u.gamma_normalized.maxCoeff();
            worst = std::max(worst, sup);
        }
    }
    r.pass = worst <= opt.correlation_supnorm_cap;
    r.details = "worst normalized sup-norm difference = " + fmt(worst, 3) + " (cap " +
                fmt(opt.correlation_supnorm_cap, 3) + ") over k in {3..6}, phi in {0, pi/2}";
    return r;
}

std::vector<double> entropy_curve_me(double phi, int kmax, const Options& opt) {
    const LatticeSpec spec = reference_spec(phi, 9);
    PairEvolverOptions popts;
    popts.steps_per_period = opt.steps_per_period;
    PairEvolver evolver(spec, popts);
    Matrix rho = evolver.initial_pair(4, 5);
    std::vector<double> out;
    for (int k = 1; k <= kmax; ++k) {
        rho = evolver.step(rho);
        out.push_back(renyi2_diagonal(correlation_matrix(rho, evolver.basis(), spec)).s2);
    }
    return out;
}

CriterionResult entropy_suppression(const Options& opt) {
    CriterionResult r{6, "Entropy suppression by the skin effect", false, false, ""};
    const auto s_asym = entropy_curve_me(0.0, 15, opt);
    const auto s_mid = entropy_curve_me(kPi / 4, 15, opt);
    const auto s_sym = entropy_curve_me(kPi / 2, 15, opt);
    bool suppressed = true;
    for (int k = 10; k <= 15; ++k) suppressed = suppressed && s_asym[k - 1] < s_sym[k - 1];
    const bool ordered = s_asym[14] < s_mid[14] && s_mid[14] < s_sym[14];
    const bool ordered10 = s_asym[9] < s_mid[9] && s_mid[9] < s_sym[9];
    r.pass = suppressed && ordered && ordered10;
    std::ostringstream d;
    d << "s2 at k=15: phi=0 " << fmt(s_asym[14], 4) << " < phi=pi/4 " << fmt(s_mid[14], 4)
      << " < phi=pi/2 " << fmt(s_sym[14], 4) << " (" << (ordered ? "ordered" : "NOT ordered")
      << ", same ordering at k=10: " << (ordered10 ? "yes" : "no")
      << "); suppression holds for all k in [10, 15]: " << (suppressed ? "yes" : "no");
    r.details = d.str();
    return r;
}

double entropy_from_u_path(const Matrix& u_matrix, double period_t, int k) {
    TransmissionMatrix u;
    u.entries = u_matrix;
    u.period_t = period_t;
    const auto cm = pair_correlation_via_u(power(u, k), 4, 5);
    return renyi2_diagonal(cm).s2;
}

CriterionResult transform_restoration(const Options& opt) {
    CriterionResult r{7, "Similarity transform restores the entropy", false, false, ""};
    const LatticeSpec asym = reference_spec(0.0, 9);
    const auto hops = bulk_hoppings(reference_spec(0.0, kDefaultGbzRing, Boundary::ring),
                                    kDefaultGbzRing, kDefaultMinOrder, kDefaultMaxOrder,
                                    opt.steps_per_period);
    const auto obc = obc_spectrum(reference_spec(0.0, 30), 30, opt.steps_per_period);
    const double g = skin_depth(gbz(hops, obc.eigenvalues));
    const auto u_asym = transmission_matrix(asym, opt.steps_per_period);
    const auto h_eff = effective_hamiltonian(u_asym);
    const Matrix h_bar = similarity_transform(h_eff.entries, g);
    const Matrix u_bar = Matrix((-kImagUnit * asym.period_t * h_bar)).exp();
    const auto u_sym = transmission_matrix(reference_spec(kPi / 2, 9), opt.steps_per_period);

    const double s_transformed = entropy_from_u_path(u_bar, asym.period_t, 15);
    const double s_sym = entropy_from_u_path(u_sym.entries, asym.period_t, 15);
    const double s_asym = entropy_from_u_path(u_asym.entries, asym.period_t, 15);
    const double rel = std::abs(s_transformed - s_sym) / s_sym;
    const double margin = (std::min(s_transformed, s_sym) - s_asym) / s_sym;
    r.pass = rel <= opt.transform_entropy_band && margin > opt.transform_entropy_band;
    std::ostringstream d;
    d << "k=15: transformed " << fmt(s_transformed, 4) << ", symmetric " << fmt(s_sym, 4)
      << " (relative gap " << fmt(rel, 3) << ", band " << opt.transform_entropy_band
      << "); untransformed " << fmt(s_asym, 4) << " sits below by " << fmt(margin, 3)
      << " (need > " << opt.transform_entropy_band << "); g = " << fmt(g, 4);
    r.details = d.str();
    return r;
}

CriterionResult lindblad_sanity(const Options& opt) {
    CriterionResult r{8, "Dissipative-evolution sanity over random systems", false, false, ""};
    std::mt19937_64 rng(0x6e68717721ull);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    };
    double worst_herm = 0.0, worst_eig = 0.0, worst_trace_gain = 0.0, worst_channel = 0.0;
    double worst_block = 0.0;
    int checked = 0;
    for (int sample = 0; sample < opt.lindblad_samples; ++sample) {
        LatticeSpec spec;
        spec.n_straight = 2 + static_cast<int>(rng() % 3);
        spec.boundary = (rng() % 2 == 0) ? Boundary::open : Boundary::ring;
        spec.spacing_a = uniform(0.7, 1.2);
        spec.radius_r = uniform(0.05, 0.6) * spec.spacing_a;
        spec.period_t = uniform(10.0, 60.0);
        spec.coupling_a = uniform(1.0, 16.0);
        spec.coupling_b = uniform(4.0, 10.0);
        // keep the per-period phase bounded so a moderate step count stays accurate
        const double kappa_max = spec.coupling_a *
                                 std::exp(-spec.coupling_b * (spec.spacing_a - spec.radius_r));
        if (kappa_max * spec.period_t > 4.0) {
            spec.coupling_a *= 4.0 / (kappa_max * spec.period_t);
        }
        spec.phase_phi = uniform(0.0, 2 * kPi);

        PairEvolverOptions popts;
        popts.steps_per_period = 800;
        if (sample % 10 == 7) popts.phase1 = Phase1Mode::direct_ode;
        PairEvolver evolver(spec, popts);
        const auto& basis = evolver.basis();

        // random mixed state: blend of two random symmetric pure states
        Matrix rho = Matrix::Zero(basis.dim, basis.dim);
        for (int comp = 0; comp < 2; ++comp) {
            Vector psi = Vector::Zero(basis.dim);
            const int m = basis.total_sites;
            for (int n = 0; n < m; ++n)
                for (int mm = n; mm < m; ++mm) {
                    const Complex amp{uniform(-1, 1), uniform(-1, 1)};
                    psi[basis.idx_two(n, mm)] += amp / (n == mm ? 1.0 : std::numbers::sqrt2);
                    if (n != mm) psi[basis.idx_two(mm, n)] += amp / std::numbers::sqrt2;
                }
            for (int l = 0; l < m; ++l) psi[basis.idx_one(l)] = Complex{uniform(-1, 1), uniform(-1, 1)};
            psi[basis.idx_vac()] = Complex{uniform(-1, 1), uniform(-1, 1)};
            psi.normalize();
            rho += uniform(0.2, 0.8) * (psi * psi.adjoint());
        }
        rho /= rho.trace().real();

        auto before = check_density_invariants(rho, basis);
        for (int k = 0; k < 2; ++k) {
            const Matrix next = evolver.step(rho);
            const auto after = check_density_invariants(next, basis);
            worst_herm = std::max(worst_herm, after.hermiticity_residual);
            worst_eig = std::min(worst_eig, after.min_eigenvalue);
            worst_trace_gain = std::max(worst_trace_gain, after.trace - before.trace);
            worst_block = std::max(worst_block, after.two_photon_trace - before.two_photon_trace);
            worst_block = std::max(worst_block, before.vacuum_weight - after.vacuum_weight);
            rho = next;
            before = after;
        }
        // photon number can never increase: a state without a two-photon block
        // must keep that block exactly empty
        if (sample % 25 == 0) {
            Vector one = Vector::Zero(basis.dim);
            one[basis.idx_one(0)] = std::sqrt(0.75);
            one[basis.idx_vac()] = 0.5;
            Matrix rho1 = one * one.adjoint();
            rho1 = evolver.step(rho1);
            double leak = 0.0;
            const int m2 = basis.total_sites * basis.total_sites;
            for (int i = 0; i < m2; ++i)
                for (int j = 0; j < basis.dim; ++j)
                    leak = std::max({leak, std::abs(rho1(i, j)), std::abs(rho1(j, i))});
            worst_block = std::max(worst_block, leak);
        }
        ++checked;
    }
    // the closed-form loss channel must agree with the finite-strength jump
    // ODE; checked on small fixed systems where the ODE is cheap to resolve
    for (const auto& [n, boundary, phi] : std::initializer_list<std::tuple<int, Boundary, double>>{
             {2, Boundary::open, 0.3}, {2, Boundary::ring, 1.9}, {3, Boundary::open, 0.8}}) {
        LatticeSpec spec = reference_spec(phi, n, boundary);
        PairEvolverOptions closed;
        closed.steps_per_period = 800;
        PairEvolverOptions finite = closed;
        finite.dissipation = DissipationMode::finite_gamma;
        PairEvolver ec(spec, closed), ef(spec, finite);
        Matrix rho = ec.propagation_phase(ec.initial_pair(0, n - 1));
        const Matrix a = ec.dissipation_phase(rho);
        const Matrix b = ef.dissipation_phase(rho);
        worst_channel = std::max(worst_channel, (a - b).cwiseAbs().maxCoeff());
    }
    r.pass = worst_herm < kHermTolerance && worst_eig > -kPsdTolerance &&
             worst_trace_gain < 1e-10 && worst_block < 1e-12 &&
             worst_channel < kChannelAgreementTolerance;
    std::ostringstream d;
    d << checked << " random systems: hermiticity residual <= " << fmt(worst_herm, 3)
      << ", min eigenvalue >= " << fmt(worst_eig, 3) << ", max trace gain "
      << fmt(worst_trace_gain, 3) << ", block-triangularity leak " << fmt(worst_block, 3)
      << ", dissipation-channel disagreement " << fmt(worst_channel, 3);
    r.details = d.str();
    return r;
}

CriterionResult fock_equivalence(const Options& opt) {
    CriterionResult r{9, "Brute-force Fock oracle equivalence", false, false, ""};
    (void)opt;
    double worst_entry = 0.0;
    for (int m = 2; m <= 4; ++m) {
        std::vector<uint8_t> aux(static_cast<size_t>(m), 0);
        if (m >= 3) aux[1] = 1;
        const auto basis = make_extended_basis(m, aux);
        const auto fb = fock::make_basis(m);
        // embedding of symmetric states, as in the construction-time guard
        Matrix c = Matrix::Zero(basis.dim, fb.dim());
        c(basis.idx_vac(), fb.index_vac()) = 1.0;
        for (int l = 0; l < m; ++l) c(basis.idx_one(l), fb.index_one(l)) = 1.0;
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                if (i == j) {
                    c(basis.idx_two(i, i), fb.index_two(i, i)) = 1.0;
                } else {
                    c(basis.idx_two(i, j), fb.index_two(i, j)) = 1.0 / std::numbers::sqrt2;
                    c(basis.idx_two(j, i), fb.index_two(i, j)) = 1.0 / std::numbers::sqrt2;
                }
            }
        for (int j = 0; j < m; ++j) {
            const auto lift = lift_annihilation(j, basis);
            const Matrix diff = lift.matrix.to_dense() * c - c * fock::annihilation(fb, j);
            worst_entry = std::max(worst_entry, diff.cwiseAbs().maxCoeff());
        }
    }

    // Two-site balanced coupler at half the beat length: two indistinguishable
    // photons bunch; the interference dip empties the coincidence off-diagonal.
    const double kappa = 0.137;
    const double length = (kPi / 4) / kappa;
    Matrix h2(2, 2);
    h2 << 0.0, -kappa, -kappa, 0.0;
    const fock::Basis fb = fock::make_basis(2);
    const Matrix h_fock = fock::lift_single_particle(fb, h2);
    Vector psi0 = Vector::Zero(fb.dim());
    psi0[fb.index_two(0, 1)] = 1.0;
    const Vector psi = fock::evolve(h_fock, psi0, length, 4000);
    RealMatrix gamma_fock(2, 2);
    gamma_fock(0, 0) = std::norm(psi[fb.index_two(0, 0)]);
    gamma_fock(1, 1) = std::norm(psi[fb.index_two(1, 1)]);
    gamma_fock(0, 1) = gamma_fock(1, 0) = std::norm(psi[fb.index_two(0, 1)]) / 2.0;

    const Matrix w = Matrix((-kImagUnit * length * h2)).exp();
    const auto basis2 = make_extended_basis(2, {0, 0});
    PairEvolver coupler(w, basis2);
    Matrix rho = coupler.step(coupler.initial_pair(0, 1));
    RealMatrix gamma_ext(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gamma_ext(i, j) = rho(basis2.idx_two(i, j), basis2.idx_two(i, j)).real();
    TransmissionMatrix u;
    u.entries = w;
    u.period_t = length;
    const auto gamma_b5 = pair_correlation_via_u(u, 0, 1);

    const double dyn_me = (gamma_ext - gamma_fock).cwiseAbs().maxCoeff();
    const double dyn_b5 = (gamma_b5.gamma_raw - gamma_fock).cwiseAbs().maxCoeff();
    const double hom_offdiag = gamma_ext(0, 1) + gamma_ext(1, 0);
    const double hom_diag_dev =
        std::max(std::abs(gamma_ext(0, 0) - 0.5), std::abs(gamma_ext(1, 1) - 0.5));
    r.pass = worst_entry <= 1e-10 && dyn_me <= 1e-6 && dyn_b5 <= 1e-6 && hom_offdiag <= 1e-6 &&
             hom_diag_dev <= 1e-6;
    std::ostringstream d;
    d << "operator-lift max mismatch " << fmt(worst_entry, 3)
      << " (cap 1e-10); coupler dynamics vs oracle: master path " << fmt(dyn_me, 3)
      << ", transmission path " << fmt(dyn_b5, 3) << " (cap 1e-6); bunching off-diagonal "
      << fmt(hom_offdiag, 3) << ", diagonal deviation from 1/2: " << fmt(hom_diag_dev, 3);
    r.details = d.str();
    return r;
}

CriterionResult lab_only_note() {
    CriterionResult r{10, "Lab-hardware agreement figures", true, true, ""};
    r.details =
        "excluded by design: experimental similarity floor (85.3% +/- 1.9%), interference-dip "
        "visibility (97.32%), and the absolute Lyapunov calibration are hardware-agreement "
        "numbers; simulation matches them in sign and ordering only";
    return r;
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& options) {
    std::vector<CriterionResult> out;
    auto wanted = [&](int id) {
        if (options.only.empty()) return true;
        for (int w : options.only)
            if (w == id) return true;
        return false;
    };
    auto push = [&](int id, auto&& runner) {
        if (!wanted(id)) return;
        CriterionResult r = runner();
        if (options.inject_failure_id == r.id && !r.informational) {
            r.pass = false;
            r.details += " [failure injected for harness testing]";
        }
        if (options.on_result) options.on_result(r);
        out.push_back(std::move(r));
    };
    push(1, [&] { return lyapunov_monotonicity(options); });
    push(2, [&] { return skin_drift(options); });
    push(3, [&] { return hopping_table(options); });
    push(4, [&] { return gbz_circle(options); });
    push(5, [&] { return correlation_agreement(options); });
    push(6, [&] { return entropy_suppression(options); });
    push(7, [&] { return transform_restoration(options); });
    push(8, [&] { return lindblad_sanity(options); });
    push(9, [&] { return fock_equivalence(options); });
    push(10, [&] { return lab_only_note(); });
    return out;
}

bool print_report(const std::vector<CriterionResult>& results, std::ostream& out) {
    bool all_pass = true;
    for (const auto& r : results) {
        const char* verdict = r.informational ? "INFO" : (r.pass ? "PASS" : "FAIL");
        out << "criterion " << r.id << ": " << verdict << " - " << r.name;
        if (!r.details.empty()) out << " (" << r.details << ")";
        out << "\n";
        if (!r.informational && !r.pass) all_pass = false;
    }
    return all_pass;
}

}  // namespace nhqw::acceptance
