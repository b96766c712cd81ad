#include "nhqw/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nhqw {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !parts.empty()) parts.push_back(trim(cur));
    return parts;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid number '" + s + "' for key " + key);
    }
}

int to_int(const std::string& s, const std::string& key) {
    try {
        size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer '" + s + "' for key " + key);
    }
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("invalid boolean '" + s + "' for key " + key);
}

// ordered lookup helper over one section
class Section {
  public:
    Section(const ConfigMap& cfg, const std::string& name) {
        if (auto it = cfg.find(name); it != cfg.end()) entries_ = &it->second;
        name_ = name;
    }
    bool present() const { return entries_ != nullptr; }
    std::optional<std::string> get(const std::string& key) const {
        if (!entries_) return std::nullopt;
        for (const auto& [k, v] : *entries_)
            if (k == key) return v;
        return std::nullopt;
    }
    void check_known(std::initializer_list<const char*> known) const {
        if (!entries_) return;
        for (const auto& [k, v] : *entries_) {
            if (std::find_if(known.begin(), known.end(),
                             [&](const char* n) { return k == n; }) == known.end())
                throw ConfigError("unknown key '" + k + "' in section [" + name_ + "]");
        }
    }

  private:
    const std::vector<std::pair<std::string, std::string>>* entries_ = nullptr;
    std::string name_;
};

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::single_walk: return "single_walk";
        case Experiment::pair_walk: return "pair_walk";
        case Experiment::lyapunov_sweep: return "lyapunov_sweep";
        case Experiment::spectra: return "spectra";
        case Experiment::gbz: return "gbz";
        case Experiment::table1: return "table1";
        case Experiment::entropy_curve: return "entropy_curve";
    }
    return "unknown";
}

Experiment experiment_from_name(const std::string& name) {
    for (Experiment e : {Experiment::single_walk, Experiment::pair_walk, Experiment::lyapunov_sweep,
                         Experiment::spectra, Experiment::gbz, Experiment::table1,
                         Experiment::entropy_curve}) {
        if (name == experiment_name(e)) return e;
    }
    throw ConfigError("unknown experiment '" + name + "'");
}

const char* boundary_name(Boundary b) { return b == Boundary::ring ? "ring" : "open"; }

std::string geometry_note() {
    return "auxiliary centerline midway between straight neighbors at rest; "
           "left gap = spacing_a + R sin(2 pi z / T + phi), right gap = spacing_a - offset";
}

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            cfg[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        cfg[section].emplace_back(key, value);
    }
    return cfg;
}

double parse_angle(const std::string& token) {
    const std::string s = trim(token);
    const auto pip = s.find("pi");
    if (pip == std::string::npos) return to_double(s, "angle");
    const std::string pre = trim(s.substr(0, pip));
    const std::string post = trim(s.substr(pip + 2));
    double num = pre.empty() ? 1.0 : to_double(pre, "angle");
    double den = 1.0;
    if (!post.empty()) {
        if (post.front() != '/') throw ConfigError("invalid angle '" + s + "'");
        den = to_double(trim(post.substr(1)), "angle");
        if (den == 0.0) throw ConfigError("invalid angle '" + s + "'");
    }
    return num * std::numbers::pi / den;
}

LatticeSpec lattice_from_config(const ConfigMap& cfg) {
    LatticeSpec spec;
    Section s(cfg, "lattice");
    s.check_known({"n_straight", "boundary", "spacing_a", "radius_R", "period_T", "phase_phi",
                   "coupling_A", "coupling_b", "onsite_beta0"});
    if (auto v = s.get("n_straight")) spec.n_straight = to_int(*v, "n_straight");
    if (auto v = s.get("boundary")) {
        if (*v == "open") spec.boundary = Boundary::open;
        else if (*v == "ring") spec.boundary = Boundary::ring;
        else throw ConfigError("boundary must be open or ring");
    }
    if (auto v = s.get("spacing_a")) spec.spacing_a = to_double(*v, "spacing_a");
    if (auto v = s.get("radius_R")) spec.radius_r = to_double(*v, "radius_R");
    if (auto v = s.get("period_T")) spec.period_t = to_double(*v, "period_T");
    if (auto v = s.get("phase_phi")) spec.phase_phi = parse_angle(*v);
    if (auto v = s.get("coupling_A")) spec.coupling_a = to_double(*v, "coupling_A");
    if (auto v = s.get("coupling_b")) spec.coupling_b = to_double(*v, "coupling_b");
    if (auto v = s.get("onsite_beta0")) spec.onsite_beta0 = to_double(*v, "onsite_beta0");
    spec.validate();
    return spec;
}

void RunConfig::validate() const {
    spec.validate();
    if (injection < 1 || injection > spec.n_straight)
        throw ConfigError("injection site out of range (1-based)");
    for (int s : {injection_pair.first, injection_pair.second})
        if (s < 1 || s > spec.n_straight)
            throw ConfigError("pair injection site out of range (1-based)");
    for (int k : periods)
        if (k < 0) throw ConfigError("periods must be non-negative");
    if (steps_per_period < 1) throw ConfigError("steps_per_period must be positive");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (entropy_periods < 1) throw ConfigError("entropy_periods must be positive");
    if (!(0 <= lyapunov_k1 && lyapunov_k1 < lyapunov_k2))
        throw ConfigError("lyapunov window must satisfy 0 <= k1 < k2");
    if (gbz_pair_tol <= 0) throw ConfigError("gbz_pair_tol must be positive");
}

RunConfig run_config_from_text(const std::string& text) {
    const ConfigMap cfg = parse_config_text(text);
    for (const auto& [name, _] : cfg)
        if (name != "lattice" && name != "run")
            throw ConfigError("unknown section [" + name + "]");
    RunConfig rc;
    rc.spec = lattice_from_config(cfg);
    // standard-geometry defaults (site 6, pair 5/6) shrink with small lattices
    if (rc.spec.n_straight < 6) {
        rc.injection = (rc.spec.n_straight + 1) / 2;
        rc.injection_pair = {std::max(1, rc.injection - 1), rc.injection};
    }
    Section r(cfg, "run");
    r.check_known({"experiment", "injection", "injection_pair", "periods", "phi",
                   "steps_per_period", "format", "out", "dump_density", "gbz_ring", "table_ring",
                   "obc_sites", "entropy_periods", "lyapunov_sites", "lyapunov_k1", "lyapunov_k2",
                   "gbz_pair_tol"});
    if (auto v = r.get("experiment")) rc.experiment = experiment_from_name(*v);
    if (auto v = r.get("injection")) rc.injection = to_int(*v, "injection");
    if (auto v = r.get("injection_pair")) {
        const auto parts = split(*v, ',');
        if (parts.size() != 2) throw ConfigError("injection_pair needs two sites");
        rc.injection_pair = {to_int(parts[0], "injection_pair"), to_int(parts[1], "injection_pair")};
    }
    if (auto v = r.get("periods")) {
        rc.periods.clear();
        for (const auto& p : split(*v, ',')) rc.periods.push_back(to_int(p, "periods"));
        if (rc.periods.empty()) throw ConfigError("periods must not be empty");
    }
    if (auto v = r.get("phi")) {
        rc.phi_list.clear();
        for (const auto& p : split(*v, ',')) rc.phi_list.push_back(parse_angle(p));
        if (rc.phi_list.empty()) throw ConfigError("phi must not be empty");
    }
    if (auto v = r.get("steps_per_period")) rc.steps_per_period = to_int(*v, "steps_per_period");
    if (auto v = r.get("format")) rc.format = *v;
    if (auto v = r.get("out")) rc.out_dir = *v;
    if (auto v = r.get("dump_density")) rc.dump_density = to_bool(*v, "dump_density");
    if (auto v = r.get("gbz_ring")) rc.gbz_ring = to_int(*v, "gbz_ring");
    if (auto v = r.get("table_ring")) rc.table_ring = to_int(*v, "table_ring");
    if (auto v = r.get("obc_sites")) rc.obc_sites = to_int(*v, "obc_sites");
    if (auto v = r.get("entropy_periods")) rc.entropy_periods = to_int(*v, "entropy_periods");
    if (auto v = r.get("lyapunov_sites")) rc.lyapunov_sites = to_int(*v, "lyapunov_sites");
    if (auto v = r.get("lyapunov_k1")) rc.lyapunov_k1 = to_int(*v, "lyapunov_k1");
    if (auto v = r.get("lyapunov_k2")) rc.lyapunov_k2 = to_int(*v, "lyapunov_k2");
    if (auto v = r.get("gbz_pair_tol")) rc.gbz_pair_tol = to_double(*v, "gbz_pair_tol");
    if (rc.phi_list.empty())
        rc.phi_list = {0.0, std::numbers::pi / 4, std::numbers::pi / 2};
    rc.validate();
    return rc;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_config_from_text(buf.str());
}

std::string lattice_to_config_text(const LatticeSpec& spec) {
    std::ostringstream out;
    out << "[lattice]\n";
    out << "n_straight = " << spec.n_straight << "\n";
    out << "boundary = " << boundary_name(spec.boundary) << "\n";
    out << "spacing_a = " << format_g(spec.spacing_a) << "\n";
    out << "radius_R = " << format_g(spec.radius_r) << "\n";
    out << "period_T = " << format_g(spec.period_t) << "\n";
    out << "phase_phi = " << format_g(spec.phase_phi) << "\n";
    out << "coupling_A = " << format_g(spec.coupling_a) << "\n";
    out << "coupling_b = " << format_g(spec.coupling_b) << "\n";
    out << "onsite_beta0 = " << format_g(spec.onsite_beta0) << "\n";
    return out.str();
}

std::string run_config_to_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "# geometry: " << geometry_note() << "\n";
    out << lattice_to_config_text(cfg.spec) << "\n";
    out << "[run]\n";
    out << "experiment = " << experiment_name(cfg.experiment) << "\n";
    out << "injection = " << cfg.injection << "\n";
    out << "injection_pair = " << cfg.injection_pair.first << "," << cfg.injection_pair.second
        << "\n";
    out << "periods = ";
    for (size_t i = 0; i < cfg.periods.size(); ++i)
        out << (i ? "," : "") << cfg.periods[i];
    out << "\n";
    out << "phi = ";
    for (size_t i = 0; i < cfg.phi_list.size(); ++i)
        out << (i ? "," : "") << format_g(cfg.phi_list[i]);
    out << "\n";
    out << "steps_per_period = " << cfg.steps_per_period << "\n";
    out << "format = " << cfg.format << "\n";
    out << "out = " << cfg.out_dir.string() << "\n";
    out << "dump_density = " << (cfg.dump_density ? "true" : "false") << "\n";
    out << "gbz_ring = " << cfg.gbz_ring << "\n";
    out << "table_ring = " << cfg.table_ring << "\n";
    out << "obc_sites = " << cfg.obc_sites << "\n";
    out << "entropy_periods = " << cfg.entropy_periods << "\n";
    out << "lyapunov_sites = " << cfg.lyapunov_sites << "\n";
    out << "lyapunov_k1 = " << cfg.lyapunov_k1 << "\n";
    out << "lyapunov_k2 = " << cfg.lyapunov_k2 << "\n";
    out << "gbz_pair_tol = " << format_g(cfg.gbz_pair_tol) << "\n";
    return out.str();
}

}  // namespace nhqw
