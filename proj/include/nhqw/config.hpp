#pragma once

// Human-readable key-value config files with [section] headers, plus the
// RunConfig that binds a lattice to an experiment. Site indices are 1-based
// in files and on the command line; angles accept plain numbers or
// "[a]pi[/b]" fractions (e.g. pi/2, 3pi/8).

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nhqw/lattice.hpp"
#include "nhqw/nonbloch.hpp"

namespace nhqw {

enum class Experiment {
    single_walk,
    pair_walk,
    lyapunov_sweep,
    spectra,
    gbz,
    table1,
    entropy_curve,
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

struct RunConfig {
    LatticeSpec spec;
    Experiment experiment = Experiment::single_walk;
    int injection = 6;                      // 1-based straight site
    std::pair<int, int> injection_pair{5, 6};  // 1-based
    std::vector<int> periods{3, 4, 5, 6};
    std::vector<double> phi_list;           // defaults to {0, pi/4, pi/2}
    int steps_per_period = kDefaultStepsPerPeriod;
    std::string format = "csv";             // csv | json payloads
    std::filesystem::path out_dir = "out";
    bool dump_density = false;
    int gbz_ring = kDefaultGbzRing;         // ring size for GBZ hopping extraction
    int table_ring = 10;                    // ring size for the hopping table
    int obc_sites = 30;
    int entropy_periods = 15;
    int lyapunov_sites = 30;
    int lyapunov_k1 = 20;
    int lyapunov_k2 = 40;
    double gbz_pair_tol = kGbzPairTolerance;

    void validate() const;
};

// Raw parsed file: section -> ordered key/value pairs.
using ConfigMap = std::map<std::string, std::vector<std::pair<std::string, std::string>>>;

ConfigMap parse_config_text(const std::string& text);
double parse_angle(const std::string& token);  // "0.5", "pi/2", "3pi/8", ...

LatticeSpec lattice_from_config(const ConfigMap& cfg);
RunConfig run_config_from_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

// Canonical serialization; parse(serialize(x)) == x.
std::string lattice_to_config_text(const LatticeSpec& spec);
std::string run_config_to_text(const RunConfig& cfg);

const char* boundary_name(Boundary b);
// Geometry convention note echoed into outputs for reproducibility.
std::string geometry_note();

}  // namespace nhqw
