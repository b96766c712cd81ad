#pragma once

// Experiment drivers: each composes the module operations for one dataset,
// renders the payloads (CSV or JSON per config), and returns the files to
// write. run() executes the configured experiment and writes a manifest.
// Identical configs produce byte-identical outputs.

#include "nhqw/config.hpp"
#include "nhqw/io.hpp"

namespace nhqw {

std::vector<OutputFile> build_experiment_outputs(const RunConfig& cfg);
RunManifest run(const RunConfig& cfg);

// Minimal standalone SVG renderings of exported tables.
std::string render_line_svg(const CsvTable& table);
std::string render_heatmap_svg(const RealMatrix& values);
CsvTable parse_csv(const std::string& text);

}  // namespace nhqw
