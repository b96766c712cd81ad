#pragma once

// Deterministic table/JSON export and the run manifest. Floating-point
// values are printed with %.17g so identical runs produce byte-identical
// files; manifests carry an FNV-1a checksum per emitted file.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nhqw/types.hpp"

namespace nhqw {

using Json = nlohmann::ordered_json;

std::string format_double(double v);  // round-trip exact

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string to_string() const;
};

std::string csv_of_real_matrix(const RealMatrix& m, const std::string& index_label);
// One row per matrix row, a re/im column pair per matrix column.
std::string csv_of_complex_matrix(const Matrix& m, const std::string& entry_label);
Json json_of_real_matrix(const RealMatrix& m);
Json json_of_complex_matrix(const Matrix& m);  // re/im pair per entry

uint64_t fnv1a64(std::string_view bytes);
std::string checksum_hex(std::string_view bytes);

// Little-endian doubles, interleaved re/im, row-major.
std::string density_matrix_bytes(const Matrix& rho);

struct OutputFile {
    std::string name;      // relative to the run directory
    std::string contents;  // bytes
};

struct RunManifest {
    std::string run_id;
    std::string version;
    std::string config_echo;
    double wall_seconds = 0.0;
    std::vector<std::pair<std::string, std::string>> checksums;  // file -> fnv1a hex
    Json to_json() const;
};

// Writes every file under out_dir, then manifest.json. Removes whatever was
// already written if any write fails.
RunManifest write_run_outputs(const std::filesystem::path& out_dir, const std::string& config_echo,
                              std::vector<OutputFile> files, double wall_seconds);

}  // namespace nhqw
