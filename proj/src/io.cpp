#include "nhqw/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "nhqw/version.hpp"

namespace nhqw {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvTable::to_string() const {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

std::string csv_of_real_matrix(const RealMatrix& m, const std::string& index_label) {
    CsvTable t;
    t.header.push_back(index_label);
    for (int c = 0; c < m.cols(); ++c) t.header.push_back("site_" + std::to_string(c + 1));
    for (int r = 0; r < m.rows(); ++r) {
        std::vector<std::string> row;
        row.push_back("site_" + std::to_string(r + 1));
        for (int c = 0; c < m.cols(); ++c) row.push_back(format_double(m(r, c)));
        t.rows.push_back(std::move(row));
    }
    return t.to_string();
}

std::string csv_of_complex_matrix(const Matrix& m, const std::string& entry_label) {
    CsvTable t;
    t.header.push_back("row");
    for (int c = 0; c < m.cols(); ++c) {
        t.header.push_back(entry_label + "_" + std::to_string(c + 1) + "_re");
        t.header.push_back(entry_label + "_" + std::to_string(c + 1) + "_im");
    }
    for (int r = 0; r < m.rows(); ++r) {
        std::vector<std::string> row;
        row.push_back(std::to_string(r + 1));
        for (int c = 0; c < m.cols(); ++c) {
            row.push_back(format_double(m(r, c).real()));
            row.push_back(format_double(m(r, c).imag()));
        }
        t.rows.push_back(std::move(row));
    }
    return t.to_string();
}

Json json_of_real_matrix(const RealMatrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json json_of_complex_matrix(const Matrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string checksum_hex(std::string_view bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string density_matrix_bytes(const Matrix& rho) {
    std::string out;
    out.reserve(static_cast<size_t>(rho.size()) * 16);
    auto put = [&](double v) {
        static_assert(sizeof(double) == 8);
        char raw[8];
        std::memcpy(raw, &v, 8);
        if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + 8);
        out.append(raw, 8);
    };
    for (int r = 0; r < rho.rows(); ++r)
        for (int c = 0; c < rho.cols(); ++c) {
            put(rho(r, c).real());
            put(rho(r, c).imag());
        }
    return out;
}

Json RunManifest::to_json() const {
    Json j;
    j["run_id"] = run_id;
    j["version"] = version;
    j["wall_seconds"] = wall_seconds;
    j["config"] = config_echo;
    Json files = Json::array();
    for (const auto& [name, sum] : checksums)
        files.push_back(Json{{"file", name}, {"fnv1a64", sum}});
    j["outputs"] = std::move(files);
    return j;
}

RunManifest write_run_outputs(const std::filesystem::path& out_dir, const std::string& config_echo,
                              std::vector<OutputFile> files, double wall_seconds) {
    namespace fs = std::filesystem;
    RunManifest manifest;
    manifest.version = kVersion;
    manifest.config_echo = config_echo;
    manifest.wall_seconds = wall_seconds;
    std::string id_material = config_echo;
    for (const auto& f : files) {
        id_material += f.name;
        id_material += checksum_hex(f.contents);
        manifest.checksums.emplace_back(f.name, checksum_hex(f.contents));
    }
    manifest.run_id = checksum_hex(id_material);

    std::vector<fs::path> written;
    try {
        fs::create_directories(out_dir);
        for (const auto& f : files) {
            const fs::path p = out_dir / f.name;
            if (p.has_parent_path()) fs::create_directories(p.parent_path());
            std::ofstream out(p, std::ios::binary);
            if (!out) throw ConfigError("cannot write " + p.string());
            out.write(f.contents.data(), static_cast<std::streamsize>(f.contents.size()));
            if (!out) throw ConfigError("write failed for " + p.string());
            written.push_back(p);
        }
        Json mj = manifest.to_json();
        const fs::path mp = out_dir / "manifest.json";
        std::ofstream out(mp, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + mp.string());
        out << mj.dump(2) << "\n";
        written.push_back(mp);
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        throw;
    }
    return manifest;
}

}  // namespace nhqw
