#pragma once
// Artifact plumbing: CSV tables with a fixed column order and 17-significant-
// digit decimal text, JSON summaries, and a manifest that content-hashes every
// output file so reruns can be compared byte for byte.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

#include "h22/errors.hpp"

#define H22_VERSION "0.1.0"

namespace h22 {

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// decimal text with 17 significant digits: round-trips any double exactly
inline std::string cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline std::string cell(long v) { return std::to_string(v); }
inline std::string cell(long long v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "1" : "0"; }
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::string footer; // optional trailing '#' lines (e.g. fit results as JSON)

    explicit CsvTable(std::vector<std::string> cols) : header(std::move(cols)) {}

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != header.size())
            throw ConfigError("CsvTable: row width " + std::to_string(cells.size()) +
                              " does not match header width " + std::to_string(header.size()));
        rows.push_back(std::move(cells));
    }

    std::string text() const {
        std::string out;
        for (size_t c = 0; c < header.size(); ++c) {
            if (c) out += ',';
            out += header[c];
        }
        out += '\n';
        for (const auto& r : rows) {
            for (size_t c = 0; c < r.size(); ++c) {
                if (c) out += ',';
                out += r[c];
            }
            out += '\n';
        }
        out += footer;
        return out;
    }
};

inline nlohmann::json summary_entry(const std::string& name, double mean, double err,
                                    long long n, double target, bool pass) {
    nlohmann::json e;
    e["name"] = name;
    e["mean"] = mean;
    e["stderr"] = err;
    e["n"] = n;
    if (std::isfinite(target)) e["target"] = target;
    else e["target"] = nullptr;
    e["pass"] = pass;
    return e;
}

// Collects named outputs in a directory and finishes with a manifest listing a
// content hash for every file.  Single-threaded writes; one writer per run.
class ArtifactWriter {
public:
    explicit ArtifactWriter(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    }

    const std::string& dir() const { return dir_; }

    std::string write(const std::string& name, const std::string& content) {
        std::string path = dir_ + "/" + name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write artifact '" + path + "'");
        out.write(content.data(), std::streamsize(content.size()));
        out.close();
        if (!out) throw ConfigError("short write on artifact '" + path + "'");
        files_.push_back({name, content.size(), fnv1a64(content)});
        return path;
    }

    // written last; lists every prior artifact but not itself
    std::string write_manifest(const nlohmann::json& config_json, uint64_t seed) {
        nlohmann::json m;
        m["config_fnv1a64"] = hash_hex(fnv1a64(config_json.dump()));
        m["seed"] = seed;
        m["versions"] = {{"h22", H22_VERSION},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                       std::to_string(EIGEN_MINOR_VERSION)},
                         {"compiler", __VERSION__}};
        nlohmann::json files = nlohmann::json::array();
        for (const auto& f : files_)
            files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", hash_hex(f.hash)}});
        m["files"] = files;
        return write("manifest.json", m.dump(2) + "\n");
    }

    struct FileEntry {
        std::string name;
        size_t bytes = 0;
        uint64_t hash = 0;
    };
    const std::vector<FileEntry>& files() const { return files_; }

private:
    std::string dir_;
    std::vector<FileEntry> files_;
};

} // namespace h22
