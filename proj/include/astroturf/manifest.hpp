#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "astroturf/rng.hpp"

namespace astroturf {

constexpr const char* kToolVersion = "0.1.0";

/// Writes through a temp file in the same directory and renames into place,
/// so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string file_fingerprint(const std::filesystem::path& path) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(read_file(path))));
    return buf;
}

/// Run metadata written next to every command's outputs. The input
/// fingerprints let a rerun be checked for equal provenance; the wall-clock
/// duration is informational and excluded from any byte-equality claims.
struct RunManifest {
    std::string command;
    std::string config_fingerprint;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    nlohmann::json options = nlohmann::json::object(); // command-specific knobs
    double wall_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json obj;
        obj["command"] = command;
        obj["config_fingerprint"] = config_fingerprint;
        obj["seed"] = seed;
        obj["inputs"] = inputs;
        obj["outputs"] = outputs;
        obj["options"] = options;
        obj["tool_version"] = kToolVersion;
        obj["wall_seconds"] = wall_seconds;
        return obj;
    }
};

class ManifestTimer {
public:
    ManifestTimer() : start_(std::chrono::steady_clock::now()) {}

    double elapsed_seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline void write_manifest(const std::filesystem::path& out_dir, RunManifest manifest, const ManifestTimer& timer) {
    manifest.wall_seconds = timer.elapsed_seconds();
    write_file_atomic(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
}

} // namespace astroturf
