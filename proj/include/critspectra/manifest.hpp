#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "critspectra/config.hpp"
#include "critspectra/errors.hpp"
#include "critspectra/io.hpp"
#include "critspectra/version.hpp"

namespace critspectra {

/**
 * Audit record of one CLI run: the resolved config (and its digest), the
 * seed, every artifact written, and the wall-clock cost. Any artifact is
 * reproducible from its manifest.
 */
struct RunManifest {
    std::string subcommand;
    std::string version = version_string;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::map<std::string, std::string> config;   // resolved, canonical values
    std::vector<std::string> artifacts;
    double wall_clock_seconds = 0.0;
};

inline void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
    nlohmann::json j;
    j["subcommand"] = m.subcommand;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["config_digest"] = m.config_digest;
    j["config"] = m.config;
    j["artifacts"] = m.artifacts;
    j["wall_clock_seconds"] = m.wall_clock_seconds;
    io::atomic_write(path, j.dump(2) + "\n");
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open manifest: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("malformed manifest " + path.string() + ": " + e.what());
    }
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return m;
}

}
