#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "critspectra/errors.hpp"
#include "critspectra/ising.hpp"
#include "critspectra/rng.hpp"

namespace critspectra {

/**
 * Flat, typed key=value configuration with optional [section] headers.
 * Sections are organizational only; keys are globally unique. '#' and ';'
 * start comments. Every physics parameter of a run lives here rather
 * than on the command line, so runs are auditable from their config file.
 */
class ConfigFile {
public:
    static ConfigFile parse_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str(), path.string());
    }

    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>") {
        ConfigFile cfg;
        cfg.origin_ = origin;
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find_first_of("#;");
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw config_error(origin + ":" + std::to_string(line_no) +
                                       ": malformed section header");
                continue;  // sections are organizational only
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw config_error(origin + ":" + std::to_string(line_no) +
                                   ": expected key=value, got '" + trimmed + "'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw config_error(origin + ":" + std::to_string(line_no) + ": empty key");
            if (cfg.entries_.count(key))
                throw config_error(origin + ":" + std::to_string(line_no) +
                                   ": duplicate key '" + key + "'");
            cfg.entries_[key] = {value, line_no};
        }
        return cfg;
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get_string(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw config_error(origin_ + ": missing required field '" + key + "'");
        return it->second.value;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

    long get_long(const std::string& key) const { return to_long(key, get_string(key)); }
    long get_long(const std::string& key, long fallback) const {
        return has(key) ? get_long(key) : fallback;
    }

    std::uint64_t get_u64(const std::string& key) const {
        const std::string v = get_string(key);
        try {
            std::size_t pos = 0;
            const std::uint64_t r = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw config_error(field_error(key, v, "unsigned integer"));
        }
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? get_u64(key) : fallback;
    }

    double get_double(const std::string& key) const {
        const std::string v = get_string(key);
        try {
            std::size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw config_error(field_error(key, v, "number"));
        }
    }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    /// beta2J accepts the literal "critical" as 2J/T_c = ln(1 + sqrt(2)).
    double get_beta2J(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        if (get_string(key) == "critical") return critical_beta2J();
        return get_double(key);
    }

    std::vector<int> get_int_list(const std::string& key) const {
        const std::string v = get_string(key);
        std::vector<int> out;
        std::istringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            out.push_back(static_cast<int>(to_long(key, item)));
        }
        if (out.empty()) throw config_error(field_error(key, v, "integer list"));
        return out;
    }

    std::map<std::string, std::pair<std::string, int>> raw() const {
        std::map<std::string, std::pair<std::string, int>> out;
        for (const auto& [k, e] : entries_) out[k] = {e.value, e.line};
        return out;
    }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    long to_long(const std::string& key, const std::string& v) const {
        try {
            std::size_t pos = 0;
            const long r = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw config_error(field_error(key, v, "integer"));
        }
    }

    std::string field_error(const std::string& key, const std::string& value,
                            const std::string& kind) const {
        const auto it = entries_.find(key);
        const int line = it == entries_.end() ? 0 : it->second.line;
        return origin_ + ":" + std::to_string(line) + ": field '" + key +
               "' is not a valid " + kind + " (got '" + value + "')";
    }

    std::string origin_;
    std::map<std::string, Entry> entries_;
};

/// Canonical form of a resolved value for digesting.
inline std::string canonical_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Resolved simulation config as sorted key=value text; the digest is the
/// FNV-1a 64-bit hash of this canonical form.
inline std::map<std::string, std::string> canonical_sim_config(const SimConfig& c) {
    return {
        {"J", canonical_number(c.J)},
        {"L", std::to_string(c.L)},
        {"beta2J", canonical_number(c.beta2J)},
        {"equilibrationSteps", std::to_string(c.equilibration_steps)},
        {"flipsPerStep", std::to_string(c.resolved_flips_per_step())},
        {"seed", std::to_string(c.seed)},
        {"tau", std::to_string(c.tau)},
    };
}

inline std::string config_digest(const std::map<std::string, std::string>& canonical) {
    std::string blob;
    for (const auto& [k, v] : canonical) blob += k + "=" + v + "\n";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(blob)));
    return buf;
}

/// Known simulation fields; anything else in the file is a typo.
inline void reject_unknown_sim_keys(const ConfigFile& cfg) {
    static const std::vector<std::string> known = {
        "L", "J", "beta2J", "seed", "equilibrationSteps", "tau", "flipsPerStep"};
    for (const auto& [key, entry] : cfg.raw()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw config_error("unknown simulation field '" + key + "' (line " +
                               std::to_string(entry.second) + ")");
    }
}

inline SimConfig resolve_sim_config(const ConfigFile& cfg) {
    reject_unknown_sim_keys(cfg);
    SimConfig c;
    c.L = static_cast<int>(cfg.get_long("L"));
    c.tau = cfg.get_long("tau");
    c.seed = cfg.get_u64("seed");
    c.J = cfg.get_double("J", 1.0);
    c.beta2J = cfg.get_beta2J("beta2J", 0.0);
    c.equilibration_steps = cfg.get_long("equilibrationSteps", 10'000);
    c.flips_per_step = cfg.get_long("flipsPerStep", 0);
    c.validate();
    return c;
}

}
