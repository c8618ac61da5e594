#include "gaptooth/config.hpp"

#include "gaptooth/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace gaptooth {

namespace {

constexpr std::array<std::string_view, 18> kKeys = {
    "L",          "m",       "n",        "r",       "tan_theta",        "coupling_order",
    "topology",   "ghost_closure", "bc_left", "bc_right", "downstream_depth", "dam_smoothing",
    "placement",  "rel_tol", "abs_tol",  "seed",    "times",            "out_dir",
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
    return out;
}

long long to_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long out;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("key '" + key + "': trailing characters in '" + v + "'");
    return out;
}

} // namespace

Placement parse_placement(std::string_view name) {
    if (name == "in_patch") return Placement::DamInPatch;
    if (name == "between_patches") return Placement::DamBetweenPatches;
    throw ConfigError("unknown placement '" + std::string(name) + "' (expected in_patch|between_patches)");
}

std::string_view to_string(Placement p) {
    return p == Placement::DamInPatch ? "in_patch" : "between_patches";
}

std::span<const std::string_view> config_keys() { return kKeys; }

ConfigMap parse_config(std::istream& is) {
    ConfigMap out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::vector<double> parse_times(std::string_view text) {
    std::vector<double> out;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) throw ConfigError("empty entry in times list");
        out.push_back(to_real("times", t));
    }
    if (out.empty()) throw ConfigError("times list is empty");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) throw ConfigError("times must be strictly increasing");
    return out;
}

RunConfig to_run_config(const ConfigMap& map) {
    RunConfig c;
    for (const auto& [key, v] : map) {
        if (key == "L") c.L = to_real(key, v);
        else if (key == "m") c.m = static_cast<int>(to_integer(key, v));
        else if (key == "n") c.n = static_cast<int>(to_integer(key, v));
        else if (key == "r") {
            // Accept fractions such as 1/6.
            if (const auto slash = v.find('/'); slash != std::string::npos)
                c.r = to_real(key, trim(v.substr(0, slash))) / to_real(key, trim(v.substr(slash + 1)));
            else
                c.r = to_real(key, v);
            if (!std::isfinite(*c.r)) throw ConfigError("r must be finite, got '" + v + "'");
        } else if (key == "tan_theta") c.tan_theta = to_real(key, v);
        else if (key == "coupling_order") c.coupling_order = parse_coupling_order(v);
        else if (key == "topology") c.topology = parse_topology(v);
        else if (key == "ghost_closure") c.ghost_closure = parse_ghost_closure(v);
        else if (key == "bc_left") c.bc_left = parse_end_condition(v);
        else if (key == "bc_right") c.bc_right = parse_end_condition(v);
        else if (key == "downstream_depth") c.downstream_depth = to_real(key, v);
        else if (key == "dam_smoothing") c.dam_smoothing = to_real(key, v);
        else if (key == "placement") c.placement = parse_placement(v);
        else if (key == "rel_tol") c.rel_tol = to_real(key, v);
        else if (key == "abs_tol") c.abs_tol = to_real(key, v);
        else if (key == "seed") {
            const long long s = to_integer(key, v);
            if (s < 0) throw ConfigError("seed must be non-negative");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (key == "times") c.times = parse_times(v);
        else if (key == "out_dir") c.out_dir = v;
        else throw ConfigError("unknown key '" + key + "'");
    }
    if (c.rel_tol && !(*c.rel_tol > 0)) throw ConfigError("rel_tol must be positive");
    if (c.abs_tol && !(*c.abs_tol > 0)) throw ConfigError("abs_tol must be positive");
    if (c.downstream_depth && !(*c.downstream_depth > 0)) throw ConfigError("downstream_depth must be positive");
    if (c.dam_smoothing && *c.dam_smoothing < 0) throw ConfigError("dam_smoothing must be non-negative");
    return c;
}

} // namespace gaptooth
