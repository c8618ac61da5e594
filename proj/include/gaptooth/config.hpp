/**
 * @file config.hpp
 * @brief Plain-text key=value run configuration.
 *
 * One pair per line, '#' starts a comment, blank lines are ignored. Only the
 * keys listed in config_keys() are accepted.
 */
#pragma once

#include "gaptooth/coupling.hpp"
#include "gaptooth/grid.hpp"
#include "gaptooth/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaptooth {

enum class Placement { DamInPatch, DamBetweenPatches };

Placement parse_placement(std::string_view name);
std::string_view to_string(Placement p);

using ConfigMap = std::map<std::string, std::string>;

std::span<const std::string_view> config_keys();

/// Reads key=value lines; unknown keys and malformed lines are ConfigErrors.
ConfigMap parse_config(std::istream& is);
ConfigMap load_config_file(const std::string& path);

/// Typed view; unset keys stay empty so each experiment applies its own defaults.
struct RunConfig {
    std::optional<double> L;
    std::optional<int> m;
    std::optional<int> n;
    std::optional<double> r;
    std::optional<double> tan_theta;
    std::optional<CouplingOrder> coupling_order;
    std::optional<Topology> topology;
    std::optional<GhostClosure> ghost_closure;
    std::optional<EndCondition> bc_left;
    std::optional<EndCondition> bc_right;
    std::optional<double> downstream_depth;
    std::optional<double> dam_smoothing;
    std::optional<Placement> placement;
    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<double>> times;
    std::optional<std::string> out_dir;
};

RunConfig to_run_config(const ConfigMap& map);

/// Comma-separated reals.
std::vector<double> parse_times(std::string_view text);

} // namespace gaptooth
