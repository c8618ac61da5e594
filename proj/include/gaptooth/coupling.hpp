/**
 * @file coupling.hpp
 * @brief Inter-patch coupling by interpolation on the staggered macro grid.
 *
 * Patch j receives edge values of its conjugate field from the macroscale
 * values of patches j+-1, j+-3, ... . The coupling operator is a series in
 * the staggered mean and difference operators
 *
 *     mu F_j = (F_{j+1} + F_{j-1}) / 2,   delta F_j = F_{j+1} - F_{j-1},
 *
 * with coefficients depending on a = r xi, where xi = (x - X_j)/(rD) is the
 * offset measured in patch half-widths (xi = +-1 at the edges). Truncating
 * after the gamma^1, gamma^3, gamma^5 or gamma^7 group gives linear, cubic,
 * quintic or septic interpolation through 2, 4, 6 or 8 neighbours.
 */
#pragma once

#include "gaptooth/grid.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace gaptooth {

enum class CouplingOrder { Linear = 1, Cubic = 3, Quintic = 5, Septic = 7 };
enum class Side { Plus, Minus };

CouplingOrder parse_coupling_order(std::string_view name);
std::string_view to_string(CouplingOrder order);

/// Polynomial degree reproduced exactly (1, 3, 5, 7).
constexpr int degree(CouplingOrder order) { return static_cast<int>(order); }
/// Truncation power p of the gamma series (3, 5, 7, 9).
constexpr int truncation_power(CouplingOrder order) { return static_cast<int>(order) + 2; }

struct CouplingScheme {
    CouplingOrder order = CouplingOrder::Cubic;
    double ratio = 1.0 / 6.0;
    double gamma = 1.0;
};

/// Sparse stencil over macro index offsets (odd integers).
struct StencilWeights {
    std::vector<std::pair<int, double>> terms;

    double sum() const;
    /// Weight at a given offset, zero if absent.
    double at(int offset) const;

    template <class Values>
    double apply(const Values& value_at_offset) const {
        double acc = 0.0;
        for (const auto& [offset, w] : terms) acc += w * value_at_offset(offset);
        return acc;
    }
};

/// Weights realising the coupling operator at offset +xi (Plus) or -xi (Minus).
/// |xi| must not exceed 2.
StencilWeights stencil_weights(const CouplingScheme& scheme, Side side, double xi);

/// How macro values beyond the ends of a bounded domain are supplied.
enum class FictitiousRule { Zero, ConstantExtension, EvenReflection, OddReflection };

FictitiousRule parse_fictitious_rule(std::string_view name);

/// One macroscale value per patch: H_j for odd j, U_j for even j.
struct MacroValues {
    std::vector<double> values;

    double operator()(int j) const { return values.at(static_cast<std::size_t>(j - 1)); }
    std::size_t size() const { return values.size(); }
};

/// Macro value at any integer index: wraps on periodic domains and applies the
/// fictitious rule beyond the ends of bounded ones.
double macro_at(const MacroValues& macro, const PatchLattice& lattice, int j,
                std::optional<FictitiousRule> rule);

/// Conjugate-field values at X_j - rD and X_j + rD.
std::pair<double, double> interpolate_edges(const CouplingScheme& scheme, const MacroValues& macro,
                                            const PatchLattice& lattice, int j,
                                            std::optional<FictitiousRule> rule);

/// Conjugate-field value at X_j + xi rD for 1 < |xi| <= 2.
double ghost_value(const CouplingScheme& scheme, const MacroValues& macro,
                   const PatchLattice& lattice, int j, double xi,
                   std::optional<FictitiousRule> rule);

/// Linear combination of macro values at in-range patch indices, with any
/// periodic wrap or fictitious rule already folded into the weights.
struct MacroStencil {
    std::vector<std::pair<int, double>> terms;

    double apply(const MacroValues& macro) const {
        double acc = 0.0;
        for (const auto& [j, w] : terms) acc += w * macro(j);
        return acc;
    }
};

/// Resolves weights over patch offsets from j into a MacroStencil.
MacroStencil resolve_stencil(const StencilWeights& weights, const PatchLattice& lattice, int j,
                             std::optional<FictitiousRule> rule);

/// Lagrange weights (over patch offsets 2t) behind own_field_interpolate.
std::optional<StencilWeights> own_field_weights(const PatchLattice& lattice, int j, double offset,
                                                int half_width);

/// Interpolates patch j's own field at X_j + offset from the same-parity macro
/// values at j, j+-2, ..., j+-2q (Lagrange, degree 2q). Near the ends of a
/// bounded domain the stencil slides inward and shrinks if needed; returns
/// nullopt when fewer than two same-parity patches exist.
std::optional<double> own_field_interpolate(const MacroValues& macro, const PatchLattice& lattice,
                                            int j, double offset, int half_width);

} // namespace gaptooth
