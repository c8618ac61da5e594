#include "gaptooth/coupling.hpp"

#include "gaptooth/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

namespace gaptooth {

namespace {

// Laurent polynomial in the half shift s = E^{1/2}; key is the power of s.
using Laurent = std::map<int, double>;

Laurent delta_power(int k) {
    Laurent out;
    double binom = 1.0;
    for (int t = 0; t <= k; ++t) {
        out[k - 2 * t] += ((t % 2 == 0) ? 1.0 : -1.0) * binom;
        binom = binom * (k - t) / (t + 1);
    }
    return out;
}

Laurent mean_times(const Laurent& p) {
    Laurent out;
    for (const auto& [k, c] : p) {
        out[k + 1] += 0.5 * c;
        out[k - 1] += 0.5 * c;
    }
    return out;
}

void accumulate(Laurent& into, const Laurent& p, double scale) {
    for (const auto& [k, c] : p) into[k] += scale * c;
}

} // namespace

CouplingOrder parse_coupling_order(std::string_view name) {
    if (name == "linear") return CouplingOrder::Linear;
    if (name == "cubic") return CouplingOrder::Cubic;
    if (name == "quintic") return CouplingOrder::Quintic;
    if (name == "septic") return CouplingOrder::Septic;
    throw ConfigError("unknown coupling order '" + std::string(name) +
                      "' (expected linear|cubic|quintic|septic)");
}

std::string_view to_string(CouplingOrder order) {
    switch (order) {
    case CouplingOrder::Linear: return "linear";
    case CouplingOrder::Cubic: return "cubic";
    case CouplingOrder::Quintic: return "quintic";
    case CouplingOrder::Septic: return "septic";
    }
    throw ConfigError("unknown coupling order");
}

FictitiousRule parse_fictitious_rule(std::string_view name) {
    if (name == "zero") return FictitiousRule::Zero;
    if (name == "constant") return FictitiousRule::ConstantExtension;
    if (name == "even") return FictitiousRule::EvenReflection;
    if (name == "odd") return FictitiousRule::OddReflection;
    throw ConfigError("unknown fictitious rule '" + std::string(name) + "'");
}

double StencilWeights::sum() const {
    double s = 0.0;
    for (const auto& term : terms) s += term.second;
    return s;
}

double StencilWeights::at(int offset) const {
    for (const auto& [k, w] : terms)
        if (k == offset) return w;
    return 0.0;
}

StencilWeights stencil_weights(const CouplingScheme& scheme, Side side, double xi) {
    if (!std::isfinite(xi) || std::abs(xi) > 2.0)
        throw ConfigError("coupling offset xi must satisfy |xi| <= 2");
    const int order = static_cast<int>(scheme.order);
    if (order != 1 && order != 3 && order != 5 && order != 7)
        throw ConfigError("unknown coupling order");

    const double a = (side == Side::Plus ? xi : -xi) * scheme.ratio;
    const double a2 = a * a, a3 = a2 * a, a4 = a2 * a2, a5 = a4 * a, a6 = a3 * a3, a7 = a6 * a;
    const double g = scheme.gamma;

    struct Group {
        int power;
        double even_coeff; // multiplies mu delta^{power-1}
        double odd_coeff;  // multiplies delta^{power}
    };
    const std::array<Group, 4> groups{{
        {1, 1.0, a / 2.0},
        {3, (-1.0 + a2) / 8.0, (-a + a3) / 48.0},
        {5, (9.0 - 10.0 * a2 + a4) / 384.0, (9.0 * a - 10.0 * a3 + a5) / 3840.0},
        {7, (-225.0 + 259.0 * a2 - 35.0 * a4 + a6) / 46080.0,
         (-225.0 * a + 259.0 * a3 - 35.0 * a5 + a7) / 645120.0},
    }};

    Laurent total;
    for (const auto& grp : groups) {
        if (grp.power > order) break;
        const double gp = std::pow(g, grp.power);
        accumulate(total, mean_times(delta_power(grp.power - 1)), gp * grp.even_coeff);
        accumulate(total, delta_power(grp.power), gp * grp.odd_coeff);
    }

    StencilWeights out;
    for (const auto& [k, c] : total)
        if (c != 0.0) out.terms.emplace_back(k, c);
    return out;
}

double macro_at(const MacroValues& macro, const PatchLattice& lattice, int j,
                std::optional<FictitiousRule> rule) {
    const int m = lattice.patch_count();
    if (lattice.topology() == Topology::Periodic) return macro(lattice.wrap(j));
    if (lattice.in_range(j)) return macro(j);
    if (!rule) throw ConfigError("bounded topology needs a fictitious rule beyond the domain ends");

    switch (*rule) {
    case FictitiousRule::Zero:
        return 0.0;
    case FictitiousRule::ConstantExtension: {
        int k = j;
        while (k > m) k -= 2;
        while (k < 1) k += 2;
        return macro(k);
    }
    case FictitiousRule::EvenReflection:
    case FictitiousRule::OddReflection: {
        // Reflect about the centre of the end patch so parity is preserved.
        const int k = (j > m) ? 2 * m - j : 2 - j;
        const double sign = (*rule == FictitiousRule::OddReflection) ? -1.0 : 1.0;
        return sign * macro_at(macro, lattice, k, rule);
    }
    }
    throw ConfigError("unknown fictitious rule");
}

std::pair<double, double> interpolate_edges(const CouplingScheme& scheme, const MacroValues& macro,
                                            const PatchLattice& lattice, int j,
                                            std::optional<FictitiousRule> rule) {
    if (lattice.topology() == Topology::Bounded && !rule)
        throw ConfigError("bounded topology needs a fictitious rule for edge interpolation");
    auto value = [&](int offset) { return macro_at(macro, lattice, j + offset, rule); };
    const double left = stencil_weights(scheme, Side::Minus, 1.0).apply(value);
    const double right = stencil_weights(scheme, Side::Plus, 1.0).apply(value);
    return {left, right};
}

double ghost_value(const CouplingScheme& scheme, const MacroValues& macro,
                   const PatchLattice& lattice, int j, double xi,
                   std::optional<FictitiousRule> rule) {
    if (std::abs(xi) > 2.0) throw ConfigError("ghost offset |xi| > 2 is outside the trusted range");
    if (lattice.topology() == Topology::Bounded && !rule)
        throw ConfigError("bounded topology needs a fictitious rule for ghost interpolation");
    auto value = [&](int offset) { return macro_at(macro, lattice, j + offset, rule); };
    return stencil_weights(scheme, Side::Plus, xi).apply(value);
}

namespace {

void resolve_into(std::vector<std::pair<int, double>>& out, const PatchLattice& lattice, int j, double w,
                  std::optional<FictitiousRule> rule) {
    const int m = lattice.patch_count();
    if (lattice.topology() == Topology::Periodic) {
        out.emplace_back(lattice.wrap(j), w);
        return;
    }
    if (lattice.in_range(j)) {
        out.emplace_back(j, w);
        return;
    }
    if (!rule) throw ConfigError("bounded topology needs a fictitious rule beyond the domain ends");
    switch (*rule) {
    case FictitiousRule::Zero: return;
    case FictitiousRule::ConstantExtension: {
        int k = j;
        while (k > m) k -= 2;
        while (k < 1) k += 2;
        out.emplace_back(k, w);
        return;
    }
    case FictitiousRule::EvenReflection:
    case FictitiousRule::OddReflection: {
        const int k = (j > m) ? 2 * m - j : 2 - j;
        const double sign = (*rule == FictitiousRule::OddReflection) ? -1.0 : 1.0;
        resolve_into(out, lattice, k, sign * w, rule);
        return;
    }
    }
}

} // namespace

MacroStencil resolve_stencil(const StencilWeights& weights, const PatchLattice& lattice, int j,
                             std::optional<FictitiousRule> rule) {
    std::vector<std::pair<int, double>> raw;
    for (const auto& [offset, w] : weights.terms) resolve_into(raw, lattice, j + offset, w, rule);
    // Merge repeated indices (wrapping on small lattices, reflections).
    MacroStencil out;
    for (const auto& [k, w] : raw) {
        auto it = std::find_if(out.terms.begin(), out.terms.end(), [k = k](const auto& t) { return t.first == k; });
        if (it == out.terms.end()) out.terms.emplace_back(k, w);
        else it->second += w;
    }
    return out;
}

std::optional<StencilWeights> own_field_weights(const PatchLattice& lattice, int j, double offset,
                                                int half_width) {
    const int m = lattice.patch_count();
    std::vector<int> nodes; // offsets t: patch j + 2t
    if (lattice.topology() == Topology::Periodic) {
        const int q = std::min(half_width, m / 4);
        for (int t = -q; t <= q; ++t) nodes.push_back(t);
    } else {
        // Same-parity patches available to the left and right of j.
        const int left = (j - 1) / 2;
        const int right = (m - j) / 2;
        const int count = std::min(2 * half_width + 1, left + right + 1);
        if (count < 2) return std::nullopt;
        int lo = -half_width;
        int hi = lo + count - 1;
        if (lo < -left) {
            lo = -left;
            hi = lo + count - 1;
        }
        if (hi > right) {
            hi = right;
            lo = hi - count + 1;
        }
        for (int t = lo; t <= hi; ++t) nodes.push_back(t);
    }
    if (nodes.size() < 2) return std::nullopt;

    const double D = lattice.macro_step();
    StencilWeights out;
    for (int a : nodes) {
        double w = 1.0;
        for (int b : nodes)
            if (b != a) w *= (offset - 2.0 * b * D) / (2.0 * (a - b) * D);
        out.terms.emplace_back(2 * a, w);
    }
    return out;
}

std::optional<double> own_field_interpolate(const MacroValues& macro, const PatchLattice& lattice,
                                            int j, double offset, int half_width) {
    const auto w = own_field_weights(lattice, j, offset, half_width);
    if (!w) return std::nullopt;
    return resolve_stencil(*w, lattice, j, std::nullopt).apply(macro);
}

} // namespace gaptooth
