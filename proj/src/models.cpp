#include "gaptooth/models.hpp"

#include "gaptooth/errors.hpp"

#include <cmath>
#include <string>

namespace gaptooth {

double SmagorinskiParams::equilibrium_velocity() const {
    return std::sqrt(gravity_coeff * bed_slope / drag_coeff);
}

namespace {

double checked_depth(double h, int slot, const std::optional<double>& floor) {
    if (floor) return std::max(h, *floor);
    if (!(h > 0.0))
        throw NumericalError("non-positive depth " + std::to_string(h) + " at slot " +
                             std::to_string(slot));
    return h;
}

} // namespace

void SmagorinskiSystem::evaluate(const PatchFields& f, double d, int first, int last,
                                 std::span<double> out) const {
    const auto& p = params_;
    const double inv4d = 1.0 / (4.0 * d);
    const double inv2d = 1.0 / (2.0 * d);
    const double inv4d2 = 1.0 / (4.0 * d * d);
    for (int i = first; i <= last; ++i) {
        double rate;
        if (f.field(i) == Field::Depth) {
            // Flux form: depth averaged onto the velocity slots either side.
            rate = -((f[i + 2] + f[i]) * f[i + 1] - (f[i - 2] + f[i]) * f[i - 1]) * inv4d;
        } else {
            const double u = f[i];
            const double hp = f[i + 1], hm = f[i - 1];
            checked_depth(hp, i + 1, p.depth_floor);
            checked_depth(hm, i - 1, p.depth_floor);
            const double h = checked_depth(0.5 * (hp + hm), i, p.depth_floor);
            rate = p.gravity_coeff * (p.bed_slope - (hp - hm) * inv2d) -
                   p.drag_coeff * u * std::abs(u) / h -
                   p.advection_coeff * u * (f[i + 2] - f[i - 2]) * inv4d +
                   p.dispersion_coeff * h * std::abs(u) * (f[i + 2] - 2.0 * u + f[i - 2]) * inv4d2;
        }
        out[static_cast<std::size_t>(i - first)] = rate;
    }
}

void ProbeSystem::evaluate(const PatchFields& f, double d, int first, int last,
                           std::span<double> out) const {
    const auto& c = params_;
    const bool third = reach() == 3;
    const double inv2d = 1.0 / (2.0 * d);
    const double inv8d3 = 1.0 / (8.0 * d * d * d);
    const double inv4d2 = 1.0 / (4.0 * d * d);
    for (int i = first; i <= last; ++i) {
        const bool depth = f.field(i) == Field::Depth;
        const double growth = depth ? c.c1 : c.c2;
        const double disp = depth ? c.c11 : c.c21;
        const double diff = depth ? c.c3 : c.c4;

        double rate = growth * f[i] - (f[i + 1] - f[i - 1]) * inv2d;
        if (third && disp != 0.0)
            rate -= disp * (f[i + 3] - 3.0 * f[i + 1] + 3.0 * f[i - 1] - f[i - 3]) * inv8d3;
        if (diff != 0.0) rate += diff * (f[i + 2] - 2.0 * f[i] + f[i - 2]) * inv4d2;
        if (!depth && c.c5 != 0.0) rate -= c.c5 * f[i] * (f[i + 2] - f[i - 2]) * (0.5 * inv2d);
        out[static_cast<std::size_t>(i - first)] = rate;
    }
}

std::vector<double> smagorinski_rhs(const PatchFields& fields, const SmagorinskiParams& params,
                                    double d, int first, int last) {
    std::vector<double> out(static_cast<std::size_t>(last - first + 1));
    SmagorinskiSystem(params).evaluate(fields, d, first, last, out);
    return out;
}

std::vector<double> probe_rhs(const PatchFields& fields, const ProbeParams& params, double d,
                              int first, int last) {
    std::vector<double> out(static_cast<std::size_t>(last - first + 1));
    ProbeSystem(params).evaluate(fields, d, first, last, out);
    return out;
}

std::vector<double> linear_dispersive_rhs(const PatchFields& fields, const ProbeParams& params,
                                          double d, int first, int last) {
    ProbeParams p;
    p.c1 = params.c1;
    p.c2 = params.c2;
    p.c11 = params.c11;
    p.c21 = params.c21;
    return probe_rhs(fields, p, d, first, last);
}

std::vector<double> dispersive_diffusive_rhs(const PatchFields& fields, const ProbeParams& params,
                                             double d, int first, int last) {
    ProbeParams p = params;
    p.c5 = 0.0;
    return probe_rhs(fields, p, d, first, last);
}

std::vector<double> nonlinear_advective_rhs(const PatchFields& fields, const ProbeParams& params,
                                            double d, int first, int last) {
    ProbeParams p;
    p.c5 = params.c5;
    return probe_rhs(fields, p, d, first, last);
}

} // namespace gaptooth
