/**
 * @file models.hpp
 * @brief Microscale right-hand sides on one staggered patch.
 *
 * A model sees a window of slot values (interior unknowns plus edges and
 * ghosts filled in by the solver) and writes time derivatives for a range
 * of slots. The same code serves gap-tooth patches and the full-domain
 * reference, which is just one very long patch.
 */
#pragma once

#include "gaptooth/grid.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace gaptooth {

/// Slot values over [lo, hi]. Slot i holds depth iff (i + base) is odd, which
/// matches field_parity(base, i) for a gap-tooth patch with index base.
class PatchFields {
public:
    PatchFields() = default;
    PatchFields(int base, int lo, int hi) : base_(base), lo_(lo), values_(static_cast<std::size_t>(hi - lo + 1), 0.0) {}

    void reset(int base, int lo, int hi) {
        base_ = base;
        lo_ = lo;
        values_.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    }

    int base() const { return base_; }
    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(values_.size()) - 1; }

    double operator[](int i) const { return values_[static_cast<std::size_t>(i - lo_)]; }
    double& operator[](int i) { return values_[static_cast<std::size_t>(i - lo_)]; }

    Field field(int i) const { return ((i + base_) % 2 != 0) ? Field::Depth : Field::Velocity; }

private:
    int base_ = 0;
    int lo_ = 0;
    std::vector<double> values_;
};

struct SmagorinskiParams {
    double bed_slope = 0.001; // tan(theta)
    double gravity_coeff = 0.985;
    double drag_coeff = 0.003;
    double advection_coeff = 1.045;
    double dispersion_coeff = 0.26;
    /// Optional clamp on the depth used in divisions; without it a
    /// non-positive depth is an error.
    std::optional<double> depth_floor;

    /// Uniform-flow velocity balancing slope forcing against drag at h = 1.
    double equilibrium_velocity() const;
};

struct ProbeParams {
    double c1 = 0, c2 = 0;   // growth/decay
    double c11 = 0, c21 = 0; // dispersion
    double c3 = 0, c4 = 0;   // diffusion
    double c5 = 0;           // self-advection of velocity
};

class WaveSystem {
public:
    virtual ~WaveSystem() = default;

    /// Largest slot offset any stencil reads (2 or 3).
    virtual int reach() const = 0;

    /// Writes d/dt at slots first..last into out[0..last-first]. The window
    /// must cover [first - reach, last + reach].
    virtual void evaluate(const PatchFields& fields, double d, int first, int last,
                          std::span<double> out) const = 0;
};

class SmagorinskiSystem final : public WaveSystem {
public:
    explicit SmagorinskiSystem(SmagorinskiParams params) : params_(params) {}
    int reach() const override { return 2; }
    void evaluate(const PatchFields& fields, double d, int first, int last,
                  std::span<double> out) const override;
    const SmagorinskiParams& params() const { return params_; }

private:
    SmagorinskiParams params_;
};

class ProbeSystem final : public WaveSystem {
public:
    explicit ProbeSystem(ProbeParams params) : params_(params) {}
    int reach() const override { return (params_.c11 != 0.0 || params_.c21 != 0.0) ? 3 : 2; }
    void evaluate(const PatchFields& fields, double d, int first, int last,
                  std::span<double> out) const override;
    const ProbeParams& params() const { return params_; }

private:
    ProbeParams params_;
};

/// Derivatives at every slot of [first, last] (both fields).
std::vector<double> smagorinski_rhs(const PatchFields& fields, const SmagorinskiParams& params,
                                    double d, int first, int last);

/// General probe: c1 h - h_x ... at depth slots, c2 u - u_x ... at velocity slots.
std::vector<double> probe_rhs(const PatchFields& fields, const ProbeParams& params, double d,
                              int first, int last);

/// Growth plus first- and third-derivative coupling (c1, c2, c11, c21).
std::vector<double> linear_dispersive_rhs(const PatchFields& fields, const ProbeParams& params,
                                          double d, int first, int last);
/// As above with own-field diffusion (c3, c4).
std::vector<double> dispersive_diffusive_rhs(const PatchFields& fields, const ProbeParams& params,
                                             double d, int first, int last);
/// Unit-speed waves with velocity self-advection c5.
std::vector<double> nonlinear_advective_rhs(const PatchFields& fields, const ProbeParams& params,
                                            double d, int first, int last);

} // namespace gaptooth
