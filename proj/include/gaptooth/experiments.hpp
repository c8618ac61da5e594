/**
 * @file experiments.hpp
 * @brief Experiment recipes: periodic relaxation, equilibrium spectrum,
 *        dam break (gap-tooth or full domain) and the timing comparison.
 */
#pragma once

#include "gaptooth/config.hpp"
#include "gaptooth/coupling.hpp"
#include "gaptooth/integrator.hpp"
#include "gaptooth/snapshot.hpp"
#include "gaptooth/solver.hpp"
#include "gaptooth/spectrum.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gaptooth {

inline constexpr std::string_view kVersion = "1.0.0";

enum class RunMode { GapTooth, FullDomain };
std::string_view to_string(RunMode mode);

// ---------------------------------------------------------------- relaxation

struct RelaxationConfig {
    int m = 10;
    int n = 9;
    double r = 1.0 / 6.0;
    double tan_theta = 0.001;
    CouplingOrder order = CouplingOrder::Cubic;
    GhostClosure closure = GhostClosure::MacroInterpolate;
    double macro_amplitude = 0.2;
    double noise_amplitude = 0.02;
    std::uint64_t seed = 1;
    std::vector<double> times{0.0, 2.0, 4.0};
    IntegratorConfig integrator;
    unsigned threads = 1;
};

struct MacroWaveFit {
    double depth_amplitude = 0.0;
    double velocity_amplitude = 0.0;
    double amplitude = 0.0; // sqrt of the sum of squares of the two above
    double crest = 0.0;     // x of the fitted depth maximum in [0, L)
};

struct RelaxationResult {
    PatchLattice lattice;
    std::vector<double> times{};
    std::vector<std::vector<double>> states{};
    std::vector<double> roughness{};
    std::vector<MacroWaveFit> waves{};
    IntegratorStats stats{};
    std::vector<Snapshot> snapshots{};
};

/// RMS of same-field second differences inside the patches.
double intra_patch_roughness(std::span<const double> state, const PatchLattice& lattice);
/// Least-squares fit of mean + a sin x + b cos x to the centre values of each field.
MacroWaveFit fit_macro_wave(std::span<const double> state, const PatchLattice& lattice);

RelaxationResult run_periodic_relaxation(const RelaxationConfig& cfg);

// ------------------------------------------------------------------ spectrum

struct SpectrumConfig {
    int m = 10;
    int n = 9;
    double r = 1.0 / 6.0;
    double tan_theta = 0.001;
    CouplingOrder order = CouplingOrder::Cubic;
    GhostClosure closure = GhostClosure::MacroInterpolate;
    double slow_threshold = 0.5;
    double zero_relative = 1e-6; // zero threshold relative to the Jacobian norm
};

SpectrumReport run_spectrum(const SpectrumConfig& cfg);

// ----------------------------------------------------------------- dam break

struct DamBreakConfig {
    double L = 20.0;
    double dam_position = 10.0;
    double upstream_depth = 1.0;
    double downstream_depth = 0.45;
    /// Half-width of the tanh profile; unset picks 0 for moderate drops and
    /// 2d for shallow downstream water (below 0.3).
    std::optional<double> dam_smoothing;
    Placement placement = Placement::DamInPatch;
    int m = 22;
    int n = 9;
    double r = 1.0 / 6.0;
    double tan_theta = 0.0;
    CouplingOrder order = CouplingOrder::Cubic;
    GhostClosure closure = GhostClosure::MacroInterpolate;
    BoundarySpec bc;
    std::vector<double> times{0.0, 2.0, 5.2, 7.6};
    IntegratorConfig integrator;
    /// Bore level as a fraction of the way from downstream to upstream depth.
    double bore_level = 0.25;
    std::optional<double> depth_floor;
    unsigned threads = 1;
};

/// Patch lattice with the centre offset implied by the placement.
PatchLattice dam_lattice(const DamBreakConfig& cfg);
double dam_smoothing_width(const DamBreakConfig& cfg, double micro_step);
double dam_profile(const DamBreakConfig& cfg, double width, double x);

struct DamBreakResult {
    RunMode mode = RunMode::GapTooth;
    std::vector<double> times;
    std::vector<Snapshot> snapshots;
    std::vector<double> areas;
    std::vector<double> bores;
    double wall_seconds = 0.0;
    IntegratorStats stats;
};

DamBreakResult run_dambreak(const DamBreakConfig& cfg, RunMode mode);

/// GapTooth: sum over patches of mean interior depth times D. FullDomain:
/// sum of depth slots times 2d (midpoint cells).
double water_area(const Snapshot& snap, const PatchLattice& lattice, RunMode mode);

/// Rightmost x where the depth samples cross `level` downward, linearly
/// interpolated.
double bore_position(const Snapshot& snap, double level);

struct TimingResult {
    double gap_tooth_seconds = 0.0;
    double full_domain_seconds = 0.0;
    double ratio = 0.0;
    IntegratorStats gap_tooth_stats, full_domain_stats;
    std::size_t gap_tooth_unknowns = 0, full_domain_unknowns = 0;
};

/// Integrates both modes to the last output time with cfg.integrator.
TimingResult timing_comparison(const DamBreakConfig& cfg);

// ------------------------------------------------------------------ plumbing

Snapshot gap_tooth_snapshot(std::span<const double> state, const PatchLattice& lattice);
Snapshot full_domain_snapshot(std::span<const double> state, const FullDomainSolver& solver);

} // namespace gaptooth
