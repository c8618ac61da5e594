#include "gaptooth/experiments.hpp"

#include "gaptooth/eigen.hpp"
#include "gaptooth/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace gaptooth {

std::string_view to_string(RunMode mode) { return mode == RunMode::GapTooth ? "gap_tooth" : "full_domain"; }

namespace {

RhsFunction bind(const GapToothSolver& s) {
    return [&s](std::span<const double> y, double t, std::span<double> f) { s.rhs(y, t, f); };
}

RhsFunction bind(const FullDomainSolver& s) {
    return [&s](std::span<const double> y, double t, std::span<double> f) { s.rhs(y, t, f); };
}

void lattice_metadata(Snapshot& snap, const PatchLattice& lat) {
    snap.add_meta("L", format_number(lat.domain_length()));
    snap.add_meta("m", std::to_string(lat.patch_count()));
    snap.add_meta("n", std::to_string(lat.interior_points()));
    snap.add_meta("r", format_number(lat.ratio()));
    snap.add_meta("D", format_number(lat.macro_step()));
    snap.add_meta("d", format_number(lat.micro_step()));
    snap.add_meta("topology", std::string(to_string(lat.topology())));
    snap.add_meta("centre_offset", format_number(lat.centre_offset()));
}

} // namespace

Snapshot gap_tooth_snapshot(std::span<const double> state, const PatchLattice& lattice) {
    const StateLayout layout(lattice);
    Snapshot snap;
    snap.add_meta("version", std::string(kVersion));
    snap.add_meta("mode", "gap_tooth");
    lattice_metadata(snap, lattice);
    for (std::size_t q = 0; q < layout.size(); ++q) {
        const int j = layout.patch_of(q), i = layout.slot_of(q);
        snap.rows.push_back({micro_position(lattice, j, i), j, field_parity(j, i), state[q]});
    }
    return snap;
}

Snapshot full_domain_snapshot(std::span<const double> state, const FullDomainSolver& solver) {
    Snapshot snap;
    snap.add_meta("version", std::string(kVersion));
    snap.add_meta("mode", "full_domain");
    snap.add_meta("d", format_number(solver.micro_step()));
    snap.add_meta("topology", std::string(to_string(solver.topology())));
    for (std::size_t k = 0; k < state.size(); ++k)
        snap.rows.push_back({solver.position(k), 0, solver.field(k), state[k]});
    return snap;
}

// ---------------------------------------------------------------- relaxation

double intra_patch_roughness(std::span<const double> state, const PatchLattice& lattice) {
    const StateLayout layout(lattice);
    const int half = lattice.interior_half();
    double sum = 0.0;
    std::size_t count = 0;
    for (int j = 1; j <= lattice.patch_count(); ++j)
        for (int i = -half + 2; i <= half - 2; ++i) {
            const double dd = state[layout.index(j, i + 2)] - 2.0 * state[layout.index(j, i)] +
                              state[layout.index(j, i - 2)];
            sum += dd * dd;
            ++count;
        }
    return count ? std::sqrt(sum / static_cast<double>(count)) : 0.0;
}

MacroWaveFit fit_macro_wave(std::span<const double> state, const PatchLattice& lattice) {
    const MacroValues macro = gather_macro(state, lattice);
    const double k = 2.0 * std::numbers::pi / lattice.domain_length();
    double coeff[2][2] = {};
    for (int f = 0; f < 2; ++f) {
        const Field field = f == 0 ? Field::Depth : Field::Velocity;
        std::vector<int> patches;
        for (int j = 1; j <= lattice.patch_count(); ++j)
            if (lattice.centre_field(j) == field) patches.push_back(j);
        Eigen::MatrixXd a(static_cast<Eigen::Index>(patches.size()), 3);
        Eigen::VectorXd b(a.rows());
        for (Eigen::Index row = 0; row < a.rows(); ++row) {
            const int j = patches[static_cast<std::size_t>(row)];
            const double x = lattice.centre(j);
            a.row(row) << 1.0, std::sin(k * x), std::cos(k * x);
            b(row) = macro(j);
        }
        const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
        coeff[f][0] = sol(1);
        coeff[f][1] = sol(2);
    }
    MacroWaveFit fit;
    fit.depth_amplitude = std::hypot(coeff[0][0], coeff[0][1]);
    fit.velocity_amplitude = std::hypot(coeff[1][0], coeff[1][1]);
    fit.amplitude = std::hypot(fit.depth_amplitude, fit.velocity_amplitude);
    // a sin kx + b cos kx peaks where kx = atan2(a, b).
    double crest = std::atan2(coeff[0][0], coeff[0][1]) / k;
    if (crest < 0) crest += lattice.domain_length();
    fit.crest = crest;
    return fit;
}

RelaxationResult run_periodic_relaxation(const RelaxationConfig& cfg) {
    const double L = 2.0 * std::numbers::pi;
    auto lattice = PatchLattice::build(L, cfg.m, cfg.n, cfg.r, Topology::Periodic);
    SmagorinskiParams params;
    params.bed_slope = cfg.tan_theta;
    const GapToothSolver solver(lattice, {cfg.order, cfg.r, 1.0}, std::make_shared<SmagorinskiSystem>(params), {},
                                cfg.closure, cfg.threads);

    std::vector<double> y = equilibrium_state(lattice, params);
    const StateLayout layout(lattice);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t q = 0; q < y.size(); ++q) {
        const int j = layout.patch_of(q), i = layout.slot_of(q);
        if (field_parity(j, i) == Field::Depth) y[q] += cfg.macro_amplitude * std::sin(micro_position(lattice, j, i));
        y[q] += cfg.noise_amplitude * normal(rng);
    }

    IntegratorConfig ic = cfg.integrator;
    ic.output_times = cfg.times;
    const double t0 = std::min(0.0, cfg.times.front());
    Trajectory traj = cfg.times.back() > t0 ? integrate(bind(solver), y, t0, cfg.times.back(), ic)
                                           : Trajectory{{t0}, {y}, {}};

    RelaxationResult res{.lattice = lattice};
    res.times = traj.times;
    res.stats = traj.stats;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const auto& state = traj.states[s];
        res.roughness.push_back(intra_patch_roughness(state, lattice));
        res.waves.push_back(fit_macro_wave(state, lattice));
        Snapshot snap = gap_tooth_snapshot(state, lattice);
        snap.add_meta("experiment", "relax");
        snap.add_meta("t", format_number(traj.times[s]));
        snap.add_meta("tan_theta", format_number(cfg.tan_theta));
        snap.add_meta("coupling_order", std::string(to_string(cfg.order)));
        snap.add_meta("ghost_closure", std::string(to_string(cfg.closure)));
        snap.add_meta("seed", std::to_string(cfg.seed));
        snap.add_meta("noise_amplitude", format_number(cfg.noise_amplitude));
        snap.add_meta("macro_amplitude", format_number(cfg.macro_amplitude));
        snap.add_meta("integrator", std::string(to_string(ic.method)));
        snap.add_meta("rel_tol", format_number(ic.rel_tol));
        snap.add_meta("abs_tol", format_number(ic.abs_tol));
        snap.add_meta("steps", std::to_string(traj.stats.steps));
        snap.add_meta("rhs_evals", std::to_string(traj.stats.rhs_evals));
        res.snapshots.push_back(std::move(snap));
        res.states.push_back(state);
    }
    return res;
}

// ------------------------------------------------------------------ spectrum

SpectrumReport run_spectrum(const SpectrumConfig& cfg) {
    const auto lattice = PatchLattice::build(2.0 * std::numbers::pi, cfg.m, cfg.n, cfg.r, Topology::Periodic);
    SmagorinskiParams params;
    params.bed_slope = cfg.tan_theta;
    const GapToothSolver solver(lattice, {cfg.order, cfg.r, 1.0}, std::make_shared<SmagorinskiSystem>(params), {},
                                cfg.closure);
    const auto y = equilibrium_state(lattice, params);
    const Eigen::MatrixXd jac = numerical_jacobian(bind(solver), y);
    const double norm = jac.cwiseAbs().rowwise().sum().maxCoeff();
    return classify_spectrum(eigenvalues(jac), cfg.slow_threshold, cfg.zero_relative * norm);
}

// ----------------------------------------------------------------- dam break

PatchLattice dam_lattice(const DamBreakConfig& cfg) {
    // Offset 0 centres patch m/2 on L/2 when m is even; -1/2 puts a gap there.
    const bool even = cfg.m % 2 == 0;
    const bool in_patch = cfg.placement == Placement::DamInPatch;
    const double offset = (even == in_patch) ? 0.0 : -0.5;
    return PatchLattice::build(cfg.L, cfg.m, cfg.n, cfg.r, Topology::Bounded, offset);
}

double dam_smoothing_width(const DamBreakConfig& cfg, double micro_step) {
    if (cfg.dam_smoothing) return *cfg.dam_smoothing;
    return cfg.downstream_depth < 0.3 ? 2.0 * micro_step : 0.0;
}

double dam_profile(const DamBreakConfig& cfg, double width, double x) {
    const double up = cfg.upstream_depth, down = cfg.downstream_depth;
    const double s = x - cfg.dam_position;
    if (width > 0.0) return down + 0.5 * (up - down) * (1.0 - std::tanh(s / width));
    if (std::abs(s) <= 1e-12 * cfg.L) return 0.5 * (up + down);
    return s < 0.0 ? up : down;
}

namespace {

void dam_metadata(Snapshot& snap, const DamBreakConfig& cfg, RunMode mode, double width, double t,
                  const IntegratorConfig& ic) {
    snap.add_meta("experiment", mode == RunMode::GapTooth ? "dambreak" : "reference");
    snap.add_meta("t", format_number(t));
    snap.add_meta("upstream_depth", format_number(cfg.upstream_depth));
    snap.add_meta("downstream_depth", format_number(cfg.downstream_depth));
    snap.add_meta("dam_position", format_number(cfg.dam_position));
    snap.add_meta("dam_smoothing", format_number(width));
    snap.add_meta("placement", std::string(to_string(cfg.placement)));
    snap.add_meta("tan_theta", format_number(cfg.tan_theta));
    snap.add_meta("coupling_order", std::string(to_string(cfg.order)));
    snap.add_meta("ghost_closure", std::string(to_string(cfg.closure)));
    snap.add_meta("bc_left", format_end_condition(cfg.bc.left));
    snap.add_meta("bc_right", format_end_condition(cfg.bc.right));
    snap.add_meta("integrator", std::string(to_string(ic.method)));
    snap.add_meta("rel_tol", format_number(ic.rel_tol));
    snap.add_meta("abs_tol", format_number(ic.abs_tol));
}

} // namespace

DamBreakResult run_dambreak(const DamBreakConfig& cfg, RunMode mode) {
    if (!(cfg.upstream_depth > 0.0 && cfg.downstream_depth > 0.0)) throw ConfigError("depths must be positive");
    if (cfg.times.empty()) throw ConfigError("dam break needs output times");
    const PatchLattice lattice = dam_lattice(cfg);
    const double d = lattice.micro_step();
    const double width = dam_smoothing_width(cfg, d);
    SmagorinskiParams params;
    params.bed_slope = cfg.tan_theta;
    params.depth_floor = cfg.depth_floor;
    auto system = std::make_shared<SmagorinskiSystem>(params);

    IntegratorConfig ic = cfg.integrator;
    ic.output_times = cfg.times;
    const double t0 = std::min(0.0, cfg.times.front());
    const double level = cfg.downstream_depth + cfg.bore_level * (cfg.upstream_depth - cfg.downstream_depth);

    DamBreakResult res;
    res.mode = mode;
    auto finish = [&](const Trajectory& traj, auto&& make_snapshot) {
        res.times = traj.times;
        res.stats = traj.stats;
        for (std::size_t s = 0; s < traj.states.size(); ++s) {
            Snapshot snap = make_snapshot(traj.states[s]);
            dam_metadata(snap, cfg, mode, width, traj.times[s], ic);
            res.areas.push_back(water_area(snap, lattice, mode));
            // Without a drop there is no bore to track.
            const bool drop = cfg.upstream_depth > cfg.downstream_depth;
            res.bores.push_back(drop ? bore_position(snap, level) : std::nan(""));
            res.snapshots.push_back(std::move(snap));
        }
    };
    auto run = [&](const RhsFunction& f, const std::vector<double>& y0) {
        const auto start = std::chrono::steady_clock::now();
        Trajectory traj = cfg.times.back() > t0 ? integrate(f, y0, t0, cfg.times.back(), ic)
                                               : Trajectory{{t0}, {y0}, {}};
        res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return traj;
    };

    if (mode == RunMode::GapTooth) {
        const GapToothSolver solver(lattice, {cfg.order, cfg.r, 1.0}, system, cfg.bc, cfg.closure, cfg.threads);
        const StateLayout layout(lattice);
        std::vector<double> y(layout.size());
        for (std::size_t q = 0; q < y.size(); ++q) {
            const int j = layout.patch_of(q), i = layout.slot_of(q);
            y[q] = field_parity(j, i) == Field::Depth ? dam_profile(cfg, width, micro_position(lattice, j, i)) : 0.0;
        }
        const Trajectory traj = run(bind(solver), y);
        finish(traj, [&](const std::vector<double>& s) { return gap_tooth_snapshot(s, lattice); });
    } else {
        const FullDomainSolver solver(cfg.L, d, Topology::Bounded, system, cfg.bc);
        std::vector<double> y(solver.size());
        for (std::size_t k = 0; k < y.size(); ++k)
            y[k] = solver.field(k) == Field::Depth ? dam_profile(cfg, width, solver.position(k)) : 0.0;
        const Trajectory traj = run(bind(solver), y);
        finish(traj, [&](const std::vector<double>& s) { return full_domain_snapshot(s, solver); });
    }
    return res;
}

double water_area(const Snapshot& snap, const PatchLattice& lattice, RunMode mode) {
    if (mode == RunMode::FullDomain) {
        double sum = 0.0;
        for (const auto& row : snap.rows)
            if (row.field == Field::Depth) sum += row.value;
        return sum * 2.0 * lattice.micro_step();
    }
    std::vector<double> total(static_cast<std::size_t>(lattice.patch_count()), 0.0);
    std::vector<int> count(total.size(), 0);
    for (const auto& row : snap.rows) {
        if (row.field != Field::Depth) continue;
        if (!lattice.in_range(row.patch)) throw ConfigError("snapshot row outside the lattice");
        total[static_cast<std::size_t>(row.patch - 1)] += row.value;
        ++count[static_cast<std::size_t>(row.patch - 1)];
    }
    double area = 0.0;
    for (std::size_t j = 0; j < total.size(); ++j)
        if (count[j] > 0) area += total[j] / count[j] * lattice.macro_step();
    return area;
}

double bore_position(const Snapshot& snap, double level) {
    std::vector<std::pair<double, double>> samples;
    for (const auto& row : snap.rows)
        if (row.field == Field::Depth) samples.emplace_back(row.x, row.value);
    std::sort(samples.begin(), samples.end());
    for (std::size_t k = samples.size(); k-- > 1;) {
        const auto [xl, hl] = samples[k - 1];
        const auto [xr, hr] = samples[k];
        if (hl >= level && hr < level) return xl + (xr - xl) * (hl - level) / (hl - hr);
    }
    throw NumericalError("no bore: depth never crosses " + format_number(level));
}

TimingResult timing_comparison(const DamBreakConfig& cfg) {
    DamBreakConfig local = cfg;
    local.times = {cfg.times.back()};
    TimingResult out;
    const DamBreakResult gap = run_dambreak(local, RunMode::GapTooth);
    const DamBreakResult full = run_dambreak(local, RunMode::FullDomain);
    out.gap_tooth_seconds = gap.wall_seconds;
    out.full_domain_seconds = full.wall_seconds;
    out.ratio = full.wall_seconds / std::max(gap.wall_seconds, 1e-12);
    out.gap_tooth_stats = gap.stats;
    out.full_domain_stats = full.stats;
    out.gap_tooth_unknowns = gap.snapshots.front().rows.size();
    out.full_domain_unknowns = full.snapshots.front().rows.size();
    return out;
}

} // namespace gaptooth
