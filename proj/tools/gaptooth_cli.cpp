// Command-line front end for the gap-tooth experiments.
//
//   gaptooth relax|spectrum|dambreak|reference|consistency|timing [flags]
//
// Every config key is also a flag (--m 22, --times 0,2,4, ...). Values from
// --config <file> are read first and flags override them.

#include "gaptooth/config.hpp"
#include "gaptooth/consistency.hpp"
#include "gaptooth/errors.hpp"
#include "gaptooth/experiments.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

namespace fs = std::filesystem;
using namespace gaptooth;

namespace {

struct Extras {
    unsigned threads = 1;
    double noise = 0.02;
    double amplitude = 0.2;
    std::string method;
    double bore_level = 0.25;
    std::string probe = "all";
    std::string m_sequence = "8,16,32,64";
    std::string init = "slow_manifold";
    double depth_floor = 0.0;
};

fs::path out_dir(const RunConfig& rc) {
    fs::path dir = rc.out_dir.value_or(".");
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    return os;
}

std::string time_tag(double t) { return "t" + format_number(t); }

IntegratorConfig integrator_from(const RunConfig& rc, const Extras& ex, Method fallback) {
    IntegratorConfig ic;
    ic.method = ex.method.empty() ? fallback : parse_method(ex.method);
    if (rc.rel_tol) ic.rel_tol = *rc.rel_tol;
    if (rc.abs_tol) ic.abs_tol = *rc.abs_tol;
    return ic;
}

void write_run_info(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& items) {
    auto os = open_out(path);
    os << "version: " << kVersion << '\n';
    for (const auto& [k, v] : items) os << k << ": " << v << '\n';
}

void check_periodic(const RunConfig& rc) {
    if (rc.topology && *rc.topology != Topology::Periodic) throw ConfigError("this experiment needs topology=periodic");
}

int cmd_relax(const RunConfig& rc, const Extras& ex) {
    check_periodic(rc);
    RelaxationConfig cfg;
    if (rc.m) cfg.m = *rc.m;
    if (rc.n) cfg.n = *rc.n;
    if (rc.r) cfg.r = *rc.r;
    if (rc.tan_theta) cfg.tan_theta = *rc.tan_theta;
    if (rc.coupling_order) cfg.order = *rc.coupling_order;
    if (rc.ghost_closure) cfg.closure = *rc.ghost_closure;
    if (rc.seed) cfg.seed = *rc.seed;
    if (rc.times) cfg.times = *rc.times;
    cfg.noise_amplitude = ex.noise;
    cfg.macro_amplitude = ex.amplitude;
    cfg.threads = ex.threads;
    cfg.integrator = integrator_from(rc, ex, Method::AdaptiveExplicitRK45);

    const auto res = run_periodic_relaxation(cfg);
    const fs::path dir = out_dir(rc);
    for (std::size_t s = 0; s < res.times.size(); ++s) {
        auto os = open_out(dir / ("relax_" + time_tag(res.times[s]) + ".csv"));
        write_snapshot(os, res.snapshots[s]);
    }
    auto os = open_out(dir / "relax_summary.csv");
    os << "t,roughness,amplitude,depth_amplitude,velocity_amplitude,crest\n";
    for (std::size_t s = 0; s < res.times.size(); ++s) {
        const auto& w = res.waves[s];
        os << format_number(res.times[s]) << ',' << format_number(res.roughness[s]) << ','
           << format_number(w.amplitude) << ',' << format_number(w.depth_amplitude) << ','
           << format_number(w.velocity_amplitude) << ',' << format_number(w.crest) << '\n';
        std::cout << "t=" << res.times[s] << "  roughness=" << res.roughness[s] << "  amplitude=" << w.amplitude
                  << "  crest=" << w.crest << '\n';
    }
    return 0;
}

int cmd_spectrum(const RunConfig& rc, const Extras&) {
    check_periodic(rc);
    SpectrumConfig cfg;
    if (rc.m) cfg.m = *rc.m;
    if (rc.n) cfg.n = *rc.n;
    if (rc.r) cfg.r = *rc.r;
    if (rc.tan_theta) cfg.tan_theta = *rc.tan_theta;
    if (rc.coupling_order) cfg.order = *rc.coupling_order;
    if (rc.ghost_closure) cfg.closure = *rc.ghost_closure;
    const auto rep = run_spectrum(cfg);
    auto os = open_out(out_dir(rc) / "spectrum.csv");
    write_spectrum_csv(os, rep);
    std::cout << "eigenvalues=" << rep.eigenvalues.size() << "  zero=" << rep.zero_modes()
              << "  slow=" << rep.slow_set.size() << "  fast=" << rep.fast_set.size()
              << "  gap_ratio=" << rep.gap_ratio << '\n';
    for (auto k : rep.slow_set) std::cout << "  slow " << rep.eigenvalues[k] << '\n';
    return 0;
}

DamBreakConfig dam_config(const RunConfig& rc, const Extras& ex, Method fallback) {
    DamBreakConfig cfg;
    if (rc.topology && *rc.topology != Topology::Bounded) throw ConfigError("dam break needs topology=bounded");
    if (rc.downstream_depth) cfg.downstream_depth = *rc.downstream_depth;
    if (cfg.downstream_depth < 0.3) {
        // Shallow case: r = 1/8 and d = 1/20 with ten patches.
        cfg.m = 10;
        cfg.r = 1.0 / 8.0;
        cfg.times = {0.0, 2.4, 4.0, 6.6};
    }
    if (rc.L) {
        cfg.L = *rc.L;
        cfg.dam_position = cfg.L / 2.0;
    }
    if (rc.m) cfg.m = *rc.m;
    if (rc.n) cfg.n = *rc.n;
    if (rc.r) cfg.r = *rc.r;
    if (rc.tan_theta) cfg.tan_theta = *rc.tan_theta;
    if (rc.coupling_order) cfg.order = *rc.coupling_order;
    if (rc.ghost_closure) cfg.closure = *rc.ghost_closure;
    if (rc.bc_left) cfg.bc.left = *rc.bc_left;
    if (rc.bc_right) cfg.bc.right = *rc.bc_right;
    if (rc.dam_smoothing) cfg.dam_smoothing = *rc.dam_smoothing;
    if (rc.placement) cfg.placement = *rc.placement;
    if (rc.times) cfg.times = *rc.times;
    cfg.integrator = integrator_from(rc, ex, fallback);
    cfg.bore_level = ex.bore_level;
    if (ex.depth_floor > 0.0) cfg.depth_floor = ex.depth_floor;
    cfg.threads = ex.threads;
    return cfg;
}

int cmd_dambreak(const RunConfig& rc, const Extras& ex, RunMode mode) {
    const DamBreakConfig cfg = dam_config(rc, ex, Method::AdaptiveExplicitRK45);
    const auto res = run_dambreak(cfg, mode);
    const fs::path dir = out_dir(rc);
    const std::string prefix = mode == RunMode::GapTooth ? "dambreak" : "reference";
    for (std::size_t s = 0; s < res.times.size(); ++s) {
        auto os = open_out(dir / (prefix + "_" + time_tag(res.times[s]) + ".csv"));
        write_snapshot(os, res.snapshots[s]);
    }
    auto os = open_out(dir / (prefix + "_series.csv"));
    os << "t,area,bore\n";
    for (std::size_t s = 0; s < res.times.size(); ++s) {
        os << format_number(res.times[s]) << ',' << format_number(res.areas[s]) << ','
           << format_number(res.bores[s]) << '\n';
        std::cout << "t=" << res.times[s] << "  area=" << res.areas[s] << "  bore=" << res.bores[s] << '\n';
    }
    write_run_info(dir / (prefix + "_run_info.txt"),
                   {{"mode", std::string(to_string(mode))},
                    {"wall_seconds", format_number(res.wall_seconds)},
                    {"steps", std::to_string(res.stats.steps)},
                    {"rejected", std::to_string(res.stats.rejected)},
                    {"rhs_evals", std::to_string(res.stats.rhs_evals)}});
    std::cout << "wall time " << res.wall_seconds << " s\n";
    return 0;
}

std::vector<double> parse_list(const std::string& text) { return parse_times(text); }

int cmd_consistency(const RunConfig& rc, const Extras& ex) {
    check_periodic(rc);
    ConvergenceSetup setup;
    if (rc.L) setup.domain_length = *rc.L;
    if (rc.n) setup.interior_points = *rc.n;
    if (rc.r) setup.ratio = *rc.r;
    if (rc.ghost_closure) setup.options.closure = *rc.ghost_closure;
    setup.options.init = parse_initialisation(ex.init);
    std::vector<double> steps;
    for (double m : parse_list(ex.m_sequence)) steps.push_back(setup.domain_length / m);

    std::vector<std::pair<ProbeKind, CouplingOrder>> runs;
    if (ex.probe == "all") {
        runs = {{ProbeKind::PureWave, CouplingOrder::Linear}, {ProbeKind::PureWave, CouplingOrder::Cubic},
                {ProbeKind::PureWave, CouplingOrder::Quintic}, {ProbeKind::Dispersive, CouplingOrder::Cubic},
                {ProbeKind::Diffusive, CouplingOrder::Cubic}, {ProbeKind::Nonlinear, CouplingOrder::Cubic}};
    } else {
        runs = {{parse_probe_kind(ex.probe), rc.coupling_order.value_or(CouplingOrder::Cubic)}};
    }
    std::vector<ConvergenceReport> reports;
    for (const auto& [kind, order] : runs) {
        reports.push_back(run_convergence(kind, default_probe_params(kind), order, steps, setup));
        const auto& r = reports.back();
        std::cout << r.system << ' ' << to_string(order) << "  slope=" << r.slope << "  expected"
                  << (r.at_least ? ">=" : "=") << r.expected << "  " << (r.pass ? "ok" : "off") << '\n';
    }
    auto os = open_out(out_dir(rc) / "consistency.csv");
    write_convergence_csv(os, reports);
    return 0;
}

int cmd_timing(const RunConfig& rc, const Extras& ex) {
    RunConfig local = rc;
    if (!local.rel_tol) local.rel_tol = 1e-4;
    if (!local.abs_tol) local.abs_tol = 1e-6;
    const DamBreakConfig cfg = dam_config(local, ex, Method::ImplicitTrapezoidal);
    const auto t = timing_comparison(cfg);
    auto os = open_out(out_dir(rc) / "timing.csv");
    os << "mode,unknowns,seconds,steps,rhs_evals,jacobians,factorizations\n";
    auto row = [&](const char* name, std::size_t n, double s, const IntegratorStats& st) {
        os << name << ',' << n << ',' << format_number(s) << ',' << st.steps << ',' << st.rhs_evals << ','
           << st.jacobian_evals << ',' << st.factorizations << '\n';
    };
    row("gap_tooth", t.gap_tooth_unknowns, t.gap_tooth_seconds, t.gap_tooth_stats);
    row("full_domain", t.full_domain_unknowns, t.full_domain_seconds, t.full_domain_stats);
    std::cout << "gap-tooth " << t.gap_tooth_seconds << " s, full domain " << t.full_domain_seconds
              << " s, ratio " << t.ratio << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gap-tooth patch simulations of turbulent shallow-water flow"};
    app.require_subcommand(1);
    std::string config_file;
    app.add_option("--config", config_file, "key=value configuration file");

    ConfigMap flags;
    Extras ex;
    for (auto key : config_keys()) {
        const std::string k(key);
        app.add_option_function<std::string>("--" + k, [&flags, k](const std::string& v) { flags[k] = v; },
                                             "override config key " + k);
    }
    app.add_option("--threads", ex.threads, "worker threads for the patch phase")->check(CLI::Range(1u, 256u));
    app.add_option("--method", ex.method, "integrator: rk45 or trapezoidal");
    app.fallthrough();

    auto* relax = app.add_subcommand("relax", "periodic relaxation of a macroscale wave plus micro noise");
    relax->add_option("--noise", ex.noise, "micro noise standard deviation");
    relax->add_option("--amplitude", ex.amplitude, "macroscale depth wave amplitude");
    app.add_subcommand("spectrum", "eigenvalues of the linearised gap-tooth system");
    auto* dam = app.add_subcommand("dambreak", "gap-tooth dam break");
    auto* ref = app.add_subcommand("reference", "full-domain dam break");
    for (auto* sc : {dam, ref}) {
        sc->add_option("--bore_level", ex.bore_level, "bore level as a fraction from downstream to upstream depth");
        sc->add_option("--depth_floor", ex.depth_floor, "clamp depths used in divisions");
    }
    auto* cons = app.add_subcommand("consistency", "measured consistency orders of the probe systems");
    cons->add_option("--probe", ex.probe, "wave, dispersive, diffusive, nonlinear or all");
    cons->add_option("--m_sequence", ex.m_sequence, "patch counts, comma separated");
    cons->add_option("--init", ex.init, "slow_manifold or leading_order");
    auto* timing = app.add_subcommand("timing", "wall time of gap-tooth against full-domain dam break");
    timing->add_option("--bore_level", ex.bore_level);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ConfigMap merged = config_file.empty() ? ConfigMap{} : load_config_file(config_file);
        for (const auto& [k, v] : flags) merged[k] = v;
        const RunConfig rc = to_run_config(merged);
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "relax") return cmd_relax(rc, ex);
        if (name == "spectrum") return cmd_spectrum(rc, ex);
        if (name == "dambreak") return cmd_dambreak(rc, ex, RunMode::GapTooth);
        if (name == "reference") return cmd_dambreak(rc, ex, RunMode::FullDomain);
        if (name == "consistency") return cmd_consistency(rc, ex);
        if (name == "timing") return cmd_timing(rc, ex);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
