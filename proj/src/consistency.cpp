#include "gaptooth/consistency.hpp"

#include "gaptooth/errors.hpp"
#include "gaptooth/spectrum.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <tuple>

namespace gaptooth {

ProbeKind parse_probe_kind(std::string_view name) {
    if (name == "wave") return ProbeKind::PureWave;
    if (name == "dispersive") return ProbeKind::Dispersive;
    if (name == "diffusive") return ProbeKind::Diffusive;
    if (name == "nonlinear") return ProbeKind::Nonlinear;
    throw ConfigError("unknown probe system '" + std::string(name) + "'");
}

std::string_view to_string(ProbeKind kind) {
    switch (kind) {
    case ProbeKind::PureWave: return "wave";
    case ProbeKind::Dispersive: return "dispersive";
    case ProbeKind::Diffusive: return "diffusive";
    case ProbeKind::Nonlinear: return "nonlinear";
    }
    return "?";
}

ProbeParams default_probe_params(ProbeKind kind) {
    ProbeParams p;
    switch (kind) {
    case ProbeKind::PureWave: break;
    case ProbeKind::Dispersive: p.c11 = p.c21 = 1.0; break;
    case ProbeKind::Diffusive: p.c3 = p.c4 = 1.0; break;
    case ProbeKind::Nonlinear: p.c5 = 0.01; break;
    }
    return p;
}

double expected_slope(ProbeKind kind, CouplingOrder order) {
    if (kind == ProbeKind::Nonlinear) return 2.0;
    return degree(order) + 1.0;
}

Initialisation parse_initialisation(std::string_view name) {
    if (name == "slow_manifold") return Initialisation::SlowManifold;
    if (name == "leading_order") return Initialisation::LeadingOrder;
    throw ConfigError("unknown initialisation '" + std::string(name) + "'");
}

namespace {

struct Wave {
    double k, a;
    double operator()(Field f, double x) const {
        return f == Field::Depth ? a * std::sin(k * x) : a * std::cos(k * x);
    }
};

MacroValues macro_wave(const PatchLattice& lattice, const Wave& wave) {
    MacroValues macro;
    for (int j = 1; j <= lattice.patch_count(); ++j)
        macro.values.push_back(wave(lattice.centre_field(j), lattice.centre(j)));
    return macro;
}

std::vector<double> sampled_state(const PatchLattice& lattice, const Wave& wave) {
    const StateLayout layout(lattice);
    std::vector<double> y(layout.size());
    for (std::size_t q = 0; q < y.size(); ++q) {
        const int j = layout.patch_of(q), i = layout.slot_of(q);
        y[q] = wave(field_parity(j, i), micro_position(lattice, j, i));
    }
    return y;
}

std::vector<double> leading_order_state(const GapToothSolver& solver, const Wave& wave) {
    const auto& lattice = solver.lattice();
    const StateLayout layout(lattice);
    const MacroValues macro = macro_wave(lattice, wave);
    const int e = lattice.edge_slot();
    std::vector<double> y(layout.size());
    for (std::size_t q = 0; q < y.size(); ++q) {
        const int j = layout.patch_of(q), i = layout.slot_of(q);
        if (field_parity(j, i) == lattice.centre_field(j)) {
            y[q] = macro(j);
        } else {
            const auto w = stencil_weights(solver.scheme(), Side::Plus, static_cast<double>(i) / e);
            y[q] = w.apply([&](int off) { return macro_at(macro, lattice, j + off, std::nullopt); });
        }
    }
    return y;
}

// Orthonormal basis of the invariant subspace belonging to the m eigenvalues
// nearest a small negative shift, by block inverse iteration.
Eigen::MatrixXd slow_basis(const Eigen::MatrixXd& a, Eigen::Index dim) {
    const Eigen::Index n = a.rows();
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    const double shift = -1e-3 * std::max(1.0, 1e-3 * norm);
    Eigen::MatrixXd shifted = a;
    shifted.diagonal().array() -= shift;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);

    std::mt19937_64 rng(20240521);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd q(n, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < n; ++r) q(r, c) = normal(rng);
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, dim);

    for (int it = 0; it < 2000; ++it) {
        Eigen::MatrixXd z = lu.solve(q);
        Eigen::MatrixXd qn = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() *
                             Eigen::MatrixXd::Identity(n, dim);
        const double change = (qn - q * (q.transpose() * qn)).norm();
        q = std::move(qn);
        if (change < 1e-13) return q;
    }
    throw NumericalError("slow subspace iteration did not converge");
}

} // namespace

std::vector<double> initial_state(const GapToothSolver& solver, double k, double amplitude,
                                  Initialisation init) {
    const auto& lattice = solver.lattice();
    const Wave wave{k, amplitude};
    if (k == 0.0) return sampled_state(lattice, wave); // uniform state, exact at every order
    if (init == Initialisation::LeadingOrder) return leading_order_state(solver, wave);

    const StateLayout layout(lattice);
    const std::size_t n = layout.size();
    const int m = lattice.patch_count();
    const std::vector<double> zero(n, 0.0);
    const Eigen::MatrixXd a = numerical_jacobian(
        [&](std::span<const double> y, double t, std::span<double> f) { solver.rhs(y, t, f); }, zero);
    const Eigen::MatrixXd v = slow_basis(a, m);

    Eigen::MatrixXd cv(m, m);
    Eigen::VectorXd target(m);
    const MacroValues macro = macro_wave(lattice, wave);
    for (int j = 1; j <= m; ++j) {
        cv.row(j - 1) = v.row(static_cast<Eigen::Index>(layout.index(j, 0)));
        target(j - 1) = macro(j);
    }
    const Eigen::VectorXd y = v * cv.fullPivLu().solve(target);
    return {y.data(), y.data() + y.size()};
}

double macroscale_residual(const ProbeParams& params, const CouplingScheme& scheme,
                           const PatchLattice& lattice, double k, double amplitude,
                           const ResidualOptions& options) {
    if (lattice.topology() != Topology::Periodic)
        throw ConfigError("consistency residual needs a periodic lattice");
    const double cycles = k * lattice.domain_length() / (2.0 * std::numbers::pi);
    if (std::abs(cycles - std::round(cycles)) > 1e-9)
        throw ConfigError("wavenumber is not resonant with the periodic domain");

    auto system = std::make_shared<ProbeSystem>(params);
    const GapToothSolver solver(lattice, scheme, system, {}, options.closure);
    const std::vector<double> y = initial_state(solver, k, amplitude, options.init);
    const std::vector<double> f = solver.rhs(y);

    const StateLayout layout(lattice);
    const Wave wave{k, amplitude};
    const double d = lattice.micro_step();
    double worst = 0.0;
    for (int j = 1; j <= lattice.patch_count(); ++j) {
        // Reference: the same stencil applied to the exact wave.
        PatchFields exact(j, -3, 3);
        for (int i = -3; i <= 3; ++i) exact[i] = wave(exact.field(i), micro_position(lattice, j, i));
        double ref = 0.0;
        system->evaluate(exact, d, 0, 0, std::span<double>(&ref, 1));
        worst = std::max(worst, std::abs(f[layout.index(j, 0)] - ref));
    }
    return worst;
}

std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs matching samples");
    const double tiny = 1e-300;
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::max(y[i], tiny));
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += std::pow(ly[i] - icpt - slope * lx[i], 2);
    return {slope, std::sqrt(ss / n)};
}

ConvergenceReport run_convergence(ProbeKind kind, const ProbeParams& params, CouplingOrder order,
                                  const std::vector<double>& macro_steps, const ConvergenceSetup& setup) {
    if (macro_steps.size() < 4) throw ConfigError("convergence study needs at least 4 D values");
    for (std::size_t i = 1; i < macro_steps.size(); ++i)
        if (!(macro_steps[i] < macro_steps[i - 1])) throw ConfigError("D sequence must decrease");

    ConvergenceReport rep;
    rep.system = std::string(to_string(kind));
    rep.order = order;
    rep.expected = expected_slope(kind, order);
    rep.at_least = kind == ProbeKind::Nonlinear;
    for (double D : macro_steps) {
        const double mreal = setup.domain_length / D;
        const int m = static_cast<int>(std::lround(mreal));
        if (std::abs(mreal - m) > 1e-8 * mreal || m % 2 != 0)
            throw ConfigError("D must give an even whole number of patches");
        const auto lattice =
            PatchLattice::build(setup.domain_length, m, setup.interior_points, setup.ratio, Topology::Periodic);
        const CouplingScheme scheme{order, setup.ratio, 1.0};
        rep.macro_steps.push_back(lattice.macro_step());
        rep.residuals.push_back(
            macroscale_residual(params, scheme, lattice, setup.wavenumber, setup.amplitude, setup.options));
    }
    const std::vector<double> xs(rep.macro_steps.end() - 4, rep.macro_steps.end());
    const std::vector<double> ys(rep.residuals.end() - 4, rep.residuals.end());
    std::tie(rep.slope, rep.fit_residual) = loglog_slope(xs, ys);
    rep.pass = rep.at_least ? rep.slope >= rep.expected - 0.3 : std::abs(rep.slope - rep.expected) <= 0.3;
    return rep;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports) {
    const auto old = os.precision(17);
    os << "system,order,D,residual,slope\n";
    for (const auto& r : reports)
        for (std::size_t i = 0; i < r.macro_steps.size(); ++i)
            os << r.system << ',' << to_string(r.order) << ',' << r.macro_steps[i] << ',' << r.residuals[i]
               << ',' << r.slope << '\n';
    os.precision(old);
}

} // namespace gaptooth
