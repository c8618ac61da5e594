/**
 * @file consistency.hpp
 * @brief Measured consistency orders of the gap-tooth macroscale dynamics.
 *
 * A macroscale wave (H, U) = a (sin kx, cos kx) is loaded onto a periodic
 * gap-tooth lattice, the centre-slot time derivatives are compared with the
 * same microscale stencils applied to the exact wave, and the infinity norm
 * of the difference is fitted against D on a log-log scale.
 */
#pragma once

#include "gaptooth/coupling.hpp"
#include "gaptooth/models.hpp"
#include "gaptooth/solver.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gaptooth {

enum class ProbeKind { PureWave, Dispersive, Diffusive, Nonlinear };

ProbeKind parse_probe_kind(std::string_view name);
std::string_view to_string(ProbeKind kind);
/// Unit coefficients for the dispersive/diffusive probes, c5 = 0.01 for the
/// nonlinear one.
ProbeParams default_probe_params(ProbeKind kind);
/// Expected slope: degree + 1 for the linear probes; 2 (a floor) for the
/// nonlinear probe.
double expected_slope(ProbeKind kind, CouplingOrder order);

enum class Initialisation {
    /// Project onto the slow subspace of the linearised patch dynamics that
    /// matches the macroscale values.
    SlowManifold,
    /// Own field constant per patch, conjugate field from the coupling
    /// interpolant.
    LeadingOrder,
};

Initialisation parse_initialisation(std::string_view name);

struct ResidualOptions {
    GhostClosure closure = GhostClosure::MacroInterpolate;
    Initialisation init = Initialisation::SlowManifold;
};

/// Infinity norm over patches of (gap-tooth centre derivative - discrete
/// reference derivative). Requires a periodic lattice and k a multiple of 2 pi / L.
double macroscale_residual(const ProbeParams& params, const CouplingScheme& scheme,
                           const PatchLattice& lattice, double k, double amplitude,
                           const ResidualOptions& options = {});

/// State whose centre slots equal the macro wave (exposed for testing).
std::vector<double> initial_state(const GapToothSolver& solver, double k, double amplitude,
                                  Initialisation init);

struct ConvergenceReport {
    std::string system;
    CouplingOrder order = CouplingOrder::Cubic;
    std::vector<double> macro_steps;
    std::vector<double> residuals;
    double slope = 0.0;
    double expected = 0.0;
    double fit_residual = 0.0; // RMS deviation of log residuals from the fit
    bool at_least = false;     // expected is a lower bound
    bool pass = false;
};

struct ConvergenceSetup {
    double domain_length = 6.283185307179586;
    int interior_points = 5;
    double ratio = 1.0 / 6.0;
    double wavenumber = 1.0;
    double amplitude = 1.0;
    ResidualOptions options;
};

/// Fits the final four points of the D sequence (decreasing, each giving an
/// even integer m = L/D).
ConvergenceReport run_convergence(ProbeKind kind, const ProbeParams& params, CouplingOrder order,
                                  const std::vector<double>& macro_steps, const ConvergenceSetup& setup = {});

/// Least-squares slope of log(y) against log(x) and the RMS fit residual.
std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Columns system, order, D, residual, slope.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceReport>& reports);

} // namespace gaptooth
