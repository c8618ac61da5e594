/**
 * @file integrator.hpp
 * @brief Method-of-lines time integration with error control.
 *
 * AdaptiveExplicitRK45 is the Dormand-Prince 5(4) pair with a PI step
 * controller and continuous output. ImplicitTrapezoidal is the A-stable
 * trapezoidal rule, solved by modified Newton on a dense finite-difference
 * Jacobian, with a step-halving (Richardson) error estimate and cubic
 * Hermite output.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace gaptooth {

using RhsFunction = std::function<void(std::span<const double> y, double t, std::span<double> dydt)>;

enum class Method { AdaptiveExplicitRK45, ImplicitTrapezoidal };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

struct IntegratorConfig {
    Method method = Method::AdaptiveExplicitRK45;
    double rel_tol = 1e-7;
    double abs_tol = 1e-9;
    double max_step = 0.0;     // 0: unlimited
    double initial_step = 0.0; // 0: automatic
    /// Forces constant steps of this size with no error control.
    double fixed_step = 0.0;
    std::vector<double> output_times;
    std::size_t max_steps = 10'000'000;
};

struct IntegratorStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
    std::size_t jacobian_evals = 0;
    std::size_t factorizations = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    IntegratorStats stats;
};

/// Integrates from span_start to the last output time. Output times must be
/// strictly increasing and lie within [span_start, span_end].
Trajectory integrate(const RhsFunction& rhs, std::vector<double> y0, double span_start, double span_end,
                     const IntegratorConfig& cfg);

} // namespace gaptooth
