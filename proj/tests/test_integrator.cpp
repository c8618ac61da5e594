#include <doctest.h>

#include "gaptooth/errors.hpp"
#include "gaptooth/integrator.hpp"

#include <cmath>
#include <numbers>

using namespace gaptooth;

namespace {

void decay(std::span<const double> y, double, std::span<double> f) { f[0] = -y[0]; }

void rotation(std::span<const double> y, double, std::span<double> f) {
    f[0] = -200.0 * y[1];
    f[1] = 200.0 * y[0];
}

double fixed_step_error(Method method, double h) {
    IntegratorConfig cfg;
    cfg.method = method;
    cfg.fixed_step = h;
    const auto tr = integrate(decay, {1.0}, 0.0, 1.0, cfg);
    return std::abs(tr.states.back()[0] - std::exp(-1.0));
}

} // namespace

TEST_CASE("exponential decay for both methods") {
    for (auto method : {Method::AdaptiveExplicitRK45, Method::ImplicitTrapezoidal}) {
        IntegratorConfig cfg;
        cfg.method = method;
        cfg.rel_tol = 1e-8;
        cfg.abs_tol = 1e-10;
        cfg.output_times = {0.0, 0.5, 1.0};
        const auto tr = integrate(decay, {1.0}, 0.0, 1.0, cfg);
        REQUIRE(tr.times.size() == 3);
        CHECK(tr.times[1] == 0.5);
        CHECK(tr.states[0][0] == 1.0);
        CHECK(tr.states[1][0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
        CHECK(tr.states[2][0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
        CHECK(tr.stats.steps > 0);
        CHECK(tr.stats.rhs_evals > tr.stats.steps);
    }
}

TEST_CASE("a constant state stays put") {
    auto zero = [](std::span<const double>, double, std::span<double> f) {
        for (double& v : f) v = 0.0;
    };
    for (auto method : {Method::AdaptiveExplicitRK45, Method::ImplicitTrapezoidal}) {
        IntegratorConfig cfg;
        cfg.method = method;
        const auto tr = integrate(zero, {1.5, -2.0}, 0.0, 10.0, cfg);
        CHECK(tr.states.back() == std::vector<double>{1.5, -2.0});
    }
}

TEST_CASE("fast rotation returns after one period") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-9;
    cfg.abs_tol = 1e-12;
    const double period = 2 * std::numbers::pi / 200.0;
    const auto tr = integrate(rotation, {1.0, 0.0}, 0.0, period, cfg);
    CHECK(tr.states.back()[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(std::abs(tr.states.back()[1]) <= 1e-7);
}

TEST_CASE("implicit trapezoidal preserves the norm of a rotation") {
    IntegratorConfig cfg;
    cfg.method = Method::ImplicitTrapezoidal;
    cfg.fixed_step = 0.05; // h omega = 10, far outside any explicit stability region
    const auto tr = integrate(rotation, {1.0, 0.0}, 0.0, 1.0, cfg);
    const auto& y = tr.states.back();
    CHECK(std::hypot(y[0], y[1]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("convergence order under step halving") {
    const double rk_ratio = fixed_step_error(Method::AdaptiveExplicitRK45, 0.1) /
                            fixed_step_error(Method::AdaptiveExplicitRK45, 0.05);
    CHECK(std::log2(rk_ratio) >= 4.0);
    CHECK(std::log2(rk_ratio) <= 5.5);
    const double tr_ratio = fixed_step_error(Method::ImplicitTrapezoidal, 0.1) /
                            fixed_step_error(Method::ImplicitTrapezoidal, 0.05);
    CHECK(std::log2(tr_ratio) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("tighter tolerances reduce the error") {
    for (auto method : {Method::AdaptiveExplicitRK45, Method::ImplicitTrapezoidal}) {
        double previous = 1.0;
        for (double tol : {1e-3, 1e-5, 1e-7}) {
            IntegratorConfig cfg;
            cfg.method = method;
            cfg.rel_tol = tol;
            cfg.abs_tol = tol;
            const auto tr = integrate(rotation, {1.0, 0.0}, 0.0, 0.1, cfg);
            const double err = std::hypot(tr.states.back()[0] - std::cos(20.0),
                                          tr.states.back()[1] - std::sin(20.0));
            CHECK(err < previous);
            previous = err;
        }
    }
}

TEST_CASE("stiff decay: implicit takes far fewer steps") {
    auto stiff = [](std::span<const double> y, double t, std::span<double> f) {
        f[0] = -1000.0 * (y[0] - std::cos(t));
    };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-4;
    cfg.abs_tol = 1e-6;
    const auto explicit_run = integrate(stiff, {1.0}, 0.0, 5.0, cfg);
    cfg.method = Method::ImplicitTrapezoidal;
    const auto implicit_run = integrate(stiff, {1.0}, 0.0, 5.0, cfg);
    CHECK(implicit_run.stats.steps * 5 < explicit_run.stats.steps);
    CHECK(implicit_run.states.back()[0] == doctest::Approx(std::cos(5.0)).epsilon(1e-2));
}

TEST_CASE("input validation and failures") {
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate(decay, {1.0}, 1.0, 1.0, cfg), ConfigError);
    cfg.output_times = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(integrate(decay, {1.0}, 0.0, 1.0, cfg), ConfigError);
    cfg.output_times = {0.0, 2.0};
    CHECK_THROWS_AS(integrate(decay, {1.0}, 0.0, 1.0, cfg), ConfigError);
    cfg.output_times = {};
    cfg.rel_tol = -1.0;
    CHECK_THROWS_AS(integrate(decay, {1.0}, 0.0, 1.0, cfg), ConfigError);
    CHECK_THROWS_AS(parse_method("euler"), ConfigError);
    CHECK(parse_method("trapezoidal") == Method::ImplicitTrapezoidal);

    // y' = y^2 from y = 1 blows up at t = 1.
    auto blowup = [](std::span<const double> y, double, std::span<double> f) { f[0] = y[0] * y[0]; };
    for (auto method : {Method::AdaptiveExplicitRK45, Method::ImplicitTrapezoidal}) {
        IntegratorConfig c;
        c.method = method;
        CHECK_THROWS_AS(integrate(blowup, {1.0}, 0.0, 2.0, c), NumericalError);
    }
}
