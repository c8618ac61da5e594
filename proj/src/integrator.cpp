#include "gaptooth/integrator.hpp"

#include "gaptooth/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace gaptooth {

Method parse_method(std::string_view name) {
    if (name == "rk45") return Method::AdaptiveExplicitRK45;
    if (name == "trapezoidal") return Method::ImplicitTrapezoidal;
    throw ConfigError("unknown integration method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) {
    return method == Method::AdaptiveExplicitRK45 ? "rk45" : "trapezoidal";
}

namespace {

using Vec = Eigen::VectorXd;

struct Rhs {
    const RhsFunction& fn;
    IntegratorStats& stats;
    void operator()(const Vec& y, double t, Vec& out) const {
        out.resize(y.size());
        fn(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())), t,
           std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
        ++stats.rhs_evals;
        if (!out.allFinite()) {
            std::ostringstream msg;
            msg << "non-finite derivative at t=" << t;
            throw NumericalError(msg.str());
        }
    }
};

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
    const Vec scale = atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
    return std::sqrt((err.array() / scale.array()).square().mean());
}

void check_config(const IntegratorConfig& cfg, double t0, double t1) {
    if (!(t1 > t0)) throw ConfigError("integration span must be nonempty");
    if (cfg.fixed_step <= 0.0 && !(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0))
        throw ConfigError("tolerances must be positive");
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : cfg.output_times) {
        if (!(t > prev)) throw ConfigError("output times must be strictly increasing");
        if (t < t0 || t > t1) throw ConfigError("output time outside the integration span");
        prev = t;
    }
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

[[noreturn]] void underflow(double t, double h, double stiffness) {
    std::ostringstream msg;
    msg << "step size underflow at t=" << t << " (h=" << h << ", stiffness estimate " << stiffness << ")";
    throw NumericalError(msg.str());
}

// Dormand-Prince 5(4) with Shampine's continuous extension.
class DormandPrince {
public:
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    static constexpr double e[7] = {-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920,
                                    17253.0 / 339200, -22.0 / 525, 1.0 / 40};
    static constexpr double p[7][4] = {
        {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
        {0.0, 0.0, 0.0, 0.0},
        {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
        {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
        {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
        {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
        {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
    };
};

Trajectory run_rk45(const RhsFunction& fn, Vec y, double t0, double t1, const IntegratorConfig& cfg) {
    using DP = DormandPrince;
    Trajectory out;
    Rhs f{fn, out.stats};
    const Eigen::Index N = y.size();
    std::vector<Vec> k(7, Vec(N));
    Vec ytmp(N), ynew(N), err(N);
    double t = t0;
    f(y, t, k[0]);

    const bool fixed = cfg.fixed_step > 0.0;
    const double hmax = cfg.max_step > 0.0 ? cfg.max_step : (t1 - t0);
    double h = fixed ? cfg.fixed_step : cfg.initial_step;
    if (!fixed && h <= 0.0) {
        // Starting step from the size of y and y'.
        const Vec scale = cfg.abs_tol + cfg.rel_tol * y.cwiseAbs().array();
        const double d0 = std::sqrt((y.array() / scale.array()).square().mean());
        const double d1 = std::sqrt((k[0].array() / scale.array()).square().mean());
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, hmax);
    }

    std::size_t next_out = 0;
    const auto& outs = cfg.output_times;
    auto emit_before = [&](double t_end, auto&& dense) {
        while (next_out < outs.size() && outs[next_out] <= t_end) {
            out.times.push_back(outs[next_out]);
            out.states.push_back(to_std(dense(outs[next_out])));
            ++next_out;
        }
    };
    emit_before(t, [&](double) { return y; });

    double err_prev = 1e-4;
    const double eps = std::numeric_limits<double>::epsilon();
    while (t < t1 && next_out < outs.size()) {
        if (out.stats.steps + out.stats.rejected >= cfg.max_steps)
            throw NumericalError("maximum number of steps exceeded at t=" + std::to_string(t));
        bool last = false;
        if (t + h >= t1 - 16 * eps * std::abs(t1)) {
            h = t1 - t;
            last = true;
        }
        if (h < 16 * eps * std::max(std::abs(t), 1.0)) underflow(t, h, (k[0].norm() / std::max(y.norm(), 1e-300)));

        for (int s = 1; s < 7; ++s) {
            ytmp = y;
            for (int r = 0; r < s; ++r)
                if (DP::a[s][r] != 0.0) ytmp.noalias() += h * DP::a[s][r] * k[static_cast<std::size_t>(r)];
            f(ytmp, t + DP::c[s] * h, k[static_cast<std::size_t>(s)]);
        }
        ynew = ytmp; // stage 7 point is the 5th-order solution (FSAL)
        err.setZero();
        for (int s = 0; s < 7; ++s) err.noalias() += h * DP::e[s] * k[static_cast<std::size_t>(s)];

        double en = fixed ? 0.0 : error_norm(err, y, ynew, cfg.rel_tol, cfg.abs_tol);
        if (!fixed && !(en <= 1.0)) {
            ++out.stats.rejected;
            const double factor = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
            h *= factor;
            continue;
        }

        const double t_new = last ? t1 : t + h;
        emit_before(t_new, [&](double tq) {
            const double theta = (tq - t) / h;
            const double q[4] = {theta, theta * theta, theta * theta * theta, theta * theta * theta * theta};
            Vec v = y;
            for (int s = 0; s < 7; ++s) {
                double w = 0.0;
                for (int r = 0; r < 4; ++r) w += DP::p[s][r] * q[r];
                if (w != 0.0) v.noalias() += h * w * k[static_cast<std::size_t>(s)];
            }
            return v;
        });
        ++out.stats.steps;
        y.swap(ynew);
        std::swap(k[0], k[6]);
        t = t_new;

        if (!fixed) {
            // PI controller on the accepted-step error history.
            en = std::max(en, 1e-10);
            double factor = 0.9 * std::pow(en, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            factor = std::clamp(factor, 0.2, 10.0);
            err_prev = en;
            h = std::min(h * factor, hmax);
        }
    }
    return out;
}

class TrapezoidalStepper {
public:
    TrapezoidalStepper(const Rhs& f, Eigen::Index n, double rtol, double atol)
        : f_(f), n_(n), J_(n, n), rtol_(rtol), atol_(atol) {}

    void refresh_jacobian(const Vec& y, double t, const Vec& fy) {
        Vec yp = y, fp(n_);
        const double sq = std::sqrt(std::numeric_limits<double>::epsilon());
        for (Eigen::Index c = 0; c < n_; ++c) {
            const double hc = sq * std::max(std::abs(y(c)), 1.0);
            yp(c) = y(c) + hc;
            f_(yp, t, fp);
            J_.col(c) = (fp - fy) / hc;
            yp(c) = y(c);
        }
        ++f_.stats.jacobian_evals;
        fresh_ = true;
        cache_.clear();
    }

    bool fresh() const { return fresh_; }
    void mark_used() { fresh_ = false; }

    // Solves y1 = y0 + h/2 (f0 + f(y1)); returns false when Newton stalls.
    bool step(const Vec& y0, const Vec& f0, double t0, double h, Vec& y1, Vec& f1) {
        const auto& lu = factor(h);
        y1 = y0 + h * f0; // explicit Euler predictor
        // Converge well inside the local error tolerance.
        const double tol = 1e-3 * (atol_ + rtol_ * y0.lpNorm<Eigen::Infinity>());
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 10; ++it) {
            f_(y1, t0 + h, f1);
            const Vec g = y1 - y0 - 0.5 * h * (f0 + f1);
            const Vec dy = lu.solve(-g);
            y1 += dy;
            const double nd = dy.lpNorm<Eigen::Infinity>();
            if (nd <= tol) {
                f_(y1, t0 + h, f1);
                return true;
            }
            if (it > 1 && nd > 0.9 * prev) return false;
            prev = nd;
        }
        return false;
    }

private:
    // Factorisations of I - h/2 J for the full and half step sizes.
    const Eigen::PartialPivLU<Eigen::MatrixXd>& factor(double h) {
        for (auto& [hk, lu] : cache_)
            if (hk == h) return lu;
        if (cache_.size() >= 2) cache_.erase(cache_.begin());
        cache_.emplace_back(h, Eigen::PartialPivLU<Eigen::MatrixXd>(Eigen::MatrixXd::Identity(n_, n_) - 0.5 * h * J_));
        ++f_.stats.factorizations;
        return cache_.back().second;
    }

    Rhs f_;
    Eigen::Index n_;
    Eigen::MatrixXd J_;
    std::vector<std::pair<double, Eigen::PartialPivLU<Eigen::MatrixXd>>> cache_;
    double rtol_, atol_;
    bool fresh_ = false;
};

Vec hermite(const Vec& y0, const Vec& f0, const Vec& y1, const Vec& f1, double h, double theta) {
    const double t2 = theta * theta, t3 = t2 * theta;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * h * f0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * f1;
}

Trajectory run_trapezoidal(const RhsFunction& fn, Vec y, double t0, double t1,
                           const IntegratorConfig& cfg) {
    Trajectory out;
    Rhs f{fn, out.stats};
    const Eigen::Index N = y.size();
    Vec fy(N);
    double t = t0;
    f(y, t, fy);
    const bool fixed = cfg.fixed_step > 0.0;
    TrapezoidalStepper stepper(f, N, fixed ? 1e-12 : cfg.rel_tol, fixed ? 1e-12 : cfg.abs_tol);
    stepper.refresh_jacobian(y, t, fy);

    const double hmax = cfg.max_step > 0.0 ? cfg.max_step : (t1 - t0);
    double h = fixed ? cfg.fixed_step : (cfg.initial_step > 0.0 ? cfg.initial_step : 1e-3 * (t1 - t0));
    h = std::min(h, hmax);

    std::size_t next_out = 0;
    const auto& outs = cfg.output_times;
    while (next_out < outs.size() && outs[next_out] <= t) {
        out.times.push_back(outs[next_out++]);
        out.states.push_back(to_std(y));
    }

    Vec ya(N), fa(N), ym(N), fm(N), yb(N), fb(N);
    const double eps = std::numeric_limits<double>::epsilon();
    while (t < t1 && next_out < outs.size()) {
        if (out.stats.steps + out.stats.rejected >= cfg.max_steps)
            throw NumericalError("maximum number of steps exceeded at t=" + std::to_string(t));
        bool last = false;
        if (t + h >= t1 - 16 * eps * std::abs(t1)) {
            h = t1 - t;
            last = true;
        }
        if (h < 16 * eps * std::max(std::abs(t), 1.0)) underflow(t, h, fy.norm() / std::max(y.norm(), 1e-300));

        bool ok;
        double en = 0.0;
        if (fixed) {
            ok = stepper.step(y, fy, t, h, yb, fb);
        } else {
            // One full step against two half steps.
            ok = stepper.step(y, fy, t, h, ya, fa) && stepper.step(y, fy, t, 0.5 * h, ym, fm) &&
                 stepper.step(ym, fm, t + 0.5 * h, 0.5 * h, yb, fb);
            if (ok) en = error_norm((yb - ya) / 3.0, y, yb, cfg.rel_tol, cfg.abs_tol);
        }
        if (!ok) {
            if (!stepper.fresh()) {
                stepper.refresh_jacobian(y, t, fy);
            } else {
                ++out.stats.rejected;
                if (fixed) throw NumericalError("Newton iteration failed to converge at t=" + std::to_string(t));
                h *= 0.25;
            }
            continue;
        }
        if (!(en <= 1.0)) {
            ++out.stats.rejected;
            h *= std::clamp(0.9 * std::pow(en, -1.0 / 3.0), 0.2, 0.9);
            continue;
        }

        const double t_new = last ? t1 : t + h;
        while (next_out < outs.size() && outs[next_out] <= t_new) {
            out.times.push_back(outs[next_out]);
            out.states.push_back(to_std(hermite(y, fy, yb, fb, h, (outs[next_out] - t) / h)));
            ++next_out;
        }
        ++out.stats.steps;
        stepper.mark_used();
        y = yb;
        fy = fb;
        t = t_new;
        if (!fixed) {
            const double factor = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -1.0 / 3.0), 0.2, 4.0);
            // Accepted steps only grow, and only by enough to pay for a new factorisation.
            if (factor > 1.5) h = std::min(h * factor, hmax);
        }
    }
    return out;
}

} // namespace

Trajectory integrate(const RhsFunction& rhs, std::vector<double> y0, double span_start, double span_end,
                     const IntegratorConfig& cfg) {
    check_config(cfg, span_start, span_end);
    IntegratorConfig local = cfg;
    if (local.output_times.empty()) local.output_times = {span_start, span_end};
    Vec y = Eigen::Map<const Vec>(y0.data(), static_cast<Eigen::Index>(y0.size()));
    return local.method == Method::AdaptiveExplicitRK45 ? run_rk45(rhs, std::move(y), span_start, span_end, local)
                                                        : run_trapezoidal(rhs, std::move(y), span_start, span_end, local);
}

} // namespace gaptooth
