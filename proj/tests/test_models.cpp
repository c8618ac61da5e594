#include <doctest.h>

#include "gaptooth/errors.hpp"
#include "gaptooth/models.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace gaptooth;

namespace {

// Window over [lo, hi] with slot i at x = i d; depth at odd slots (base 0).
PatchFields window(int lo, int hi, double d, auto depth, auto velocity) {
    PatchFields f(0, lo, hi);
    for (int i = lo; i <= hi; ++i)
        f[i] = f.field(i) == Field::Depth ? depth(i * d) : velocity(i * d);
    return f;
}

} // namespace

TEST_CASE("quiescent flat water stays at rest without slope") {
    SmagorinskiParams p;
    p.bed_slope = 0.0;
    const auto f = window(-4, 4, 0.1, [](double) { return 1.0; }, [](double) { return 0.0; });
    for (double v : smagorinski_rhs(f, p, 0.1, -2, 2)) CHECK(v == 0.0);
}

TEST_CASE("uniform flow at the drag balance is a fixed point") {
    for (double slope : {0.0005, 0.001, 0.01}) {
        SmagorinskiParams p;
        p.bed_slope = slope;
        const double u0 = std::sqrt(0.985 * slope / 0.003);
        CHECK(p.equilibrium_velocity() == doctest::Approx(u0).epsilon(1e-15));
        const auto f = window(-4, 4, 0.05, [](double) { return 1.0; }, [&](double) { return u0; });
        for (double v : smagorinski_rhs(f, p, 0.05, -2, 2)) CHECK(std::abs(v) <= 1e-12);
    }
    CHECK(SmagorinskiParams{}.equilibrium_velocity() == doctest::Approx(0.57300).epsilon(1e-5));
}

TEST_CASE("depth rate is minus the centred flux difference") {
    // Depth slot 1 with h = 1 around it, u(0) = -1, u(2) = +1, d = 1:
    // flux at 2 is (1+1)/2 * 1, at 0 is (1+1)/2 * (-1); rate = -(1 - (-1)) / 2 = -1.
    PatchFields f(0, -1, 3);
    f[-1] = 1.0;
    f[0] = -1.0;
    f[1] = 1.0;
    f[2] = 1.0;
    f[3] = 1.0;
    const auto r = smagorinski_rhs(f, SmagorinskiParams{}, 1.0, 1, 1);
    CHECK(r[0] == doctest::Approx(-1.0));
}

TEST_CASE("velocity rate matches a hand evaluation") {
    const double d = 0.1;
    const auto h = [](double x) { return 1.0 + 0.2 * x; };
    const auto u = [](double x) { return 0.4 + 0.1 * x * x; };
    const auto f = window(-3, 3, d, h, u);
    const SmagorinskiParams p;
    const double hbar = 0.5 * (h(d) + h(-d));
    const double u0 = u(0);
    const double want = 0.985 * (0.001 - (h(d) - h(-d)) / (2 * d)) - 0.003 * u0 * u0 / hbar -
                        1.045 * u0 * (u(2 * d) - u(-2 * d)) / (4 * d) +
                        0.26 * hbar * u0 * (u(2 * d) - 2 * u0 + u(-2 * d)) / (4 * d * d);
    CHECK(smagorinski_rhs(f, p, d, 0, 0)[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("non-positive depth is reported with its slot") {
    auto f = window(-3, 3, 0.1, [](double) { return 1.0; }, [](double) { return 0.5; });
    f[1] = -0.01;
    SmagorinskiParams p;
    try {
        (void)smagorinski_rhs(f, p, 0.1, 0, 0);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("slot 1") != std::string::npos);
    }
    p.depth_floor = 1e-3;
    const auto r = smagorinski_rhs(f, p, 0.1, 0, 0);
    CHECK(std::isfinite(r[0]));
}

TEST_CASE("probe: pure wave of a sinusoid") {
    const double d = 0.05, k = 3.0;
    const auto f = window(-3, 3, d, [](double) { return 0.0; }, [&](double x) { return std::sin(k * x); });
    ProbeSystem sys(ProbeParams{});
    std::vector<double> out(5);
    sys.evaluate(f, d, -2, 2, out);
    for (int i = -2; i <= 2; ++i) {
        if (f.field(i) != Field::Depth) continue;
        CHECK(out[static_cast<std::size_t>(i + 2)] ==
              doctest::Approx(-std::cos(k * i * d) * std::sin(k * d) / d).epsilon(1e-13));
    }
}

TEST_CASE("probe: third-derivative stencil is exact for cubics") {
    const double d = 0.1;
    const auto f = window(-4, 4, d, [](double) { return 0.0; }, [](double x) { return x * x * x; });
    ProbeParams with;
    with.c11 = 1.0;
    const auto a = probe_rhs(f, with, d, -1, 1);
    const auto b = probe_rhs(f, ProbeParams{}, d, -1, 1);
    // Depth slots -1 and 1: the c11 term adds -(x^3)''' = -6.
    CHECK(a[0] - b[0] == doctest::Approx(-6.0).epsilon(1e-9));
    CHECK(a[2] - b[2] == doctest::Approx(-6.0).epsilon(1e-9));
    CHECK(a[1] == b[1]);
}

TEST_CASE("probe: diffusion stencil is exact for quadratics") {
    const double d = 0.1;
    const auto f = window(-4, 4, d, [](double x) { return x * x; }, [](double) { return 0.0; });
    ProbeParams p;
    p.c3 = 1.0;
    const auto r = dispersive_diffusive_rhs(f, p, d, -1, 1);
    CHECK(r[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("probe: diffusion symbol on a sinusoid") {
    const double d = 0.07, k = 2.0;
    const auto f = window(-4, 4, d, [&](double x) { return std::sin(k * x); }, [](double) { return 0.0; });
    ProbeParams p;
    p.c3 = 1.0;
    const auto r = dispersive_diffusive_rhs(f, p, d, 1, 1);
    const double symbol = -(2 - 2 * std::cos(2 * k * d)) / (4 * d * d);
    CHECK(r[0] == doctest::Approx(symbol * std::sin(k * d)).epsilon(1e-12));
}

TEST_CASE("probe: self-advection of a linear velocity") {
    const double d = 0.1;
    const auto f = window(-4, 4, d, [](double) { return 0.0; }, [](double x) { return x; });
    ProbeParams p;
    p.c5 = 1.0;
    const auto r = nonlinear_advective_rhs(f, p, d, -2, 2);
    for (int i = -2; i <= 2; i += 2) CHECK(r[static_cast<std::size_t>(i + 2)] == doctest::Approx(-i * d).epsilon(1e-13));
    const auto flat = window(-4, 4, d, [](double) { return 0.3; }, [](double) { return 0.7; });
    for (double v : nonlinear_advective_rhs(flat, p, d, -2, 2)) CHECK(v == 0.0);
}

TEST_CASE("probe wrappers ignore unrelated coefficients") {
    const double d = 0.1;
    const auto f = window(-4, 4, d, [](double x) { return std::cos(x); }, [](double x) { return std::sin(2 * x); });
    ProbeParams all{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    ProbeParams only_growth{0.1, 0.2, 0.3, 0.4, 0, 0, 0};
    const auto a = linear_dispersive_rhs(f, all, d, -1, 1);
    const auto b = probe_rhs(f, only_growth, d, -1, 1);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    ProbeParams adv;
    adv.c5 = 0.7;
    const auto c = nonlinear_advective_rhs(f, all, d, -1, 1);
    const auto e = probe_rhs(f, adv, d, -1, 1);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == e[i]);
}

TEST_CASE("linear probes are linear") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    PatchFields f(0, -5, 5), g(0, -5, 5), s(0, -5, 5);
    for (int i = -5; i <= 5; ++i) {
        f[i] = nd(rng);
        g[i] = nd(rng);
        s[i] = 2.0 * f[i] - 0.5 * g[i];
    }
    ProbeParams p{0.1, -0.2, 0.3, 0.4, 0.5, 0.6, 0.0};
    const auto rf = probe_rhs(f, p, 0.2, -2, 2);
    const auto rg = probe_rhs(g, p, 0.2, -2, 2);
    const auto rs = probe_rhs(s, p, 0.2, -2, 2);
    for (std::size_t i = 0; i < rs.size(); ++i)
        CHECK(rs[i] == doctest::Approx(2.0 * rf[i] - 0.5 * rg[i]).epsilon(1e-12));
}

TEST_CASE("periodic flux form conserves water") {
    // A closed ring of K slots, padded by periodic copies.
    const int K = 40;
    const double d = 0.1;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ud(0.5, 1.5);
    std::vector<double> ring(K);
    for (int k = 0; k < K; ++k) ring[static_cast<std::size_t>(k)] = k % 2 ? ud(rng) : ud(rng) - 1.0;
    PatchFields f(0, -2, K + 1);
    for (int i = -2; i <= K + 1; ++i) f[i] = ring[static_cast<std::size_t>((i + K) % K)];
    const auto r = smagorinski_rhs(f, SmagorinskiParams{}, d, 0, K - 1);
    double total = 0.0;
    for (int k = 1; k < K; k += 2) total += r[static_cast<std::size_t>(k)];
    CHECK(std::abs(total) <= 1e-12);
}
