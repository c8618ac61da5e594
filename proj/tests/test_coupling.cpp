#include <doctest.h>

#include "gaptooth/coupling.hpp"
#include "gaptooth/errors.hpp"
#include "gaptooth/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace gaptooth;

namespace {

const CouplingOrder kOrders[] = {CouplingOrder::Linear, CouplingOrder::Cubic,
                                 CouplingOrder::Quintic, CouplingOrder::Septic};

double poly(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

MacroValues sample(const PatchLattice& lat, auto f) {
    MacroValues mv;
    for (int j = 1; j <= lat.patch_count(); ++j) mv.values.push_back(f(lat.centre(j)));
    return mv;
}

} // namespace

TEST_CASE("linear coupling weights") {
    for (double r : {0.125, 1.0 / 6, 0.5}) {
        const CouplingScheme s{CouplingOrder::Linear, r, 1.0};
        const auto plus = stencil_weights(s, Side::Plus, 1.0);
        CHECK(plus.at(-1) == doctest::Approx(0.5 - r / 2));
        CHECK(plus.at(1) == doctest::Approx(0.5 + r / 2));
        const auto minus = stencil_weights(s, Side::Minus, 1.0);
        CHECK(minus.at(-1) == doctest::Approx(0.5 + r / 2));
        CHECK(minus.at(1) == doctest::Approx(0.5 - r / 2));
    }
}

TEST_CASE("quintic mu delta^4 coefficient at r = 1/2") {
    // Only the gamma^5 group reaches offsets +-5: mu delta^4 contributes c/2
    // to both, delta^5 contributes +-c'. Their sum isolates c.
    const CouplingScheme s{CouplingOrder::Quintic, 0.5, 1.0};
    const auto w = stencil_weights(s, Side::Plus, 1.0);
    CHECK(w.at(5) + w.at(-5) == doctest::Approx(0.01708984375).epsilon(1e-14));
}

TEST_CASE("weights sum to one and mirror between sides") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xi(-2.0, 2.0);
    for (auto order : kOrders)
        for (double r : {0.125, 1.0 / 6, 0.5}) {
            const CouplingScheme s{order, r, 1.0};
            for (int t = 0; t < 20; ++t) {
                const double x = xi(rng);
                const auto p = stencil_weights(s, Side::Plus, x);
                const auto q = stencil_weights(s, Side::Minus, x);
                CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-13));
                CHECK(static_cast<int>(p.terms.size()) <= degree(order) + 1);
                for (int k = -9; k <= 9; k += 2) CHECK(p.at(k) == doctest::Approx(q.at(-k)).epsilon(1e-13));
            }
        }
}

TEST_CASE("polynomial reproduction up to the coupling degree") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), xi(-2.0, 2.0);
    const double D = 0.7;
    for (auto order : kOrders)
        for (double r : {0.125, 1.0 / 6, 0.5})
            for (int t = 0; t < 100; ++t) {
                std::vector<double> c(static_cast<std::size_t>(degree(order) + 1));
                for (auto& v : c) v = coef(rng);
                const double x = xi(rng);
                const CouplingScheme s{order, r, 1.0};
                const auto w = stencil_weights(s, Side::Plus, x);
                const double got = w.apply([&](int k) { return poly(c, k * D); });
                const double want = poly(c, x * r * D);
                CHECK(std::abs(got - want) <= 1e-10 * (1.0 + std::abs(want)));
            }
}

TEST_CASE("degree + 1 is not reproduced") {
    const double D = 1.0;
    for (auto order : kOrders) {
        const CouplingScheme s{order, 1.0 / 6, 1.0};
        const int p = degree(order) + 1;
        const auto w = stencil_weights(s, Side::Plus, 1.0);
        const double got = w.apply([&](int k) { return std::pow(k * D, p); });
        CHECK(std::abs(got - std::pow(s.ratio * D, p)) > 1e-6);
    }
}

TEST_CASE("edge interpolation on a lattice") {
    const auto lat = PatchLattice::build(20.0, 20, 9, 0.25, Topology::Bounded);
    const std::vector<double> c{0.3, -0.2, 0.05, 0.01};
    const auto mv = sample(lat, [&](double x) { return poly(c, x); });
    const CouplingScheme s{CouplingOrder::Cubic, 0.25, 1.0};
    const int j = 10;
    const double rD = 0.25 * lat.macro_step();
    const auto [lo, hi] = interpolate_edges(s, mv, lat, j, FictitiousRule::Zero);
    CHECK(lo == doctest::Approx(poly(c, lat.centre(j) - rD)).epsilon(1e-12));
    CHECK(hi == doctest::Approx(poly(c, lat.centre(j) + rD)).epsilon(1e-12));
    const double g = ghost_value(s, mv, lat, j, 1.5, FictitiousRule::Zero);
    CHECK(g == doctest::Approx(poly(c, lat.centre(j) + 1.5 * rD)).epsilon(1e-12));
    CHECK_THROWS_AS(ghost_value(s, mv, lat, j, 2.5, FictitiousRule::Zero), ConfigError);
    CHECK_THROWS_AS(stencil_weights(s, Side::Plus, -2.01), ConfigError);
}

TEST_CASE("constant macro field gives constant edges for every order") {
    const auto lat = PatchLattice::build(6.0, 12, 9, 0.2, Topology::Periodic);
    const auto mv = sample(lat, [](double) { return 0.37; });
    for (auto order : kOrders)
        for (int j = 1; j <= 12; ++j) {
            const auto [lo, hi] = interpolate_edges({order, 0.2, 1.0}, mv, lat, j, std::nullopt);
            CHECK(lo == doctest::Approx(0.37).epsilon(1e-14));
            CHECK(hi == doctest::Approx(0.37).epsilon(1e-14));
        }
}

TEST_CASE("reflection-symmetric macro field gives mirrored edges") {
    const auto lat = PatchLattice::build(2 * std::numbers::pi, 16, 9, 1.0 / 6, Topology::Periodic);
    const int j = 5;
    const double xc = lat.centre(j);
    const auto mv = sample(lat, [&](double x) { return std::cos(x - xc) + 0.3 * std::cos(3 * (x - xc)); });
    for (auto order : kOrders) {
        const auto [lo, hi] = interpolate_edges({order, 1.0 / 6, 1.0}, mv, lat, j, std::nullopt);
        CHECK(lo == doctest::Approx(hi).epsilon(1e-13));
    }
}

TEST_CASE("edge values converge at order p - 1") {
    for (auto order : {CouplingOrder::Linear, CouplingOrder::Cubic, CouplingOrder::Quintic}) {
        std::vector<double> logD, logE;
        for (int m : {16, 32, 64, 128}) {
            const auto lat = PatchLattice::build(2 * std::numbers::pi, m, 9, 0.25, Topology::Periodic);
            const int j = m / 4 + 1;
            // Same local phase at X_j for every m, so the error constant does not drift.
            const double shift = 0.7 - lat.centre(j);
            const auto mv = sample(lat, [&](double x) { return std::sin(x + shift); });
            const auto [lo, hi] = interpolate_edges({order, 0.25, 1.0}, mv, lat, j, std::nullopt);
            const double rD = 0.25 * lat.macro_step();
            const double err = std::max(std::abs(lo - std::sin(0.7 - rD)), std::abs(hi - std::sin(0.7 + rD)));
            logD.push_back(std::log(lat.macro_step()));
            logE.push_back(std::log(err));
        }
        const double slope = (logE.back() - logE.front()) / (logD.back() - logD.front());
        CHECK(slope == doctest::Approx(truncation_power(order) - 1).epsilon(0.1));
    }
}

TEST_CASE("fictitious rules beyond bounded ends") {
    const auto lat = PatchLattice::build(10.0, 6, 9, 0.2, Topology::Bounded);
    MacroValues mv{{1.0, 2.0, 3.0, 4.0, 5.0, 6.0}};
    CHECK(macro_at(mv, lat, 0, FictitiousRule::Zero) == 0.0);
    // Extension keeps the field: beyond patch 6 the nearest same-parity value is patch 5.
    CHECK(macro_at(mv, lat, 7, FictitiousRule::ConstantExtension) == 5.0);
    CHECK(macro_at(mv, lat, 8, FictitiousRule::ConstantExtension) == 6.0);
    CHECK(macro_at(mv, lat, -1, FictitiousRule::ConstantExtension) == 1.0);
    CHECK(macro_at(mv, lat, 0, FictitiousRule::EvenReflection) == macro_at(mv, lat, 2, std::nullopt));
    CHECK(macro_at(mv, lat, 0, FictitiousRule::OddReflection) == -macro_at(mv, lat, 2, std::nullopt));
    CHECK(macro_at(mv, lat, 3, FictitiousRule::Zero) == 3.0);
    CHECK_THROWS_AS(macro_at(mv, lat, 0, std::nullopt), ConfigError);
    CHECK_THROWS_AS(interpolate_edges({CouplingOrder::Cubic, 0.2, 1.0}, mv, lat, 1, std::nullopt),
                    ConfigError);
    CHECK(parse_fictitious_rule("odd") == FictitiousRule::OddReflection);
    CHECK_THROWS_AS(parse_fictitious_rule("mirror"), ConfigError);
    CHECK(parse_coupling_order("septic") == CouplingOrder::Septic);
    CHECK_THROWS_AS(parse_coupling_order("cubicish"), ConfigError);
}

TEST_CASE("resolved stencils agree with direct evaluation") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (auto topo : {Topology::Periodic, Topology::Bounded}) {
        const auto lat = PatchLattice::build(8.0, 10, 9, 1.0 / 6, topo);
        MacroValues mv;
        for (int j = 0; j < 10; ++j) mv.values.push_back(nd(rng));
        const auto rule = topo == Topology::Bounded ? std::optional(FictitiousRule::EvenReflection)
                                                    : std::nullopt;
        for (auto order : kOrders) {
            const CouplingScheme s{order, 1.0 / 6, 1.0};
            for (int j = 1; j <= 10; ++j) {
                const auto w = stencil_weights(s, Side::Plus, 1.0);
                const double direct = w.apply([&](int k) { return macro_at(mv, lat, j + k, rule); });
                const auto st = resolve_stencil(w, lat, j, rule);
                CHECK(st.apply(mv) == doctest::Approx(direct).epsilon(1e-13));
                for (const auto& [idx, wt] : st.terms) CHECK(lat.in_range(idx));
            }
        }
    }
}

TEST_CASE("own-field interpolation is exact for low-degree polynomials") {
    const auto lat = PatchLattice::build(24.0, 24, 9, 0.2, Topology::Bounded);
    const std::vector<double> c{1.0, 0.1, -0.02, 0.003, 0.0004};
    const auto mv = sample(lat, [&](double x) { return poly(c, x); });
    for (int j : {1, 2, 12, 23, 24}) {
        const double off = 0.35;
        const auto v = own_field_interpolate(mv, lat, j, off, 2);
        REQUIRE(v.has_value());
        CHECK(*v == doctest::Approx(poly(c, lat.centre(j) + off)).epsilon(1e-10));
    }
    const auto tiny = PatchLattice::build(4.0, 3, 9, 0.2, Topology::Bounded);
    MacroValues three{{1.0, 2.0, 3.0}};
    CHECK_FALSE(own_field_interpolate(three, tiny, 2, 0.1, 2).has_value());
}
