#include <doctest.h>

#include "gaptooth/eigen.hpp"
#include "gaptooth/errors.hpp"
#include "gaptooth/solver.hpp"
#include "gaptooth/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace gaptooth;
using cplx = std::complex<double>;

namespace {

void sort_eigs(std::vector<cplx>& v) {
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        if (std::abs(a.real() - b.real()) > 1e-9 * (1 + std::abs(a.real()))) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

// Greedy nearest matching; returns the largest distance.
double match_distance(std::vector<cplx> a, std::vector<cplx> b) {
    double worst = 0.0;
    for (const auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(),
                                   [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = nd(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

} // namespace

TEST_CASE("eigenvalues of simple matrices") {
    auto id = eigenvalues(Eigen::MatrixXd::Identity(3, 3));
    for (auto z : id) CHECK(std::abs(z - 1.0) <= 1e-14);

    Eigen::MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    auto r = eigenvalues(rot);
    sort_eigs(r);
    CHECK(std::abs(r[0] - cplx(0, -1)) <= 1e-14);
    CHECK(std::abs(r[1] - cplx(0, 1)) <= 1e-14);

    Eigen::MatrixXd tri(3, 3);
    tri << 1, 2, 3, 0, 4, 5, 0, 0, 6;
    CHECK(match_distance(eigenvalues(tri), {1.0, 4.0, 6.0}) <= 1e-12);
}

TEST_CASE("constructed spectra are recovered") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 12;
        // Block diagonal with real eigenvalues and rotation-scaled pairs.
        Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n, n);
        std::vector<cplx> want;
        for (int k = 0; k < 6; ++k) {
            const double re = -0.5 * k - 0.1 * trial, im = 0.3 + k;
            if (k % 2 == 0) {
                lam(2 * k, 2 * k) = re;
                lam(2 * k, 2 * k + 1) = -im;
                lam(2 * k + 1, 2 * k) = im;
                lam(2 * k + 1, 2 * k + 1) = re;
                want.push_back({re, im});
                want.push_back({re, -im});
            } else {
                lam(2 * k, 2 * k) = re;
                lam(2 * k + 1, 2 * k + 1) = re - 10.0;
                want.push_back(re);
                want.push_back(re - 10.0);
            }
        }
        const Eigen::MatrixXd q = random_orthogonal(n, rng);
        const Eigen::MatrixXd a = q * lam * q.transpose();
        CHECK(match_distance(eigenvalues(a), want) <= 1e-9);
    }
}

TEST_CASE("agrees with a reference dense solver on random matrices") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    for (int n : {5, 20, 60}) {
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = nd(rng) * std::pow(10.0, (i - j) % 3);
        Eigen::EigenSolver<Eigen::MatrixXd> ref(a, false);
        std::vector<cplx> want(ref.eigenvalues().data(), ref.eigenvalues().data() + n);
        CHECK(match_distance(eigenvalues(a), want) <= 1e-8 * a.norm());
    }
}

TEST_CASE("conjugate pairs come adjacent, positive imaginary part first") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(15, 15);
    for (int i = 0; i < 15; ++i)
        for (int j = 0; j < 15; ++j) a(i, j) = nd(rng);
    const auto ev = eigenvalues(a);
    for (std::size_t k = 0; k < ev.size(); ++k) {
        if (ev[k].imag() > 0.0) {
            REQUIRE(k + 1 < ev.size());
            CHECK(std::abs(ev[k + 1] - std::conj(ev[k])) <= 1e-12 * (1 + std::abs(ev[k])));
            ++k;
        } else {
            CHECK(ev[k].imag() == 0.0);
        }
    }
}

TEST_CASE("balancing and Hessenberg reduction preserve the spectrum") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(10, 10);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) a(i, j) = nd(rng) * std::pow(10.0, i - j);
    const auto before = eigenvalues(a);
    Eigen::MatrixXd b = a;
    const Eigen::VectorXd dvec = balance(b);
    const Eigen::MatrixXd back = dvec.asDiagonal() * b * dvec.cwiseInverse().asDiagonal();
    CHECK((back - a).norm() <= 1e-12 * a.norm());
    Eigen::MatrixXd h = b;
    hessenberg(h);
    for (int i = 2; i < 10; ++i)
        for (int j = 0; j < i - 1; ++j) CHECK(h(i, j) == 0.0);
    CHECK(match_distance(hessenberg_qr(h), before) <= 1e-8 * a.norm());
}

TEST_CASE("inverse-iteration eigenvectors have small residuals") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(30, 30);
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) a(i, j) = nd(rng);
    for (auto lam : eigenvalues(a)) {
        const Eigen::VectorXcd v = eigenvector(a, lam);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((a.cast<cplx>() * v - lam * v).norm() <= 1e-9 * a.norm());
    }
}

TEST_CASE("numerical Jacobian") {
    Eigen::MatrixXd a(3, 3);
    a << 1, 2, 0, -1, 3, 4, 0.5, 0, -2;
    auto linear = [&](std::span<const double> y, double, std::span<double> f) {
        for (int i = 0; i < 3; ++i) {
            f[static_cast<std::size_t>(i)] = 0.0;
            for (int j = 0; j < 3; ++j) f[static_cast<std::size_t>(i)] += a(i, j) * y[static_cast<std::size_t>(j)];
        }
    };
    const std::vector<double> y{0.3, -1.0, 2.0};
    CHECK((numerical_jacobian(linear, y) - a).norm() <= 1e-9 * a.norm());

    auto square = [](std::span<const double> y, double, std::span<double> f) {
        for (std::size_t i = 0; i < y.size(); ++i) f[i] = y[i] * y[i];
    };
    const std::vector<double> ones(4, 1.0);
    const Eigen::MatrixXd j = numerical_jacobian(square, ones);
    CHECK((j - 2.0 * Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-9);
}

TEST_CASE("classification") {
    CHECK_THROWS_AS(classify_spectrum({0.0, -1.0, -100.0}, 0.1, 1e-6), ConfigError);
    CHECK_THROWS_AS(classify_spectrum({}, 0.1, 1e-6), ConfigError);
    const auto rep = classify_spectrum({cplx(-100, 5), cplx(0, 0), cplx(-0.05, 1), cplx(-0.05, -1), cplx(-100, -5)},
                                       0.5, 1e-6);
    CHECK(rep.zero_modes() == 1);
    CHECK(rep.slow_set.size() == 2);
    CHECK(rep.fast_set.size() == 2);
    CHECK(rep.conjugate_pairs(ModeClass::Slow) == 1);
    CHECK(rep.conjugate_pairs(ModeClass::Fast) == 1);
    CHECK(rep.pairs_with_real_part(-250, -2) == 1);
    CHECK(rep.gap_ratio == doctest::Approx(2000.0));
    CHECK(rep.pairing_defect() <= 1e-15);
    CHECK(rep.eigenvalues.front().real() >= rep.eigenvalues.back().real());

    std::ostringstream os;
    write_spectrum_csv(os, rep);
    const auto text = os.str();
    CHECK(text.rfind("re,im,class\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}

TEST_CASE("equilibrium state") {
    const auto lat = PatchLattice::build(2 * std::numbers::pi, 10, 9, 1.0 / 6, Topology::Periodic);
    const auto y = equilibrium_state(lat, SmagorinskiParams{});
    CHECK(y[StateLayout(lat).index(2, 0)] == doctest::Approx(0.57300).epsilon(1e-5));
    SmagorinskiParams flat;
    flat.bed_slope = 0.0;
    const auto z = equilibrium_state(lat, flat);
    CHECK(z[StateLayout(lat).index(2, 0)] == 0.0);
    flat.bed_slope = -0.1;
    CHECK_THROWS_AS(equilibrium_state(lat, flat), ConfigError);
}

TEST_CASE("gap-tooth linearisation: conservation, real structure and translation invariance") {
    const auto lat = PatchLattice::build(2 * std::numbers::pi, 10, 9, 1.0 / 6, Topology::Periodic);
    const auto sys = std::make_shared<SmagorinskiSystem>(SmagorinskiParams{});
    GapToothSolver solver(lat, {}, sys);
    RhsFunction f = [&](std::span<const double> y, double t, std::span<double> out) { solver.rhs(y, t, out); };
    const auto y = equilibrium_state(lat, SmagorinskiParams{});
    const Eigen::MatrixXd jac = numerical_jacobian(f, y);
    CHECK(jac.rows() == 90);
    const auto rep = classify_spectrum(eigenvalues(jac), 0.5, 1e-6 * jac.norm());
    CHECK(rep.zero_modes() == 1);
    CHECK(rep.pairing_defect() <= 1e-8 * jac.norm());

    // Shifting every patch by two is a symmetry: P J P^T = J.
    const int n = lat.interior_points();
    Eigen::MatrixXd shifted(90, 90);
    for (int a = 0; a < 90; ++a)
        for (int b = 0; b < 90; ++b) shifted((a + 2 * n) % 90, (b + 2 * n) % 90) = jac(a, b);
    CHECK((shifted - jac).norm() <= 1e-6 * jac.norm());
}

TEST_CASE("scale separation of two orders of magnitude" * doctest::should_fail()) {
    // Recorded as unattained: the slowest fast mode sits about ten times
    // further out than the fastest slow mode, not a hundred.
    const auto lat = PatchLattice::build(2 * std::numbers::pi, 10, 9, 1.0 / 6, Topology::Periodic);
    GapToothSolver solver(lat, {}, std::make_shared<SmagorinskiSystem>(SmagorinskiParams{}));
    RhsFunction f = [&](std::span<const double> y, double t, std::span<double> out) { solver.rhs(y, t, out); };
    const Eigen::MatrixXd jac = numerical_jacobian(f, equilibrium_state(lat, SmagorinskiParams{}));
    const auto rep = classify_spectrum(eigenvalues(jac), 0.5, 1e-6 * jac.norm());
    CHECK(rep.gap_ratio >= 100.0);
}
