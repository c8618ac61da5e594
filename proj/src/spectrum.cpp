#include "gaptooth/spectrum.hpp"

#include "gaptooth/errors.hpp"
#include "gaptooth/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

namespace gaptooth {

std::vector<double> equilibrium_state(const PatchLattice& lattice, const SmagorinskiParams& params) {
    if (params.bed_slope < 0.0) throw ConfigError("bed slope must be non-negative");
    const StateLayout layout(lattice);
    const double u = params.equilibrium_velocity();
    std::vector<double> y(layout.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        y[k] = field_parity(layout.patch_of(k), layout.slot_of(k)) == Field::Depth ? 1.0 : u;
    return y;
}

Eigen::MatrixXd numerical_jacobian(const RhsFunction& rhs, std::span<const double> y0, double t) {
    const std::size_t n = y0.size();
    Eigen::MatrixXd jac(n, n);
    std::vector<double> y(y0.begin(), y0.end()), fp(n), fm(n);
    const double step = std::cbrt(std::numeric_limits<double>::epsilon());
    for (std::size_t k = 0; k < n; ++k) {
        const double h = step * std::max(std::abs(y0[k]), 1.0);
        y[k] = y0[k] + h;
        rhs(y, t, fp);
        y[k] = y0[k] - h;
        rhs(y, t, fm);
        y[k] = y0[k];
        const double dh = 2.0 * h;
        for (std::size_t i = 0; i < n; ++i)
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (fp[i] - fm[i]) / dh;
    }
    return jac;
}

std::string_view to_string(ModeClass c) {
    switch (c) {
    case ModeClass::Zero: return "zero";
    case ModeClass::Slow: return "slow";
    case ModeClass::Fast: return "fast";
    }
    return "?";
}

std::size_t SpectrumReport::conjugate_pairs(ModeClass c, double imag_tol) const {
    std::size_t count = 0;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k)
        if (classes[k] == c && eigenvalues[k].imag() > imag_tol) ++count;
    return count;
}

std::size_t SpectrumReport::pairs_with_real_part(double lo, double hi, double imag_tol) const {
    return static_cast<std::size_t>(std::count_if(eigenvalues.begin(), eigenvalues.end(), [&](auto z) {
        return z.imag() > imag_tol && z.real() >= lo && z.real() <= hi;
    }));
}

double SpectrumReport::pairing_defect() const {
    double worst = 0.0;
    for (const auto& z : eigenvalues) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& w : eigenvalues) best = std::min(best, std::abs(std::conj(z) - w));
        worst = std::max(worst, best);
    }
    return worst;
}

SpectrumReport classify_spectrum(std::vector<std::complex<double>> eigs, double slow_threshold,
                                 double zero_threshold) {
    if (eigs.empty()) throw ConfigError("no eigenvalues to classify");
    SpectrumReport rep;
    rep.slow_threshold = slow_threshold;
    rep.zero_threshold = zero_threshold;
    // Deterministic order: decreasing real part, then decreasing imaginary part.
    std::sort(eigs.begin(), eigs.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    rep.eigenvalues = std::move(eigs);
    double max_slow = 0.0, min_fast = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
        const auto z = rep.eigenvalues[k];
        ModeClass c;
        if (std::abs(z) < zero_threshold) {
            c = ModeClass::Zero;
            rep.zero_set.push_back(k);
        } else if (std::abs(z.real()) < slow_threshold) {
            c = ModeClass::Slow;
            rep.slow_set.push_back(k);
            max_slow = std::max(max_slow, std::abs(z.real()));
        } else {
            c = ModeClass::Fast;
            rep.fast_set.push_back(k);
            min_fast = std::min(min_fast, std::abs(z.real()));
        }
        rep.classes.push_back(c);
    }
    if (rep.slow_set.empty())
        throw ConfigError("empty slow set: check the slow and zero thresholds");
    rep.gap_ratio = (rep.fast_set.empty() || max_slow == 0.0) ? std::numeric_limits<double>::infinity()
                                                              : min_fast / max_slow;
    return rep;
}

void write_spectrum_csv(std::ostream& os, const SpectrumReport& report) {
    const auto old = os.precision(17);
    os << "re,im,class\n";
    for (std::size_t k = 0; k < report.eigenvalues.size(); ++k)
        os << report.eigenvalues[k].real() << ',' << report.eigenvalues[k].imag() << ','
           << to_string(report.classes[k]) << '\n';
    os.precision(old);
}

} // namespace gaptooth
