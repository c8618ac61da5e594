/**
 * @file spectrum.hpp
 * @brief Linearisation about an equilibrium and slow/fast classification of
 *        the resulting eigenvalues.
 */
#pragma once

#include "gaptooth/grid.hpp"
#include "gaptooth/integrator.hpp"
#include "gaptooth/models.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <vector>

namespace gaptooth {

/// Uniform h = 1 and the drag-balanced velocity, laid out as a gap-tooth state.
std::vector<double> equilibrium_state(const PatchLattice& lattice, const SmagorinskiParams& params);

/// Centred differences with h_k = cbrt(eps) max(|y_k|, 1).
Eigen::MatrixXd numerical_jacobian(const RhsFunction& rhs, std::span<const double> y, double t = 0.0);

enum class ModeClass { Zero, Slow, Fast };

std::string_view to_string(ModeClass c);

struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<ModeClass> classes;
    std::vector<std::size_t> slow_set, fast_set, zero_set;
    double slow_threshold = 0.5;
    double zero_threshold = 0.0;
    /// min |Re| over fast modes / max |Re| over slow modes.
    double gap_ratio = 0.0;

    std::size_t zero_modes() const { return zero_set.size(); }
    /// Complex pairs (counted once, Im > 0) in the given class.
    std::size_t conjugate_pairs(ModeClass c, double imag_tol = 1e-12) const;
    /// Complex pairs with Re in [lo, hi].
    std::size_t pairs_with_real_part(double lo, double hi, double imag_tol = 1e-12) const;
    /// Largest deviation between an eigenvalue and its closest partner's conjugate.
    double pairing_defect() const;
};

/// Splits eigenvalues into zero (|lambda| < zero_threshold), slow
/// (|Re| < slow_threshold) and fast. Throws when the slow set is empty.
SpectrumReport classify_spectrum(std::vector<std::complex<double>> eigs, double slow_threshold,
                                 double zero_threshold);

/// Columns re, im, class; sorted by decreasing real part.
void write_spectrum_csv(std::ostream& os, const SpectrumReport& report);

} // namespace gaptooth
