/**
 * @file eigen.hpp
 * @brief Dense nonsymmetric eigenvalue solver.
 *
 * Balancing by powers of the radix, Householder reduction to upper
 * Hessenberg form, then Francis double-shift QR with deflation and
 * exceptional shifts. Eigenvectors, when wanted, come from complex inverse
 * iteration on the original matrix.
 */
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace gaptooth {

/// Scales rows and columns in place so their norms are comparable; returns
/// the diagonal similarity D with A_out = D^-1 A D.
Eigen::VectorXd balance(Eigen::MatrixXd& a);

/// Householder reduction in place; entries below the subdiagonal are zeroed.
void hessenberg(Eigen::MatrixXd& a);

/// Eigenvalues of an upper Hessenberg matrix (destroyed). Complex pairs are
/// returned adjacent, positive imaginary part first.
std::vector<std::complex<double>> hessenberg_qr(Eigen::MatrixXd& h, int max_iterations_per_eigenvalue = 60);

/// All eigenvalues of a square real matrix.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

/// Unit eigenvector for an eigenvalue estimate, by inverse iteration.
Eigen::VectorXcd eigenvector(const Eigen::MatrixXd& a, std::complex<double> lambda, int iterations = 3);

} // namespace gaptooth
