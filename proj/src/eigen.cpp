#include "gaptooth/eigen.hpp"

#include "gaptooth/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gaptooth {

Eigen::VectorXd balance(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    const double radix = std::numeric_limits<double>::radix;
    const double sqrdx = radix * radix;
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                scale(i) *= f;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return scale;
}

void hessenberg(Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index len = n - k - 1;
        Eigen::VectorXd v = a.col(k).tail(len);
        const double alpha = v.norm();
        if (alpha == 0.0) continue;
        const double beta = v(0) > 0 ? -alpha : alpha;
        v(0) -= beta;
        const double vnorm2 = v.squaredNorm();
        if (vnorm2 == 0.0) continue;
        // A <- P A P with P = I - 2 v v^T / |v|^2 acting on rows/cols k+1..n-1.
        auto rows = a.bottomRows(len);
        const Eigen::RowVectorXd w = (2.0 / vnorm2) * (v.transpose() * rows);
        rows.noalias() -= v * w;
        auto cols = a.rightCols(len);
        const Eigen::VectorXd z = (2.0 / vnorm2) * (cols * v);
        cols.noalias() -= z * v.transpose();
        a(k + 1, k) = beta;
        a.col(k).tail(len - 1).setZero();
    }
}

std::vector<std::complex<double>> hessenberg_qr(Eigen::MatrixXd& a, int max_iterations) {
    const int n = static_cast<int>(a.rows());
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
    const double eps = std::numeric_limits<double>::epsilon();
    auto sign = [](double x, double y) { return y >= 0.0 ? std::abs(x) : -std::abs(x); };

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0, l;
        do {
            // Look for a negligible subdiagonal element.
            for (l = nn; l > 0; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = a(nn, nn);
            if (l == nn) {
                w[static_cast<std::size_t>(nn--)] = x + t;
            } else {
                double y = a(nn - 1, nn - 1);
                double ww = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    // Trailing 2x2 block.
                    const double p = 0.5 * (y - x);
                    const double q = p * p + ww;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
                        if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
                    } else {
                        w[static_cast<std::size_t>(nn - 1)] = {x + p, z};
                        w[static_cast<std::size_t>(nn)] = {x + p, -z};
                    }
                    nn -= 2;
                } else {
                    if (its == max_iterations)
                        throw NumericalError("QR iteration failed to converge for eigenvalue " +
                                             std::to_string(nn));
                    if (its > 0 && its % 10 == 0) {
                        // Exceptional shift.
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        ww = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    double p = 0, q = 0, r = 0, z;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                        std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    // Double-shift bulge chase.
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k + 1 != nn) ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k + 1 != nn) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k + 1 != nn) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l + 1 < nn);
    }
    return w;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw ConfigError("eigenvalues need a square matrix");
    if (a.rows() == 0) return {};
    if (!a.allFinite()) throw NumericalError("matrix has non-finite entries");
    Eigen::MatrixXd work = a;
    balance(work);
    hessenberg(work);
    return hessenberg_qr(work);
}

Eigen::VectorXcd eigenvector(const Eigen::MatrixXd& a, std::complex<double> lambda, int iterations) {
    const Eigen::Index n = a.rows();
    const double norm = std::max(a.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    // Nudge the shift off the eigenvalue so the factorisation stays finite.
    const std::complex<double> shift = lambda + std::complex<double>(1.0, 1.0) * (1e-10 * norm);
    Eigen::MatrixXcd m = a.cast<std::complex<double>>();
    m.diagonal().array() -= shift;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) += 0.01 * static_cast<double>((i * 7919) % 101) / 101.0;
    v.normalize();
    for (int it = 0; it < iterations; ++it) {
        v = lu.solve(v);
        const double nv = v.norm();
        if (!(nv > 0.0) || !std::isfinite(nv)) throw NumericalError("inverse iteration broke down");
        v /= nv;
    }
    return v;
}

} // namespace gaptooth
