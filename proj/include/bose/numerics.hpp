#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>

#include "bose/errors.hpp"

namespace bose {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

/// Spectral (operator 2-) norm by SVD. Fine for the dense desk-scale blocks.
inline double spectral_norm(const MatrixXcd& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<MatrixXcd> svd(a);
    return svd.singularValues()(0);
}

namespace detail {

/// exp(A) for a general square matrix by scaling and squaring with a Taylor
/// core. Reserved for dimensions where a full eigendecomposition is wasteful.
inline MatrixXcd expm_scaling_squaring(const MatrixXcd& a) {
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const MatrixXcd b = a * scale;
    MatrixXcd term = MatrixXcd::Identity(a.rows(), a.cols());
    MatrixXcd sum = term;
    for (int k = 1; k <= 24; ++k) {
        term = (term * b) / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int k = 0; k < squarings; ++k) sum = sum * sum;
    return sum;
}

}  // namespace detail

/// Unitary exp(-i H t) for Hermitian H. Eigendecomposition keeps the result
/// unitary to machine precision; above `dense_eig_limit` we switch to scaling
/// and squaring on -iHt.
inline MatrixXcd evolution_operator(const MatrixXcd& h, double t, int dense_eig_limit = 2000) {
    const Eigen::Index n = h.rows();
    if (n == 0) return h;
    if (n <= dense_eig_limit) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
        if (es.info() != Eigen::Success) throw numerical_error("eigendecomposition failed");
        VectorXcd phases(n);
        for (Eigen::Index k = 0; k < n; ++k)
            phases(k) = std::exp(Complex(0.0, -es.eigenvalues()(k) * t));
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
    return detail::expm_scaling_squaring(Complex(0.0, -t) * h);
}

/// Adaptive Simpson quadrature of f over [a, b] to relative tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-6) {
    if (!(b > a)) return 0.0;
    struct Rec {
        static double go(const std::function<double(double)>& f, double a, double b, double fa,
                         double fm, double fb, double whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            return go(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   go(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(std::abs(whole), 1e-300) * rel_tol;
    return Rec::go(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Bisection root of a continuous monotone g on [lo, hi] with g(lo), g(hi) of
/// opposite sign. Returns the abscissa to ~machine precision.
inline double bisect_root(const std::function<double(double)>& g, double lo, double hi) {
    double glo = g(lo), ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0.0) == (ghi > 0.0))
        throw domain_error("bisect_root: endpoints do not bracket a sign change");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    return 0.5 * (lo + hi);
}

inline double binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

}  // namespace bose
