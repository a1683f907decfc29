#pragma once

// Small numerical kernels shared by the tadpole library: composite-trapezoid
// quadrature, second-order finite-difference stencils, a dense complex linear
// solver and a cyclic-Jacobi Hermitian eigensolver. Everything works on plain
// std::vector<std::complex<double>> and is header-only.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tadpole {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using CMatrix = std::vector<CVector>;

// Composite trapezoid of sampled values on a uniform grid of spacing h.
inline Complex trapezoid(std::span<const Complex> f, double h) {
    if (f.size() < 2) return 0.0;
    Complex s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

inline double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

// First derivative, second order: central interior, 3-point one-sided ends.
inline CVector derivative(std::span<const Complex> f, double h) {
    const std::size_t n = f.size();
    if (n < 3) throw std::invalid_argument("derivative: need at least 3 samples");
    CVector d(n);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

// Second derivative, second order: central interior, 4-point one-sided ends.
inline CVector second_derivative(std::span<const Complex> f, double h) {
    const std::size_t n = f.size();
    if (n < 4) throw std::invalid_argument("second_derivative: need at least 4 samples");
    const double h2 = h * h;
    CVector d(n);
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d;
}

// One-sided first derivatives at the endpoints, second order.
inline Complex derivative_left(std::span<const Complex> f, double h) {
    return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
}
inline Complex derivative_right(std::span<const Complex> f, double h) {
    const std::size_t n = f.size();
    return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
}

// Solves A x = b by Gaussian elimination with partial pivoting. A is modified.
inline CVector solve_dense(CMatrix a, CVector b) {
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        if (std::abs(a[piv][k]) == 0.0)
            throw std::runtime_error("solve_dense: singular matrix");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const Complex m = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    CVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        Complex s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// Eigenvalues of a Hermitian matrix by cyclic Jacobi with complex rotations.
// Returns eigenvalues sorted ascending.
inline std::vector<double> hermitian_eigenvalues(CMatrix a, double tol = 1e-13,
                                                 int max_sweeps = 64) {
    const std::size_t n = a.size();
    double scale = 0.0;
    for (const auto& row : a)
        for (const auto& v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return std::vector<double>(n, 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a[p][q]);
        if (std::sqrt(off) <= tol * scale * n) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a[p][q];
                if (std::abs(apq) <= tol * scale) continue;
                const double app = a[p][p].real();
                const double aqq = a[q][q].real();
                const Complex phase = apq / std::abs(apq);
                const double tau = (aqq - app) / (2.0 * std::abs(apq));
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const Complex s = t * c * phase;
                // A <- J^H A J with J = [[c, s],[-conj(s), c]] on rows/cols p,q
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a[k][p];
                    const Complex akq = a[k][q];
                    a[k][p] = c * akp - std::conj(s) * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a[p][k];
                    const Complex aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = std::conj(s) * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i].real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

// Least-squares line fit y ~ slope*x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: bad input");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - fit.slope * x[i] - fit.intercept;
        fit.sse += r * r;
    }
    return fit;
}

}  // namespace tadpole
