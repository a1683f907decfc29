#pragma once

// Point spectrum of the damped wave generator on the tadpole: closed-form
// eigenvalue families on the imaginary axis and on one horizontal line in the
// left half-plane, the characteristic determinants of both half-plane
// eigen-systems, an argument-principle root finder used as an independent
// check, eigenfunction constructors and the Weyl quasi-mode sequence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "tadpole/core.hpp"
#include "tadpole/numerics.hpp"
#include "tadpole/types.hpp"

namespace tadpole {

enum class EigenvalueKind { Embedded, Damped };

struct Eigenvalue {
    Complex z;
    EigenvalueKind kind;
    int n;
};

struct Eigenfunction {
    Eigenvalue eigenvalue;
    StateVector state;             // normalized, ||state||_H = 1
    double normalization;          // C_n from quadrature
    double normalization_printed;  // reference closed-form C_n (diagnostic)
};

inline constexpr double kPi = std::numbers::pi;

// Embedded eigenvalues z_n = 2*pi*n*i/L, n != 0.
inline std::vector<Eigenvalue> embedded_eigenvalues(double L, int n_min, int n_max) {
    if (L <= 0.0) throw ParameterError("embedded_eigenvalues: L must be positive");
    std::vector<Eigenvalue> out;
    for (int n = n_min; n <= n_max; ++n) {
        if (n == 0) continue;
        out.push_back({Complex(0.0, 2.0 * kPi * n / L), EigenvalueKind::Embedded, n});
    }
    return out;
}

// Common real part of the damped family, when it exists.
inline std::optional<double> spectral_abscissa(const DampingParameter& alpha, double L) {
    if (L <= 0.0) throw ParameterError("spectral_abscissa: L must be positive");
    switch (alpha.regime) {
        case Regime::NoDampedSpectrum:
            return std::nullopt;
        case Regime::LowRegime:
            return std::log((3.0 - alpha.alpha) / (1.0 + alpha.alpha)) / L;
        case Regime::HighRegime:
            return std::log((alpha.alpha - 3.0) / (1.0 + alpha.alpha)) / L;
    }
    return std::nullopt;
}

inline Complex damped_eigenvalue(const DampingParameter& alpha, double L, int n) {
    const auto re = spectral_abscissa(alpha, L);
    if (!re) throw NoDampedSpectrumError("no damped eigenvalues for this alpha");
    const double im = alpha.regime == Regime::LowRegime ? 2.0 * kPi * n / L
                                                        : (2.0 * n + 1.0) * kPi / L;
    return {*re, im};
}

inline std::vector<Eigenvalue> damped_eigenvalues(const DampingParameter& alpha, double L,
                                                  int n_min, int n_max) {
    if (L <= 0.0) throw ParameterError("damped_eigenvalues: L must be positive");
    std::vector<Eigenvalue> out;
    if (alpha.regime == Regime::NoDampedSpectrum) return out;
    for (int n = n_min; n <= n_max; ++n)
        out.push_back({damped_eigenvalue(alpha, L, n), EigenvalueKind::Damped, n});
    return out;
}

// Right-half-plane characteristic function, factored form:
// (e^{zL}-1)((alpha+3)e^{zL}-(1-alpha)). The second factor never vanishes for
// Re z >= 0.
inline Complex char_det_plus(Complex z, const DampingParameter& alpha, double L) {
    const Complex e = std::exp(z * L);
    return (e - 1.0) * ((alpha.alpha + 3.0) * e - (1.0 - alpha.alpha));
}

// 3x3 determinant of the C^+ eigen-system; equals -e^{-zL} * char_det_plus.
inline Complex char_det_plus_expanded(Complex z, const DampingParameter& alpha, double L) {
    const Complex e = std::exp(z * L);
    const Complex f = std::exp(-z * L);
    const double a = alpha.alpha;
    const CMatrix m = {{1.0, 1.0, -1.0},
                       {f, e, -1.0},
                       {f - 1.0, 1.0 - e, Complex(-(1.0 + a))}};
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Left-half-plane characteristic function, factored form:
// (e^{zL}-1)((alpha+1)e^{zL}-(3-alpha)).
inline Complex char_det_minus(Complex z, const DampingParameter& alpha, double L) {
    const Complex e = std::exp(z * L);
    return (e - 1.0) * ((alpha.alpha + 1.0) * e - (3.0 - alpha.alpha));
}

inline Complex char_det_minus_derivative(Complex z, const DampingParameter& alpha, double L) {
    const Complex e = std::exp(z * L);
    return L * e * ((alpha.alpha + 1.0) * e - (3.0 - alpha.alpha)) +
           (e - 1.0) * (alpha.alpha + 1.0) * L * e;
}

// Determinant of the C^- eigen-system matrix; equals e^{-zL} * char_det_minus.
inline Complex char_det_minus_expanded(Complex z, const DampingParameter& alpha, double L) {
    const Complex e = std::exp(z * L);
    const Complex f = std::exp(-z * L);
    const double a = alpha.alpha;
    const CMatrix m = {{1.0, -1.0, -1.0},
                       {1.0, -e, -f},
                       {1.0 - a, 1.0 - e, f - 1.0}};
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

struct ComplexRectangle {
    double re_min, re_max, im_min, im_max;
    Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
};

namespace detail {

// Phase change of f between two contour points, refined until each step turns
// by less than pi/2 so the principal-branch increments unwrap exactly.
inline double phase_change(const std::function<Complex(Complex)>& f, Complex a, Complex b,
                           Complex fa, Complex fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) <= 0.5 * kPi) return d;
    if (depth >= 48)
        throw RootRefinementError("winding contour passes through a zero");
    const Complex m = 0.5 * (a + b);
    const Complex fm = f(m);
    return phase_change(f, a, m, fa, fm, depth + 1) +
           phase_change(f, m, b, fm, fb, depth + 1);
}

// Winding number of char_det_minus around the rectangle boundary by adaptive
// phase unwrapping (exact once every step is resolved), seeded with `pts`
// nodes per side.
inline double winding_number(const ComplexRectangle& r, const DampingParameter& alpha,
                             double L, int pts) {
    const std::function<Complex(Complex)> f = [&](Complex z) {
        return char_det_minus(z, alpha, L);
    };
    const Complex corners[5] = {{r.re_min, r.im_min},
                                {r.re_max, r.im_min},
                                {r.re_max, r.im_max},
                                {r.re_min, r.im_max},
                                {r.re_min, r.im_min}};
    double total = 0.0;
    for (int side = 0; side < 4; ++side) {
        const Complex a = corners[side], b = corners[side + 1];
        const Complex dz = (b - a) / static_cast<double>(pts);
        Complex prev_z = a, prev_f = f(a);
        for (int k = 1; k <= pts; ++k) {
            const Complex zk = (k == pts) ? b : a + static_cast<double>(k) * dz;
            const Complex fk = f(zk);
            if (fk == Complex(0.0) || prev_f == Complex(0.0))
                throw RootRefinementError("winding contour passes through a zero");
            total += phase_change(f, prev_z, zk, prev_f, fk, 0);
            prev_z = zk;
            prev_f = fk;
        }
    }
    return total / (2.0 * kPi);
}

inline Complex newton_refine(Complex z0, const DampingParameter& alpha, double L,
                             double tol, const ComplexRectangle& box) {
    Complex z = z0;
    for (int it = 0; it < 50; ++it) {
        const Complex f = char_det_minus(z, alpha, L);
        if (std::abs(f) < tol) return z;
        z -= f / char_det_minus_derivative(z, alpha, L);
    }
    if (std::abs(char_det_minus(z, alpha, L)) < tol) return z;
    throw RootRefinementError("Newton did not converge in box Re[" +
                              std::to_string(box.re_min) + "," + std::to_string(box.re_max) +
                              "] Im[" + std::to_string(box.im_min) + "," +
                              std::to_string(box.im_max) + "]");
}

inline void find_roots_in(const ComplexRectangle& box, const DampingParameter& alpha,
                          double L, double tol, int depth, std::vector<Complex>& roots) {
    // Jitter outward when a root sits on (or too near) the contour.
    ComplexRectangle r = box;
    double count = -1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            count = winding_number(r, alpha, L, 512);
        } catch (const RootRefinementError&) {
            count = 0.5;  // zero on (or hugging) the contour: grow and retry
        }
        if (std::abs(count - std::round(count)) < 1e-3) break;
        const double d = 1e-6 * (attempt + 1) * (1.0 + std::abs(r.im_max) + std::abs(r.re_min));
        r.re_min -= d;
        r.re_max += d;
        r.im_min -= d;
        r.im_max += d;
    }
    const int n = static_cast<int>(std::round(count));
    if (std::abs(count - n) >= 1e-3)
        throw RootRefinementError("argument-principle count did not settle to an integer");
    if (n == 0) return;
    const double diag = std::hypot(r.re_max - r.re_min, r.im_max - r.im_min);
    // Shrink single-root boxes before polishing so Newton starts close.
    if ((n == 1 && diag <= 1.0) || depth >= 40) {
        roots.push_back(newton_refine(r.center(), alpha, L, tol, r));
        return;
    }
    const double rm = 0.5 * (r.re_min + r.re_max);
    const double im = 0.5 * (r.im_min + r.im_max);
    find_roots_in({r.re_min, rm, r.im_min, im}, alpha, L, tol, depth + 1, roots);
    find_roots_in({rm, r.re_max, r.im_min, im}, alpha, L, tol, depth + 1, roots);
    find_roots_in({r.re_min, rm, im, r.im_max}, alpha, L, tol, depth + 1, roots);
    find_roots_in({rm, r.re_max, im, r.im_max}, alpha, L, tol, depth + 1, roots);
}

}  // namespace detail

// All zeros of char_det_minus in the strictly-left-half-plane part of the
// rectangle, located by argument-principle counting on subdivided boxes and
// polished by Newton. Sorted by imaginary part. Boundary roots are treated as
// inside (the retry jitter grows the box outward).
inline std::vector<Complex> find_roots(const DampingParameter& alpha, double L,
                                       ComplexRectangle region, double tol = 1e-12) {
    region.re_max = std::min(region.re_max, -1e-9);  // open left half-plane only
    if (region.re_min >= region.re_max) return {};
    std::vector<Complex> roots;
    detail::find_roots_in(region, alpha, L, tol, 0, roots);
    std::sort(roots.begin(), roots.end(),
              [](Complex a, Complex b) { return a.imag() < b.imag(); });
    // Adjacent boxes can both pick up a shared-edge root.
    std::vector<Complex> unique;
    for (const Complex& r : roots)
        if (unique.empty() || std::abs(r - unique.back()) > 1e-8) unique.push_back(r);
    return unique;
}

namespace detail {

inline double normalize_state(StateVector& s, const TadpoleGeometry& g) {
    const double n = norm_H(s, g);
    if (n == 0.0) throw ParameterError("cannot normalize a zero state");
    s = Complex(1.0 / n) * s;
    return 1.0 / n;
}

}  // namespace detail

// Loop-supported sine mode, invisible to the damper: u = (0, sin(2 pi n x/L)),
// v = z_n u.
inline Eigenfunction eigenfunction_embedded(int n, double L, const TadpoleGeometry& g) {
    if (n == 0) throw ParameterError("eigenfunction_embedded: n must be nonzero");
    if (g.loop_length != L) throw GeometryMismatchError("geometry loop length != L");
    const Complex z(0.0, 2.0 * kPi * n / L);
    StateVector s = StateVector::zero(g);
    for (int i = 0; i < g.loop_points; ++i) {
        s.u.loop[i] = std::sin(2.0 * kPi * n * g.loop_x(i) / L);
        s.v.loop[i] = z * s.u.loop[i];
    }
    const double c = detail::normalize_state(s, g);
    return {{z, EigenvalueKind::Embedded, n}, std::move(s), c, 0.0};
}

// Damped eigenfunction: u1 = e^{z x}, u2 = (3-alpha)/4 e^{-z x} +
// (alpha+1)/4 e^{z x}, v = z u; normalized by quadrature of the H-norm. The
// reference closed-form C_n is recorded as a diagnostic only (it disagrees
// with the quadrature value; the component norms in the same proof give
// C_n^{-2} = (1+K)(w^2 + nu^2 n^2)/w, which quadrature confirms).
inline Eigenfunction eigenfunction_damped(int n, const DampingParameter& alpha, double L,
                                          const TadpoleGeometry& g) {
    if (alpha.regime == Regime::NoDampedSpectrum)
        throw NoDampedSpectrumError("eigenfunction_damped: empty damped spectrum");
    if (g.loop_length != L) throw GeometryMismatchError("geometry loop length != L");
    const Complex z = damped_eigenvalue(alpha, L, n);
    const double a = alpha.alpha;
    StateVector s = StateVector::zero(g);
    for (int i = 0; i < g.halfline_points; ++i) {
        s.u.halfline[i] = std::exp(z * g.halfline_x(i));
        s.v.halfline[i] = z * s.u.halfline[i];
    }
    for (int i = 0; i < g.loop_points; ++i) {
        const double x = g.loop_x(i);
        s.u.loop[i] = 0.25 * (3.0 - a) * std::exp(-z * x) + 0.25 * (a + 1.0) * std::exp(z * x);
        s.v.loop[i] = z * s.u.loop[i];
    }
    const double c = detail::normalize_state(s, g);

    const double w = -z.real();
    const double nu = 2.0 * kPi / L;
    const double k = 0.25 * (3.0 - a) * 0.25 * (3.0 - a) * (std::exp(2.0 * w * L) - 1.0) +
                     0.25 * (1.0 + a) * 0.25 * (1.0 + a) * (1.0 - std::exp(-2.0 * w * L));
    const double printed_c2 = (w + (nu / w) * (nu / w) * n * n) * (1.0 + k);
    return {{z, EigenvalueKind::Damped, n}, std::move(s), c, 1.0 / std::sqrt(printed_c2)};
}

// Polynomial bump on [1,2], C^2 at the endpoints, unit L^2 norm:
// chi(s) = sqrt(12012) ((s-1)(2-s))^3.
inline double weyl_bump(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double p = (s - 1.0) * (2.0 - s);
    return std::sqrt(12012.0) * p * p * p;
}

struct WeylQuasimode {
    StateVector state;
    double residual;  // ||(A_alpha - i lambda) U_j||_H^2 by quadrature
    double norm_sq;   // ||U_j||_H^2
};

// Quasi-mode U_j = ((e^{i lambda x} chi(x/j)/sqrt(j), 0), i lambda (...)),
// witnessing i*lambda in the spectrum; residual decays like O(1/j).
inline WeylQuasimode weyl_quasimode(double lambda, int j, const DampingParameter& alpha,
                                    const TadpoleGeometry& g) {
    if (lambda == 0.0) throw ParameterError("weyl_quasimode: lambda must be nonzero");
    if (j < 1) throw ParameterError("weyl_quasimode: j must be >= 1");
    if (g.halfline_truncation < 2.0 * j)
        throw TruncationError("weyl_quasimode: R_max must be at least 2j");
    const Complex il(0.0, lambda);
    StateVector s = StateVector::zero(g);
    for (int i = 0; i < g.halfline_points; ++i) {
        const double x = g.halfline_x(i);
        s.u.halfline[i] = std::exp(il * x) * weyl_bump(x / j) / std::sqrt(double(j));
        s.v.halfline[i] = il * s.u.halfline[i];
    }
    const StateVector r = apply_generator(s, alpha, g) - (il * s);
    const double residual = inner_product_H(r, r, g).real();
    const double norm_sq = inner_product_H(s, s, g).real();
    return {std::move(s), residual, norm_sq};
}

}  // namespace tadpole
