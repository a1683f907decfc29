#pragma once

// Shared helpers for the test suites: exponentially-weighted prefix/suffix
// panel integrals (an independent path to the Green-kernel convolution),
// manufactured domain-class states, and smooth random test functions.

#include <random>
#include <span>

#include "tadpole/core.hpp"
#include "tadpole/numerics.hpp"
#include "tadpole/spectrum.hpp"
#include "tadpole/types.hpp"

namespace tadpole::testing {

// int_0^{x_i} e^{z(x_i - y)} g(y) dy, panel-by-panel trapezoid recursion.
inline CVector prefix_integral(Complex z, const CVector& g, double h) {
    CVector p(g.size());
    p[0] = 0.0;
    const Complex e = std::exp(z * h);
    for (std::size_t i = 1; i < g.size(); ++i) p[i] = e * p[i - 1] + 0.5 * h * (e * g[i - 1] + g[i]);
    return p;
}

// int_{x_i}^{C} e^{z(y - x_i)} g(y) dy.
inline CVector suffix_integral(Complex z, const CVector& g, double h) {
    CVector s(g.size());
    s.back() = 0.0;
    const Complex e = std::exp(z * h);
    for (std::size_t i = g.size() - 1; i-- > 0;) s[i] = e * s[i + 1] + 0.5 * h * (g[i] + e * g[i + 1]);
    return s;
}

// int_0^C g(y) e^{sgn * z * y} dy / (2z), by weighted trapezoid.
inline Complex weighted_integral(const CVector& g, double h, Complex z, double sgn) {
    CVector w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        w[i] = g[i] * std::exp(sgn * z * static_cast<double>(i) * h);
    return trapezoid(w, h) / (2.0 * z);
}

// Smooth random state in the generator's domain: continuous at the vertex,
// matched loop end derivatives and a half-line profile tuned so the flux
// balance holds with the given alpha. Deterministic in `seed`.
inline StateVector random_domain_state(unsigned seed, double alpha, const TadpoleGeometry& g) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double w0 = U(rng), v0 = U(rng), c1 = U(rng);
    const double s1 = U(rng), s2 = U(rng), q1 = U(rng), q2 = U(rng), vv = U(rng);
    const double L = g.loop_length;
    StateVector s = StateVector::zero(g);
    for (int i = 0; i < g.loop_points; ++i) {
        const double x = g.loop_x(i);
        s.u.loop[i] = w0 + s1 * std::sin(2.0 * kPi * x / L) + s2 * (1.0 - std::cos(2.0 * kPi * x / L));
        s.v.loop[i] = v0 + q1 * std::sin(2.0 * kPi * x / L) + q2 * (1.0 - std::cos(4.0 * kPi * x / L));
    }
    // u2'(0) = u2'(L), so the flux balance reduces to u1'(0+) = alpha v(0);
    // with u1 = (w0 + p x + c1 x^2) e^{-x} that means p = alpha v0 + w0.
    const double p = alpha * v0 + w0;
    for (int i = 0; i < g.halfline_points; ++i) {
        const double x = g.halfline_x(i);
        const double ex = std::exp(-x);
        s.u.halfline[i] = (w0 + p * x + c1 * x * x) * ex;
        s.v.halfline[i] = (v0 + vv * x) * ex;
    }
    return s;
}

// Fixed manufactured domain-class state used by the resolvent recovery tests.
inline StateVector manufactured_state(double alpha, const TadpoleGeometry& g) {
    StateVector W = StateVector::zero(g);
    const double w0 = 0.7, v0 = 0.3;
    const double p = alpha * v0 + w0;
    for (int i = 0; i < g.halfline_points; ++i) {
        const double x = g.halfline_x(i);
        W.u.halfline[i] = w0 * std::exp(-x) + p * x * std::exp(-x);
        W.v.halfline[i] = v0 * std::exp(-x);
    }
    for (int i = 0; i < g.loop_points; ++i) {
        const double x = g.loop_x(i), L = g.loop_length;
        W.u.loop[i] = w0 + 0.4 * std::sin(2.0 * kPi * x / L) + 0.2 * (1.0 - std::cos(2.0 * kPi * x / L));
        W.v.loop[i] = v0 + 0.1 * std::sin(2.0 * kPi * x / L);
    }
    return W;
}

// Difference modulo the additive constant the energy norm cannot see.
inline StateVector difference_mod_constant(const StateVector& a, const StateVector& b) {
    StateVector d = a - b;
    const Complex c = d.u.halfline.front();
    for (auto& x : d.u.halfline) x -= c;
    for (auto& x : d.u.loop) x -= c;
    return d;
}

// Random smooth (f1, f2) pair with matched vertex value f0, plus all the
// prefix/suffix panel integrals the convolution-calculus identities need.
struct IdentityFixture {
    Complex z;
    double L, f0;
    double h1, h2;
    Complex ev;  // e^{zL}
    CVector f1, f1p, f2, f2p;
    CVector P1, S1, P2, S2, P1p, S1p, P2p, S2p;

    IdentityFixture(unsigned seed, int n1, int n2, double r_max) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        z = Complex(-0.3 - 1.2 * std::abs(U(rng)), 1.5 * U(rng));
        L = 1.0 + 0.5 * std::abs(U(rng));
        f0 = U(rng);
        const double a1 = U(rng), a2 = U(rng), b1 = U(rng), b2 = U(rng);
        h1 = r_max / (n1 - 1);
        h2 = L / (n2 - 1);
        ev = std::exp(z * L);
        f1.resize(n1);
        f1p.resize(n1);
        f2.resize(n2);
        f2p.resize(n2);
        for (int i = 0; i < n1; ++i) {
            const double x = i * h1, ex = std::exp(-x);
            f1[i] = (f0 + a1 * x + a2 * x * x) * ex;
            f1p[i] = (a1 + 2.0 * a2 * x - (f0 + a1 * x + a2 * x * x)) * ex;
        }
        const double w = 2.0 * kPi / L;
        for (int i = 0; i < n2; ++i) {
            const double x = i * h2;
            f2[i] = f0 + b1 * std::sin(w * x) + b2 * (1.0 - std::cos(w * x));
            f2p[i] = b1 * w * std::cos(w * x) + b2 * w * std::sin(w * x);
        }
        P1 = prefix_integral(z, f1, h1);
        S1 = suffix_integral(z, f1, h1);
        P2 = prefix_integral(z, f2, h2);
        S2 = suffix_integral(z, f2, h2);
        P1p = prefix_integral(z, f1p, h1);
        S1p = suffix_integral(z, f1p, h1);
        P2p = prefix_integral(z, f2p, h2);
        S2p = suffix_integral(z, f2p, h2);
    }

    Complex conv1(std::size_t i) const { return (P1[i] + S1[i]) / (2.0 * z); }
    Complex conv2(std::size_t i) const { return (P2[i] + S2[i]) / (2.0 * z); }
    Complex conv1p(std::size_t i) const { return (P1p[i] + S1p[i]) / (2.0 * z); }
    Complex conv2p(std::size_t i) const { return (P2p[i] + S2p[i]) / (2.0 * z); }
    Complex dconv1(std::size_t i) const { return (P1[i] - S1[i]) / 2.0; }
};

// Worst absolute deviation over all nine convolution-calculus identities for
// one fixture, sampled with the given index strides.
inline double identity_suite_worst(const IdentityFixture& fx, std::size_t stride1,
                                   std::size_t stride2) {
    const std::size_t n1 = fx.f1.size(), n2 = fx.f2.size();
    double worst = 0.0;
    auto acc = [&](Complex lhs, Complex rhs) { worst = std::max(worst, std::abs(lhs - rhs)); };
    for (std::size_t i = 1; i + 1 < n1; i += stride1) {
        const double x = i * fx.h1;
        acc((fx.conv1(i + 1) - fx.conv1(i - 1)) / (2.0 * fx.h1),
            -fx.z * fx.conv1(i) + fx.P1[i]);
        acc(fx.dconv1(i), fx.conv1p(i) + fx.f0 / (2.0 * fx.z) * std::exp(fx.z * x));
        acc(fx.f1[i] + fx.z * fx.z * fx.conv1(i),
            -fx.z * fx.conv1p(i) + fx.P1p[i] + 0.5 * fx.f0 * std::exp(fx.z * x));
    }
    for (std::size_t i = 1; i + 1 < n2; i += stride2) {
        const double x = i * fx.h2;
        acc((fx.conv2(i + 1) - fx.conv2(i - 1)) / (2.0 * fx.h2),
            fx.z * fx.conv2(i) - fx.S2[i]);
        acc(fx.conv2p(i),
            (fx.ev * std::exp(-fx.z * x) - std::exp(fx.z * x)) * fx.f0 / (2.0 * fx.z) -
                fx.z * fx.conv2(i) + fx.P2[i]);
        acc(fx.f2[i] + fx.z * fx.z * fx.conv2(i),
            -fx.z * fx.conv2p(i) + fx.P2p[i] +
                0.5 * fx.f0 * (std::exp(fx.z * x) + fx.ev * std::exp(-fx.z * x)));
    }
    CVector zf1(n1), zf2(n2);
    for (std::size_t i = 0; i < n1; ++i) zf1[i] = fx.z * fx.f1[i];
    for (std::size_t i = 0; i < n2; ++i) zf2[i] = fx.z * fx.f2[i];
    acc(weighted_integral(zf2, fx.h2, fx.z, +1.0),
        (fx.ev - 1.0) / (2.0 * fx.z) * fx.f0 - weighted_integral(fx.f2p, fx.h2, fx.z, +1.0));
    acc(weighted_integral(zf2, fx.h2, fx.z, -1.0),
        (1.0 - 1.0 / fx.ev) / (2.0 * fx.z) * fx.f0 +
            weighted_integral(fx.f2p, fx.h2, fx.z, -1.0));
    acc(weighted_integral(zf1, fx.h1, fx.z, +1.0),
        -fx.f0 / (2.0 * fx.z) - weighted_integral(fx.f1p, fx.h1, fx.z, +1.0));
    return worst;
}

}  // namespace tadpole::testing
