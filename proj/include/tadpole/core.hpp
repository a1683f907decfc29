#pragma once

// Energy-space inner product, the generator A_alpha = (0 I; d^2 0) with the
// damped Kirchhoff transmission condition, its adjoint, and the vertex
// condition check. All discrete operations are second order (trapezoid
// quadrature, central/one-sided difference stencils).

#include <cmath>
#include <complex>

#include "tadpole/numerics.hpp"
#include "tadpole/types.hpp"

namespace tadpole {

// <(f,u),(g,v)>_H = sum over edges of <f', g'> + <u, v>, L^2 pairings with
// conjugation on the second argument.
inline Complex inner_product_H(const StateVector& a, const StateVector& b,
                               const TadpoleGeometry& g) {
    if (!a.matches(g) || !b.matches(g))
        throw GeometryMismatchError("inner_product_H: state/geometry size mismatch");

    auto pair_l2 = [](std::span<const Complex> x, std::span<const Complex> y, double h) {
        CVector prod(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) prod[i] = x[i] * std::conj(y[i]);
        return trapezoid(prod, h);
    };

    const CVector dua1 = derivative(a.u.halfline, g.h1());
    const CVector dub1 = derivative(b.u.halfline, g.h1());
    const CVector dua2 = derivative(a.u.loop, g.h2());
    const CVector dub2 = derivative(b.u.loop, g.h2());

    return pair_l2(dua1, dub1, g.h1()) + pair_l2(dua2, dub2, g.h2()) +
           pair_l2(a.v.halfline, b.v.halfline, g.h1()) + pair_l2(a.v.loop, b.v.loop, g.h2());
}

inline double norm_H(const StateVector& a, const TadpoleGeometry& g) {
    return std::sqrt(std::max(0.0, inner_product_H(a, a, g).real()));
}

/// E = (1/2) ||(u, v)||_H^2
inline double energy(const StateVector& s, const TadpoleGeometry& g) {
    return 0.5 * inner_product_H(s, s, g).real();
}

// Outgoing-flux imbalance at the vertex against the damping term:
// u1'(0+) + u2'(0+) - u2'(L-) - alpha v1(0).
inline Complex transmission_residual(const StateVector& s, const DampingParameter& alpha,
                                     const TadpoleGeometry& g) {
    const Complex flux = derivative_left(s.u.halfline, g.h1()) +
                         derivative_left(s.u.loop, g.h2()) -
                         derivative_right(s.u.loop, g.h2());
    return flux - alpha.alpha * s.v.halfline.front();
}

inline bool check_transmission(const StateVector& s, const DampingParameter& alpha,
                               const TadpoleGeometry& g, double tol) {
    return std::abs(transmission_residual(s, alpha, g)) <= tol;
}

// A_alpha (u, v) = (v, u''). The domain requires u and v continuous at the
// vertex; checked at a grid-level tolerance.
inline StateVector apply_generator(const StateVector& s, const DampingParameter&,
                                   const TadpoleGeometry& g, double vertex_tol = 1e-6) {
    if (!s.matches(g)) throw GeometryMismatchError("apply_generator: size mismatch");
    if (!s.u.continuous_at_vertex(vertex_tol) || !s.v.continuous_at_vertex(vertex_tol))
        throw DomainError("apply_generator: state not continuous at the vertex");
    StateVector out;
    out.u = s.v;
    out.v.halfline = second_derivative(s.u.halfline, g.h1());
    out.v.loop = second_derivative(s.u.loop, g.h2());
    return out;
}

// A_alpha^* (u, v) = (-v, -u''); its domain carries the transmission condition
// with -alpha.
inline StateVector apply_adjoint(const StateVector& s, const DampingParameter& alpha,
                                 const TadpoleGeometry& g, double vertex_tol = 1e-6) {
    return Complex(-1.0) * apply_generator(s, alpha, g, vertex_tol);
}

}  // namespace tadpole
