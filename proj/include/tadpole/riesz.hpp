#pragma once

// Gram matrix of the normalized damped eigenfunctions, frame bounds
// certifying the Riesz basis numerically, truncated basis expansion and the
// orthogonal projection onto the embedded (undamped) eigenspace.

#include <cmath>
#include <complex>
#include <vector>

#include "tadpole/core.hpp"
#include "tadpole/numerics.hpp"
#include "tadpole/spectrum.hpp"
#include "tadpole/types.hpp"

namespace tadpole {

// K from the loop-component norm of the damped eigenfunctions (closed form is
// for alpha in (1,3); the high regime goes through quadrature instead).
inline double k_constant(const DampingParameter& alpha, double L) {
    if (alpha.regime != Regime::LowRegime)
        throw ParameterError("k_constant: closed form only for alpha in (1,3)");
    const double a = alpha.alpha;
    const double w = std::log((1.0 + a) / (3.0 - a)) / L;
    const double cm = (3.0 - a) / 4.0, cp = (1.0 + a) / 4.0;
    return cm * cm * (std::exp(2.0 * w * L) - 1.0) + cp * cp * (1.0 - std::exp(-2.0 * w * L));
}

// Family of normalized damped eigenfunctions for n in [-N, N].
inline std::vector<Eigenfunction> damped_family(int N, const DampingParameter& alpha,
                                                double L, const TadpoleGeometry& g) {
    std::vector<Eigenfunction> out;
    out.reserve(2 * N + 1);
    for (int n = -N; n <= N; ++n) out.push_back(eigenfunction_damped(n, alpha, L, g));
    return out;
}

// Quadrature Gram entry <Psi_n, Psi_m>_H of normalized damped eigenfunctions.
inline Complex gram_entry(int n, int m, const DampingParameter& alpha, double L,
                          const TadpoleGeometry& g) {
    const Eigenfunction en = eigenfunction_damped(n, alpha, L, g);
    const Eigenfunction em = eigenfunction_damped(m, alpha, L, g);
    return inner_product_H(en.state, em.state, g);
}

// Reference closed form for the same entry, kept as a diagnostic: it does
// not match quadrature off the diagonal.
inline Complex gram_entry_printed(int n, int m, const DampingParameter& alpha, double L) {
    if (alpha.regime != Regime::LowRegime)
        throw ParameterError("gram_entry_printed: closed form only for alpha in (1,3)");
    const double w = std::log((1.0 + alpha.alpha) / (3.0 - alpha.alpha)) / L;
    const double nu = 2.0 * kPi / L;
    const double K = k_constant(alpha, L);
    auto zc = [&](int k) { return Complex(-w, k * nu); };
    auto printed_c = [&](int k) {
        return 1.0 / std::sqrt((w + (nu / w) * (nu / w) * k * k) * (1.0 + K));
    };
    if (n != -m)
        return (1.0 + K) * printed_c(n) * printed_c(m) * zc(n) * std::conj(zc(m)) /
               Complex(w, (n - m) * nu);
    const double extra = (1.0 + alpha.alpha) * (3.0 - alpha.alpha) * L / 8.0;
    return (1.0 + K - extra) * printed_c(n) * printed_c(n) * std::norm(zc(n)) /
           Complex(w, nu);
}

struct GramMatrix {
    int order;  // indices n in [-order, order]
    CMatrix entries;
    double alpha;
    double L;
    double k_const;

    std::size_t dim() const { return entries.size(); }
};

inline GramMatrix build_gram(int N, const DampingParameter& alpha, double L,
                             const TadpoleGeometry& g) {
    const auto family = damped_family(N, alpha, L, g);
    const std::size_t dim = family.size();
    GramMatrix gm;
    gm.order = N;
    gm.alpha = alpha.alpha;
    gm.L = L;
    gm.k_const = alpha.regime == Regime::LowRegime ? k_constant(alpha, L) : 0.0;
    gm.entries.assign(dim, CVector(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            const Complex v = inner_product_H(family[i].state, family[j].state, g);
            gm.entries[i][j] = v;
            gm.entries[j][i] = std::conj(v);
        }
    }
    return gm;
}

struct FrameBounds {
    double lower;  // lambda_min of the Gram matrix
    double upper;  // lambda_max
};

inline FrameBounds frame_bounds(const GramMatrix& gm) {
    const std::size_t dim = gm.dim();
    double herm = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            herm = std::max(herm, std::abs(gm.entries[i][j] - std::conj(gm.entries[j][i])));
            scale = std::max(scale, std::abs(gm.entries[i][j]));
        }
    if (herm > 1e-10 * std::max(1.0, scale))
        throw ValidationError("frame_bounds: Gram matrix is not Hermitian");
    const auto ev = hermitian_eigenvalues(gm.entries);
    return {ev.front(), ev.back()};
}

struct BasisExpansion {
    CVector coefficients;  // index n = -order..order maps to slot n + order
    double residual;       // ||state - sum c_n Psi_n||_H
};

// Least-squares coefficients of `state` in the truncated damped family. The
// normal equations read sum_j G_{ji} c_j = <state, Psi_i>_H, i.e. G^T c = b;
// conjugating both sides turns that into the Hermitian solve G cbar = bbar.
inline BasisExpansion expand_in_basis(const StateVector& state, const DampingParameter& alpha,
                                      double L, int N, const TadpoleGeometry& g) {
    const auto family = damped_family(N, alpha, L, g);
    const GramMatrix gm = build_gram(N, alpha, L, g);
    const auto ev = hermitian_eigenvalues(gm.entries);
    if (ev.front() <= 1e-12)
        throw ConditioningError("expand_in_basis: Gram matrix numerically singular",
                                ev.front());
    CVector b(family.size());
    for (std::size_t i = 0; i < family.size(); ++i)
        b[i] = inner_product_H(family[i].state, state, g);
    CVector c = solve_dense(gm.entries, b);
    for (auto& v : c) v = std::conj(v);

    StateVector rec = StateVector::zero(g);
    for (std::size_t i = 0; i < family.size(); ++i) rec = rec + c[i] * family[i].state;
    return {std::move(c), norm_H(state - rec, g)};
}

// Orthogonal projection onto the span of the embedded eigenfunctions with
// |m| <= N_embedded (mutually orthogonal, so the plain sum of projections).
inline StateVector project_onto_Hp(const StateVector& state, double L, int N_embedded,
                                   const TadpoleGeometry& g) {
    StateVector out = StateVector::zero(g);
    for (int m = -N_embedded; m <= N_embedded; ++m) {
        if (m == 0) continue;
        const Eigenfunction psi = eigenfunction_embedded(m, L, g);
        out = out + inner_product_H(state, psi.state, g) * psi.state;
    }
    return out;
}

}  // namespace tadpole
