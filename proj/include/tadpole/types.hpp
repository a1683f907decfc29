#pragma once

// Domain types for the damped wave operator on the tadpole graph: one loop of
// length L and one half-line (truncated at R_max for numerics) joined at a
// single vertex. Functions on the graph are sampled on uniform grids; the
// energy space pairs a position function (seen through its derivative only)
// with a velocity function.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "tadpole/numerics.hpp"

namespace tadpole {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct GeometryMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoDampedSpectrumError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NearSpectrumError : std::runtime_error {
    double distance_to_spectrum;
    NearSpectrumError(const std::string& msg, double dist)
        : std::runtime_error(msg), distance_to_spectrum(dist) {}
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularKernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RootRefinementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemeFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConditioningError : std::runtime_error {
    double lambda_min;
    ConditioningError(const std::string& msg, double lmin)
        : std::runtime_error(msg), lambda_min(lmin) {}
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Damping regimes: no left-half-plane point spectrum for alpha in [0,1] or
// alpha == 3; otherwise one horizontal line of eigenvalues appears.
enum class Regime { NoDampedSpectrum, LowRegime, HighRegime };

struct DampingParameter {
    double alpha;
    Regime regime;

    explicit DampingParameter(double a) : alpha(a), regime(regime_of(a)) {
        if (a < 0.0) throw ParameterError("damping alpha must be >= 0");
    }

    static Regime regime_of(double a) {
        if (a <= 1.0 || a == 3.0) return Regime::NoDampedSpectrum;
        return a < 3.0 ? Regime::LowRegime : Regime::HighRegime;
    }
};

struct TadpoleGeometry {
    double loop_length;          // L
    double halfline_truncation;  // R_max
    int halfline_points;         // N1
    int loop_points;             // N2

    TadpoleGeometry(double L, double r_max, int n1, int n2)
        : loop_length(L), halfline_truncation(r_max), halfline_points(n1), loop_points(n2) {
        if (L <= 0.0 || r_max <= 0.0) throw ParameterError("lengths must be positive");
        if (n1 < 3 || n2 < 3) throw ParameterError("need at least 3 grid points per edge");
    }

    double h1() const { return halfline_truncation / (halfline_points - 1); }
    double h2() const { return loop_length / (loop_points - 1); }

    double halfline_x(int i) const { return i * h1(); }
    double loop_x(int i) const { return i * h2(); }

    bool operator==(const TadpoleGeometry&) const = default;

    // R_max large enough that the tail mass e^{2 re_z R_max} of an exponential
    // mode with decay rate re_z < 0 is below `tail`.
    static double truncation_for(double re_z, double tail = 1e-12) {
        return std::log(tail) / (2.0 * re_z);
    }
};

// Sampled function on the graph: values on [0, R_max] and on [0, L].
struct GraphFunction {
    CVector halfline;
    CVector loop;

    static GraphFunction zero(const TadpoleGeometry& g) {
        GraphFunction f;
        f.halfline.assign(static_cast<std::size_t>(g.halfline_points), 0.0);
        f.loop.assign(static_cast<std::size_t>(g.loop_points), 0.0);
        return f;
    }

    Complex vertex_value() const { return halfline.front(); }

    // Vertex continuity across the three edge ends meeting at the vertex.
    bool continuous_at_vertex(double tol = 1e-10) const {
        return std::abs(halfline.front() - loop.front()) <= tol &&
               std::abs(loop.front() - loop.back()) <= tol;
    }

    bool matches(const TadpoleGeometry& g) const {
        return halfline.size() == static_cast<std::size_t>(g.halfline_points) &&
               loop.size() == static_cast<std::size_t>(g.loop_points);
    }
};

// Element of the energy space: u enters through its derivative only (position
// modulo additive constants), v is plain L^2.
struct StateVector {
    GraphFunction u;
    GraphFunction v;

    static StateVector zero(const TadpoleGeometry& g) {
        return {GraphFunction::zero(g), GraphFunction::zero(g)};
    }

    bool matches(const TadpoleGeometry& g) const { return u.matches(g) && v.matches(g); }
};

inline StateVector operator*(Complex c, const StateVector& s) {
    StateVector r = s;
    for (auto& x : r.u.halfline) x *= c;
    for (auto& x : r.u.loop) x *= c;
    for (auto& x : r.v.halfline) x *= c;
    for (auto& x : r.v.loop) x *= c;
    return r;
}

inline StateVector operator+(const StateVector& a, const StateVector& b) {
    StateVector r = a;
    for (std::size_t i = 0; i < r.u.halfline.size(); ++i) r.u.halfline[i] += b.u.halfline[i];
    for (std::size_t i = 0; i < r.u.loop.size(); ++i) r.u.loop[i] += b.u.loop[i];
    for (std::size_t i = 0; i < r.v.halfline.size(); ++i) r.v.halfline[i] += b.v.halfline[i];
    for (std::size_t i = 0; i < r.v.loop.size(); ++i) r.v.loop[i] += b.v.loop[i];
    return r;
}

inline StateVector operator-(const StateVector& a, const StateVector& b) {
    return a + (Complex(-1.0) * b);
}

}  // namespace tadpole
