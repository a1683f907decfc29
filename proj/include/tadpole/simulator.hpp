#pragma once

// Explicit leapfrog solver for the wave equation on the truncated tadpole.
// The vertex couples the three edge ends through a ghost-point closure that
// enforces continuity and the damped flux balance to second order; the far
// end of the half-line carries a transparent (Mur) condition. Produces energy
// traces with the cumulative vertex dissipation integral.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <variant>
#include <vector>

#include "tadpole/core.hpp"
#include "tadpole/numerics.hpp"
#include "tadpole/spectrum.hpp"
#include "tadpole/types.hpp"

namespace tadpole {

enum class EdgeKind { Halfline, Loop };

struct DampedEigenfunctionIC {
    int n = 0;
};
struct EmbeddedEigenfunctionIC {
    int n = 1;
};
struct GaussianPulseIC {
    double center;
    double width;
    EdgeKind edge = EdgeKind::Halfline;
};
struct CustomIC {
    StateVector state;
};

using InitialCondition =
    std::variant<DampedEigenfunctionIC, EmbeddedEigenfunctionIC, GaussianPulseIC, CustomIC>;

struct SimulationConfig {
    TadpoleGeometry geometry;
    DampingParameter alpha;
    double cfl = 0.9;
    double t_final = 1.0;
    InitialCondition initial_condition;
    int record_stride = 1;

    double dt() const { return cfl * std::min(geometry.h1(), geometry.h2()); }

    void validate() const {
        if (cfl <= 0.0 || cfl > 1.0) throw ParameterError("cfl must be in (0, 1]");
        if (t_final <= 0.0) throw ParameterError("t_final must be positive");
        if (record_stride < 1) throw ParameterError("record_stride must be >= 1");
        if (const auto* p = std::get_if<GaussianPulseIC>(&initial_condition)) {
            if (p->edge == EdgeKind::Halfline &&
                (p->center - 4.0 * p->width <= 0.0 ||
                 p->center + 4.0 * p->width >= geometry.halfline_truncation))
                throw ParameterError("gaussian pulse support must stay inside the half-line");
        }
    }
};

struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> energies;
    std::vector<double> dissipation;  // 2 alpha int_0^t |u_t(0,s)|^2 ds, cumulative
    CVector vertex_velocity;
    StateVector final_state;  // (u, u_t) at the last computed step
};

namespace detail {

struct WaveField {
    CVector u1;  // half-line, index 0 at the vertex
    CVector u2;  // loop, indices 0 and N2-1 both at the vertex
};

inline StateVector make_initial_state(const SimulationConfig& cfg) {
    const TadpoleGeometry& g = cfg.geometry;
    return std::visit(
        [&](const auto& ic) -> StateVector {
            using T = std::decay_t<decltype(ic)>;
            if constexpr (std::is_same_v<T, DampedEigenfunctionIC>) {
                return eigenfunction_damped(ic.n, cfg.alpha, g.loop_length, g).state;
            } else if constexpr (std::is_same_v<T, EmbeddedEigenfunctionIC>) {
                return eigenfunction_embedded(ic.n, g.loop_length, g).state;
            } else if constexpr (std::is_same_v<T, GaussianPulseIC>) {
                StateVector s = StateVector::zero(g);
                auto fill = [&](CVector& u, auto xf, int n) {
                    for (int i = 0; i < n; ++i) {
                        const double d = xf(i) - ic.center;
                        u[i] = std::exp(-d * d / (2.0 * ic.width * ic.width));
                    }
                };
                if (ic.edge == EdgeKind::Halfline)
                    fill(s.u.halfline, [&](int i) { return g.halfline_x(i); },
                         g.halfline_points);
                else
                    fill(s.u.loop, [&](int i) { return g.loop_x(i); }, g.loop_points);
                return s;
            } else {
                return ic.state;
            }
        },
        cfg.initial_condition);
}

// Common one-sided flux sum toward the vertex, divided by nothing: the D term
// of the vertex closure.
inline Complex vertex_flux_term(const WaveField& w, double h1, double h2) {
    const Complex wv = w.u1[0];
    return (w.u1[1] - wv) / h1 + (w.u2[1] + w.u2[w.u2.size() - 2] - 2.0 * wv) / h2;
}

}  // namespace detail

// One leapfrog step: fields at levels k-1 (prev) and k (curr) produce level
// k+1. The vertex second-difference s solves the flux balance with the
// damping term centered in time; equivalently the three ghost values of a
// 3x3 local system, eliminated analytically.
inline detail::WaveField leapfrog_step(const detail::WaveField& prev,
                                       const detail::WaveField& curr,
                                       const SimulationConfig& cfg) {
    const TadpoleGeometry& g = cfg.geometry;
    const double h1 = g.h1(), h2 = g.h2(), dt = cfg.dt();
    const double a = cfg.alpha.alpha;
    const double r1 = dt * dt / (h1 * h1), r2 = dt * dt / (h2 * h2);
    if (dt > std::min(h1, h2) * (1.0 + 1e-12))
        throw SchemeFailureError("leapfrog_step: CFL violation");

    const std::size_t n1 = curr.u1.size(), n2 = curr.u2.size();
    detail::WaveField next{CVector(n1), CVector(n2)};

    for (std::size_t i = 1; i + 1 < n1; ++i)
        next.u1[i] = 2.0 * curr.u1[i] - prev.u1[i] +
                     r1 * (curr.u1[i + 1] - 2.0 * curr.u1[i] + curr.u1[i - 1]);
    for (std::size_t i = 1; i + 1 < n2; ++i)
        next.u2[i] = 2.0 * curr.u2[i] - prev.u2[i] +
                     r2 * (curr.u2[i + 1] - 2.0 * curr.u2[i] + curr.u2[i - 1]);

    // Vertex closure.
    const Complex w_k = curr.u1[0], w_km1 = prev.u1[0];
    const Complex d = detail::vertex_flux_term(curr, h1, h2);
    const Complex s =
        (d - a * (w_k - w_km1) / dt) / (0.5 * h1 + h2 + 0.5 * a * dt);
    const Complex w_next = 2.0 * w_k - w_km1 + dt * dt * s;
    next.u1[0] = w_next;
    next.u2[0] = w_next;
    next.u2[n2 - 1] = w_next;

    // Transparent far end: Mur discretization of u_t + u_x = 0.
    next.u1[n1 - 1] = curr.u1[n1 - 2] +
                      (dt - h1) / (dt + h1) * (next.u1[n1 - 2] - curr.u1[n1 - 1]);
    return next;
}

namespace detail {

// First step by Taylor expansion u^1 = u^0 + dt v^0 + dt^2/2 u_xx^0, using the
// vertex closure with the known initial vertex velocity.
inline WaveField first_step(const WaveField& u0, const StateVector& s0,
                            const SimulationConfig& cfg) {
    const TadpoleGeometry& g = cfg.geometry;
    const double h1 = g.h1(), h2 = g.h2(), dt = cfg.dt();
    const std::size_t n1 = u0.u1.size(), n2 = u0.u2.size();
    WaveField u1{CVector(n1), CVector(n2)};

    const CVector uxx1 = second_derivative(u0.u1, h1);
    const CVector uxx2 = second_derivative(u0.u2, h2);
    for (std::size_t i = 1; i < n1 - 1; ++i)
        u1.u1[i] = u0.u1[i] + dt * s0.v.halfline[i] + 0.5 * dt * dt * uxx1[i];
    for (std::size_t i = 1; i < n2 - 1; ++i)
        u1.u2[i] = u0.u2[i] + dt * s0.v.loop[i] + 0.5 * dt * dt * uxx2[i];

    const Complex d = vertex_flux_term(u0, h1, h2);
    const Complex s = (d - cfg.alpha.alpha * s0.v.halfline[0]) / (0.5 * h1 + h2);
    const Complex w1 = u0.u1[0] + dt * s0.v.halfline[0] + 0.5 * dt * dt * s;
    u1.u1[0] = w1;
    u1.u2[0] = w1;
    u1.u2[n2 - 1] = w1;

    u1.u1[n1 - 1] = u0.u1[n1 - 1] + dt * s0.v.halfline[n1 - 1] + 0.5 * dt * dt * uxx1[n1 - 1];
    return u1;
}

inline StateVector assemble_state(const WaveField& prev, const WaveField& curr,
                                  const WaveField& next, double dt,
                                  const TadpoleGeometry& g) {
    StateVector s = StateVector::zero(g);
    s.u.halfline = curr.u1;
    s.u.loop = curr.u2;
    for (std::size_t i = 0; i < curr.u1.size(); ++i)
        s.v.halfline[i] = (next.u1[i] - prev.u1[i]) / (2.0 * dt);
    for (std::size_t i = 0; i < curr.u2.size(); ++i)
        s.v.loop[i] = (next.u2[i] - prev.u2[i]) / (2.0 * dt);
    return s;
}

}  // namespace detail

inline EnergyTrace run(const SimulationConfig& cfg) {
    cfg.validate();
    const TadpoleGeometry& g = cfg.geometry;
    const double dt = cfg.dt();
    const int steps = static_cast<int>(std::ceil(cfg.t_final / dt));

    const StateVector s0 = detail::make_initial_state(cfg);
    detail::WaveField prev{s0.u.halfline, s0.u.loop};
    detail::WaveField curr = detail::first_step(prev, s0, cfg);

    EnergyTrace trace;
    const double e0 = energy(s0, g);
    trace.times.push_back(0.0);
    trace.energies.push_back(e0);
    trace.dissipation.push_back(0.0);
    trace.vertex_velocity.push_back(s0.v.halfline[0]);

    double diss = 0.0;
    Complex wt_prev = s0.v.halfline[0];
    double e_last_record = e0;

    for (int k = 1; k <= steps; ++k) {
        const detail::WaveField next = leapfrog_step(prev, curr, cfg);
        const Complex wt = (next.u1[0] - prev.u1[0]) / (2.0 * dt);
        diss += 2.0 * cfg.alpha.alpha * 0.5 * dt * (std::norm(wt_prev) + std::norm(wt));
        wt_prev = wt;

        if (k % cfg.record_stride == 0 || k == steps) {
            StateVector sk = detail::assemble_state(prev, curr, next, dt, g);
            const double e = energy(sk, g);
            if (e > e_last_record * 1.01 + 1e-12 * e0)
                throw SchemeFailureError("run: energy grew by more than 1% between records");
            e_last_record = e;
            trace.times.push_back(k * dt);
            trace.energies.push_back(e);
            trace.dissipation.push_back(diss);
            trace.vertex_velocity.push_back(wt);
            if (k == steps) trace.final_state = std::move(sk);
        }
        prev = curr;
        curr = next;
    }
    return trace;
}

// Max relative deviation in the energy identity 2E(t) - 2E(0) = -D(t).
inline double check_energy_identity(const EnergyTrace& trace) {
    const double e0 = trace.energies.front();
    double dev = 0.0;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        dev = std::max(dev, std::abs(2.0 * trace.energies[i] - 2.0 * e0 +
                                     trace.dissipation[i]) /
                                (2.0 * e0));
    return dev;
}

struct DecayFit {
    double omega;  // fitted decay rate: E - floor ~ exp(-2 omega t)
    double floor;  // fitted asymptote
    double mse;    // mean squared log-residual of the chosen fit
};

// Two-parameter least squares on the window [t_start, t_end]: the floor by
// golden-section search, the rate from the line fit of ln(E - floor).
inline DecayFit fit_decay_rate(const EnergyTrace& trace, double t_start, double t_end) {
    std::vector<double> ts, es;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        if (trace.times[i] >= t_start && trace.times[i] <= t_end) {
            ts.push_back(trace.times[i]);
            es.push_back(trace.energies[i]);
        }
    if (ts.size() < 3) throw FitDomainError("fit_decay_rate: too few samples in window");
    const double e_min = *std::min_element(es.begin(), es.end());
    const double e_max = *std::max_element(es.begin(), es.end());
    if (e_min <= 0.0) throw FitDomainError("fit_decay_rate: non-positive energy in window");

    // Line fit of ln(E - floor) restricted to samples at least three decades
    // above the candidate floor: closer samples are dominated by scheme noise
    // once the trace has plateaued. Mean squared residual keeps fits over
    // different sample counts comparable.
    struct Candidate {
        LineFit fit;
        double mse = std::numeric_limits<double>::infinity();
    };
    auto fit_for_floor = [&](double floor) -> Candidate {
        std::vector<double> xs, ln;
        const double cut = 1e-3 * (e_max - floor);
        for (std::size_t i = 0; i < es.size(); ++i)
            if (es[i] - floor >= cut) {
                xs.push_back(ts[i]);
                ln.push_back(std::log(es[i] - floor));
            }
        if (xs.size() < 3) return {};
        const LineFit f = fit_line(xs, ln);
        return {f, f.sse / static_cast<double>(xs.size())};
    };

    // Nearly flat trace: no decaying component to fit a floor against.
    if (e_max - e_min < 1e-9 * e_max) {
        std::vector<double> ln(es.size());
        for (std::size_t i = 0; i < es.size(); ++i) ln[i] = std::log(es[i]);
        const LineFit f = fit_line(ts, ln);
        return {-0.5 * f.slope, 0.0, f.sse / static_cast<double>(es.size())};
    }

    // The optimal floor usually sits in a thin layer just below min E (the
    // plateau), so parameterize by the log-distance below e_min: floor(s) =
    // e_min - span * 10^{-s}. Quarter-decade scan down to 12 decades, then
    // golden-section refinement in s over the winning bracket.
    const double span = e_max - e_min;
    auto floor_of = [&](double s) { return std::max(0.0, e_min - span * std::pow(10.0, -s)); };
    auto mse_of = [&](double s) { return fit_for_floor(floor_of(s)).mse; };
    const double s_step = 0.25, s_max = 12.0;
    double best_s = 0.0, best_val = std::numeric_limits<double>::infinity();
    for (double s = 0.0; s <= s_max; s += s_step) {
        const double val = mse_of(s);
        if (val < best_val) {
            best_val = val;
            best_s = s;
        }
    }
    double lo = std::max(0.0, best_s - s_step), hi = std::min(s_max, best_s + s_step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = mse_of(x1), f2 = mse_of(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = mse_of(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = mse_of(x2);
        }
    }
    double floor = floor_of(0.5 * (lo + hi));
    Candidate best = fit_for_floor(floor);
    if (best_val < best.mse) {
        floor = floor_of(best_s);
        best = fit_for_floor(floor);
    }
    const Candidate zero = fit_for_floor(0.0);
    if (zero.mse <= best.mse) return {-0.5 * zero.fit.slope, 0.0, zero.mse};
    return {-0.5 * best.fit.slope, floor, best.mse};
}

}  // namespace tadpole
