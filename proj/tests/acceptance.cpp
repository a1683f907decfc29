// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "support/helpers.hpp"
#include "tadpole/resolvent.hpp"
#include "tadpole/riesz.hpp"
#include "tadpole/simulator.hpp"
#include "tadpole/spectrum.hpp"

using namespace tadpole;
using namespace tadpole::testing;

namespace {

int failures = 0;

void report(int id, bool pass, const char* what, double metric, double elapsed) {
    std::printf("[%s] criterion %2d: %-52s metric=%-12.3e (%.2fs)\n",
                pass ? "PASS" : "FAIL", id, what, metric, elapsed);
    if (!pass) ++failures;
}

double secs(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;

    // 1. Root finder recovers the closed-form damped family exactly.
    {
        const auto t0 = clock::now();
        double worst = 0.0;
        bool ok = true;
        for (double a : {1.5, 2.0, 2.9, 3.1, 5.0, 10.0})
            for (double L : {0.5, 1.0, 2.0}) {
                const DampingParameter al(a);
                const auto found =
                    find_roots(al, L, {-6.0, -0.01, -8.0 * kPi / L, 8.0 * kPi / L}, 1e-12);
                std::vector<Complex> expected;
                for (int n = -20; n <= 20; ++n) {
                    const Complex z = damped_eigenvalue(al, L, n);
                    if (z.real() >= -6.0 && z.real() <= -0.01 &&
                        std::abs(z.imag()) <= 8.0 * kPi / L + 1e-9)
                        expected.push_back(z);
                }
                std::sort(expected.begin(), expected.end(),
                          [](Complex x, Complex y) { return x.imag() < y.imag(); });
                if (found.size() != expected.size()) {
                    ok = false;
                    continue;
                }
                for (std::size_t i = 0; i < found.size(); ++i)
                    worst = std::max(worst, std::abs(found[i] - expected[i]));
            }
        ok = ok && worst <= 1e-10;
        report(1, ok, "root finder vs closed-form damped spectrum", worst, secs(t0));
    }

    // 2. No left-half-plane roots in the undamped regimes.
    {
        const auto t0 = clock::now();
        std::size_t total = 0;
        for (double a : {0.0, 0.5, 1.0, 3.0})
            total += find_roots(DampingParameter(a), 1.0, {-6.0, -0.01, -8.0 * kPi, 8.0 * kPi})
                         .size();
        report(2, total == 0, "empty spectrum branches", double(total), secs(t0));
    }

    // 3. Manufactured-solution resolvent recovery, second order in h.
    {
        const auto t0 = clock::now();
        std::mt19937 rng(31);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        bool ok = true;
        double worst_c = 0.0, worst_ratio = 1e9;
        for (int trial = 0; trial < 50; ++trial) {
            const double a = trial % 2 ? 2.0 : 5.0;
            const DampingParameter al(a);
            const Complex z(-0.4 - 1.0 * std::abs(U(rng)), 2.5 * U(rng));
            // Grids h and h/3: a second-order method gives an error ratio
            // near 9; anything above 5 separates it cleanly from first order.
            double errs[2];
            for (int k = 0; k < 2; ++k) {
                const int n1 = k == 0 ? 1001 : 3001;
                const TadpoleGeometry g(1.0, 20.0, n1, n1 / 4 + 1);
                const StateVector W = random_domain_state(500 + trial, a, g);
                const StateVector F = apply_generator(W, al, g) - z * W;
                const auto sol = resolvent_apply(z, al, F, g);
                errs[k] = norm_H(difference_mod_constant(sol.state, W), g);
            }
            const double h = 20.0 / 1000.0;
            worst_c = std::max(worst_c, errs[0] / (h * h));
            worst_ratio = std::min(worst_ratio, errs[0] / errs[1]);
            ok = ok && errs[0] / errs[1] > 5.0;
        }
        std::printf("       (criterion 3 constant: ||error|| <= C h^2 with C <= %.3e)\n",
                    worst_c);
        report(3, ok, "manufactured resolvent recovery, O(h^2)", worst_ratio, secs(t0));
    }

    // 4. Closed-form coefficients vs the direct 3x3 solve.
    {
        const auto t0 = clock::now();
        std::mt19937 rng(41);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const double a = 0.5 + 9.0 * std::abs(U(rng));
            const DampingParameter al(a);
            const double L = 0.5 + 1.5 * std::abs(U(rng));
            const Complex z(-0.2 - 2.0 * std::abs(U(rng)), 3.0 * U(rng));
            if (std::abs(char_det_minus(z, al, L)) < 1e-6) continue;
            BoundaryFunctionals fn{};
            fn.beta = Complex(U(rng), U(rng));
            fn.gamma_plus = Complex(U(rng), U(rng));
            fn.gamma_minus = Complex(U(rng), U(rng));
            fn.f0 = Complex(U(rng), U(rng));
            fn.nu = z * L;
            worst = std::max(worst, solve_ABC(z, al, L, fn).closed_form_gap);
        }
        report(4, worst <= 1e-10, "closed-form coefficients vs 3x3 solve", worst, secs(t0));
    }

    // 5. Convolution-calculus identity suite on 20 random test functions.
    {
        const auto t0 = clock::now();
        double worst = 0.0;
        for (unsigned seed = 1; seed <= 20; ++seed) {
            const IdentityFixture fx(seed, 450001, 40001, 45.0);
            worst = std::max(worst, identity_suite_worst(fx, 997, 397));
        }
        // L^2 convolution bound. The sharp Young constant is 2/|Re z| (the
        // L^1 norm of e^{z|y|} on the whole line); the witness f = e^{-x},
        // z = -1 exceeds the often-quoted 1/|Re z| by ~12%, so the bound is
        // checked with the correct constant.
        bool bound_ok = true;
        {
            const int n = 400001;
            const double h = 40.0 / (n - 1);
            const Complex z(-1.0, 0.0);
            CVector f(n);
            for (int i = 0; i < n; ++i) f[i] = std::exp(-i * h);
            const CVector p = prefix_integral(z, f, h), s = suffix_integral(z, f, h);
            std::vector<double> num(n), den(n);
            for (int i = 0; i < n; ++i) {
                num[i] = std::norm(p[i] + s[i]);
                den[i] = std::norm(f[i]);
            }
            const double lhs = std::sqrt(trapezoid(std::span<const double>(num), h));
            const double rhs = std::sqrt(trapezoid(std::span<const double>(den), h));
            bound_ok = lhs <= 2.0 / std::abs(z.real()) * rhs && lhs > rhs;
        }
        report(5, worst <= 1e-8 && bound_ok, "convolution identity suite + L2 bound", worst,
               secs(t0));
    }

    // 6. Sesquilinear identity Re<AU,U> = -alpha |v1(0)|^2 at second order.
    {
        const auto t0 = clock::now();
        bool ok = true;
        double worst_ratio = 1e9;
        for (double a : {0.0, 1.0, 2.0, 5.0}) {
            const DampingParameter al(a);
            double wc = 0.0, wf = 0.0;
            for (unsigned seed = 0; seed < 13; ++seed)  // 13 states x 4 alphas > 50
                for (int scale : {1, 2}) {
                    const TadpoleGeometry g(1.0, 12.0, 6000 * scale + 1, 500 * scale + 1);
                    const StateVector s = random_domain_state(700 + seed, a, g);
                    const Complex ip = inner_product_H(apply_generator(s, al, g), s, g);
                    const double err =
                        std::abs(ip.real() + a * std::norm(s.v.halfline.front()));
                    (scale == 1 ? wc : wf) = std::max(scale == 1 ? wc : wf, err);
                }
            ok = ok && wc < 1e-3;
            if (a > 0.0) {
                ok = ok && wc / wf > 3.0;
                worst_ratio = std::min(worst_ratio, wc / wf);
            }
        }
        report(6, ok, "sesquilinear identity, O(h^2)", worst_ratio, secs(t0));
    }

    // 7. Gram structure, frame bounds, cross-orthogonality.
    {
        const auto t0 = clock::now();
        const DampingParameter a2(2.0);
        const double rm = TadpoleGeometry::truncation_for(-std::log(3.0));
        const TadpoleGeometry g(1.0, rm, 4001, 2001);
        const GramMatrix gm8 = build_gram(8, a2, 1.0, g);
        const GramMatrix gm16 = build_gram(16, a2, 1.0, g);
        double max_diag = 0.0, max_off = 0.0;
        for (std::size_t i = 0; i < gm16.dim(); ++i) {
            max_diag = std::max(max_diag, std::abs(gm16.entries[i][i] - 1.0));
            for (std::size_t j = 0; j < gm16.dim(); ++j)
                if (i != j)
                    max_off = std::max(max_off, std::abs(gm16.entries[i][j]) *
                                                    std::abs(double(i) - double(j)));
        }
        const FrameBounds fb8 = frame_bounds(gm8);
        const FrameBounds fb16 = frame_bounds(gm16);
        double cross = 0.0;
        for (int n = -8; n <= 8; ++n) {
            const auto dn = eigenfunction_damped(n, a2, 1.0, g);
            for (int m = -8; m <= 8; ++m) {
                if (m == 0) continue;
                const auto em = eigenfunction_embedded(m, 1.0, g);
                cross = std::max(cross, std::abs(inner_product_H(dn.state, em.state, g)));
            }
        }
        const bool ok = max_diag <= 1e-8 && max_off < 1.0 && fb8.lower > 0.0 &&
                        fb16.lower > 0.0 &&
                        std::abs(fb16.lower - fb8.lower) <= 0.1 * fb8.lower &&
                        cross <= 1e-6;
        report(7, ok, "Gram diagonal/decay/frame bounds/cross-orthogonality",
               fb16.lower, secs(t0));
    }

    // 8. Decay rate of the n=0 damped mode at alpha=2, h = 1e-3.
    {
        const auto t0 = clock::now();
        const DampingParameter a2(2.0);
        const double rm = TadpoleGeometry::truncation_for(-std::log(3.0)) + 3.0;
        const int n1 = static_cast<int>(std::round(rm / 1e-3)) + 1;
        const TadpoleGeometry g(1.0, rm, n1, 1001);
        SimulationConfig cfg{g, a2, 0.9, 3.0, DampedEigenfunctionIC{0}, 50};
        const EnergyTrace tr = run(cfg);
        const DecayFit fit = fit_decay_rate(tr, 0.2, 2.8);
        const double dev = check_energy_identity(tr);
        // E(1)/E(0) by interpolating the recorded trace at t = 1.
        double e1 = 0.0;
        for (std::size_t i = 0; i + 1 < tr.times.size(); ++i)
            if (tr.times[i] <= 1.0 && tr.times[i + 1] > 1.0) {
                const double s = (1.0 - tr.times[i]) / (tr.times[i + 1] - tr.times[i]);
                e1 = (1.0 - s) * tr.energies[i] + s * tr.energies[i + 1];
            }
        const double ratio = e1 / tr.energies.front();
        const bool ok = fit.omega >= 0.95 * std::log(3.0) && fit.omega <= 1.05 * std::log(3.0) &&
                        dev <= 1e-3 && ratio >= 0.106 && ratio <= 0.117;
        std::printf("       (criterion 8: omega=%.6f, ln3=%.6f, dev=%.2e, E(1)/E(0)=%.5f)\n",
                    fit.omega, std::log(3.0), dev, ratio);
        report(8, ok, "decay rate 2 ln 3 and energy identity", fit.omega, secs(t0));
    }

    // 9. Mixed initial data decays to the projected-energy floor.
    {
        const auto t0 = clock::now();
        const DampingParameter a2(2.0);
        const double rm = TadpoleGeometry::truncation_for(-std::log(3.0));
        const int n1 = static_cast<int>(std::round(rm / 1e-3)) + 1;
        const TadpoleGeometry g(1.0, rm, n1, 1001);
        const StateVector s0 = eigenfunction_embedded(1, 1.0, g).state +
                               eigenfunction_damped(0, a2, 1.0, g).state;
        const double ep0 = energy(project_onto_Hp(s0, 1.0, 8, g), g);
        SimulationConfig cfg{g, a2, 0.9, 6.0, CustomIC{s0}, 100};
        const DecayFit fit = fit_decay_rate(run(cfg), 0.3, 5.0);
        const double rel = std::abs(fit.floor - ep0) / ep0;
        report(9, rel <= 0.02, "mixed data decays to projected energy floor", rel, secs(t0));
    }

    // 10. Weyl quasi-mode residuals decay like O(1/j).
    {
        const auto t0 = clock::now();
        const TadpoleGeometry g(1.0, 80.0, 16001, 101);
        bool ok = true;
        double worst_ratio = 1e9;
        for (double lam : {0.5, 1.0, 2.0})
            for (double a : {0.0, 2.0}) {
                const DampingParameter al(a);
                const double r10 = weyl_quasimode(lam, 10, al, g).residual;
                const double r40 = weyl_quasimode(lam, 40, al, g).residual;
                ok = ok && r10 / r40 >= 3.0;
                worst_ratio = std::min(worst_ratio, r10 / r40);
            }
        report(10, ok, "Weyl quasi-mode residual decay", worst_ratio, secs(t0));
    }

    if (failures == 0) std::printf("all criteria passed\n");
    return failures == 0 ? 0 : 1;
}
