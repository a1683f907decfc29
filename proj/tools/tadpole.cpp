// Command-line front end: spectrum / resolvent / simulate / gram / decay-sweep
// subcommands emitting CSV and JSON. Exit codes: 0 success, 2 domain-condition
// outcome, 3 numerical failure, 64 usage error, 66 missing input file.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tadpole/resolvent.hpp"
#include "tadpole/riesz.hpp"
#include "tadpole/simulator.hpp"
#include "tadpole/spectrum.hpp"

using json = nlohmann::json;
using namespace tadpole;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kExitDomain = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Manifest {
    std::string command;
    std::map<std::string, std::string> params;
    std::vector<std::string> outputs;
};

void write_manifest(const Manifest& m, const std::string& path) {
    if (path.empty()) return;
    json j;
    j["command"] = m.command;
    j["params"] = m.params;
    j["outputs"] = m.outputs;
    const auto now = std::chrono::system_clock::now();
    j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                         now.time_since_epoch())
                         .count();
    j["tool_version"] = kVersion;
    std::ofstream(path) << j.dump(2) << "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // '\n' line ends everywhere
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(double alpha, double length, int n_min, int n_max, bool verify,
                 const std::string& out_path, const std::string& manifest_path) {
    const DampingParameter al(alpha);
    const auto embedded = embedded_eigenvalues(length, n_min, n_max);
    const auto damped = damped_eigenvalues(al, length, n_min, n_max);

    bool verified = true;
    if (verify && !damped.empty()) {
        double im_lo = damped.front().z.imag(), im_hi = damped.front().z.imag();
        for (const auto& e : damped) {
            im_lo = std::min(im_lo, e.z.imag());
            im_hi = std::max(im_hi, e.z.imag());
        }
        const double re = damped.front().z.real();
        const auto roots = find_roots(al, length,
                                      {re - 1.0, -0.01, im_lo - 0.5, im_hi + 0.5});
        for (const auto& e : damped) {
            double best = 1e300;
            for (const Complex& r : roots) best = std::min(best, std::abs(r - e.z));
            if (best > 1e-10) verified = false;
        }
    }

    auto out = open_out(out_path);
    out << "n,kind,re_z,im_z" << (verify ? ",det_residual" : "") << "\n";
    auto row = [&](const Eigenvalue& e) {
        out << e.n << "," << (e.kind == EigenvalueKind::Embedded ? "embedded" : "damped")
            << "," << fmt(e.z.real()) << "," << fmt(e.z.imag());
        if (verify) {
            const double res = e.kind == EigenvalueKind::Embedded
                                   ? std::abs(char_det_plus(e.z, al, length))
                                   : std::abs(char_det_minus(e.z, al, length));
            out << "," << fmt(res);
        }
        out << "\n";
    };
    for (const auto& e : embedded) row(e);
    for (const auto& e : damped) row(e);
    out.close();

    write_manifest({"spectrum",
                    {{"alpha", fmt(alpha)},
                     {"length", fmt(length)},
                     {"n_min", std::to_string(n_min)},
                     {"n_max", std::to_string(n_max)},
                     {"verify_roots", verify ? "true" : "false"}},
                    {out_path}},
                   manifest_path);
    if (!verified) {
        std::fprintf(stderr, "spectrum: root finder disagrees with the closed form\n");
        return kExitDomain;
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_resolvent(double alpha, double length, double re_min, double re_max, int re_steps,
                  double im_min, double im_max, int im_steps, double r_max, int n1, int n2,
                  const std::string& out_path, const std::string& manifest_path) {
    const DampingParameter al(alpha);
    const TadpoleGeometry g(length, r_max, n1, n2);

    // Fixed smooth data in the generator's domain, so residuals are meaningful.
    StateVector F = StateVector::zero(g);
    const double w0 = 0.7, v0 = 0.3, p = alpha * v0 + w0;
    for (int i = 0; i < g.halfline_points; ++i) {
        const double x = g.halfline_x(i);
        F.u.halfline[i] = (w0 + p * x) * std::exp(-x);
        F.v.halfline[i] = v0 * std::exp(-x);
    }
    for (int i = 0; i < g.loop_points; ++i) {
        const double x = g.loop_x(i);
        F.u.loop[i] = w0 + 0.4 * std::sin(2.0 * kPi * x / length);
        F.v.loop[i] = v0 + 0.1 * std::sin(2.0 * kPi * x / length);
    }

    auto out = open_out(out_path);
    out << "re_z,im_z,H_alpha,solution_norm,residual_pde,residual_transmission\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < re_steps; ++i) {
        const double re = re_steps == 1
                              ? re_min
                              : re_min + (re_max - re_min) * i / (re_steps - 1);
        for (int j = 0; j < im_steps; ++j) {
            const double im = im_steps == 1
                                  ? im_min
                                  : im_min + (im_max - im_min) * j / (im_steps - 1);
            const Complex z(re, im);
            const double h = estimate_function(z, al, length);
            double nrm = nan, rpde = nan, rtrans = nan;
            try {
                const auto sol = resolvent_apply(z, al, F, g);
                nrm = norm_H(sol.state, g);
                rpde = sol.residual_pde;
                rtrans = sol.residual_transmission;
            } catch (const NearSpectrumError&) {
                // grid point on the point spectrum: norms left as NaN
            }
            out << fmt(re) << "," << fmt(im) << "," << fmt(h) << "," << fmt(nrm) << ","
                << fmt(rpde) << "," << fmt(rtrans) << "\n";
        }
    }
    out.close();
    write_manifest({"resolvent",
                    {{"alpha", fmt(alpha)},
                     {"length", fmt(length)},
                     {"re_min", fmt(re_min)},
                     {"re_max", fmt(re_max)},
                     {"im_min", fmt(im_min)},
                     {"im_max", fmt(im_max)}},
                    {out_path}},
                   manifest_path);
    return 0;
}

// ---------------------------------------------------------------------------

SimulationConfig parse_config(const json& j) {
    const TadpoleGeometry g(j.at("loop_length").get<double>(),
                            j.at("halfline_truncation").get<double>(),
                            j.at("halfline_points").get<int>(),
                            j.at("loop_points").get<int>());
    SimulationConfig cfg{g, DampingParameter(j.at("alpha").get<double>()),
                         j.value("cfl", 0.9), j.at("t_final").get<double>(),
                         EmbeddedEigenfunctionIC{1}, j.value("record_stride", 1)};
    const json& ic = j.at("initial_condition");
    const std::string type = ic.at("type").get<std::string>();
    if (type == "damped_eigenfunction") {
        cfg.initial_condition = DampedEigenfunctionIC{ic.value("n", 0)};
    } else if (type == "embedded_eigenfunction") {
        cfg.initial_condition = EmbeddedEigenfunctionIC{ic.value("n", 1)};
    } else if (type == "gaussian_pulse") {
        cfg.initial_condition = GaussianPulseIC{
            ic.at("center").get<double>(), ic.at("width").get<double>(),
            ic.value("edge", std::string("halfline")) == "loop" ? EdgeKind::Loop
                                                                : EdgeKind::Halfline};
    } else {
        throw ParameterError("unknown initial_condition type: " + type);
    }
    return cfg;
}

int cmd_simulate(const std::string& config_path, const std::string& trace_path,
                 const std::string& summary_path, const std::string& manifest_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::fprintf(stderr, "simulate: cannot read config file %s\n", config_path.c_str());
        return kExitNoInput;
    }
    json jcfg = json::parse(in);
    const SimulationConfig cfg = parse_config(jcfg);

    EnergyTrace tr;
    try {
        tr = run(cfg);
    } catch (const SchemeFailureError& e) {
        std::fprintf(stderr, "simulate: %s\n", e.what());
        return kExitNumerical;
    }

    auto out = open_out(trace_path);
    out << "t,E,D,vertex_velocity_re,vertex_velocity_im\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        out << fmt(tr.times[i]) << "," << fmt(tr.energies[i]) << ","
            << fmt(tr.dissipation[i]) << "," << fmt(tr.vertex_velocity[i].real()) << ","
            << fmt(tr.vertex_velocity[i].imag()) << "\n";
    out.close();

    json summary;
    summary["E0"] = tr.energies.front();
    summary["E_final"] = tr.energies.back();
    summary["energy_identity_deviation"] = check_energy_identity(tr);
    double t0 = 0.1 * cfg.t_final, t1 = 0.9 * cfg.t_final;
    if (jcfg.contains("fit_window")) {
        t0 = jcfg["fit_window"][0].get<double>();
        t1 = jcfg["fit_window"][1].get<double>();
    }
    try {
        summary["omega_est"] = fit_decay_rate(tr, t0, t1).omega;
    } catch (const FitDomainError&) {
        summary["omega_est"] = nullptr;
    }
    std::ofstream(summary_path) << summary.dump(2) << "\n";

    write_manifest({"simulate",
                    {{"config", config_path}},
                    {trace_path, summary_path}},
                   manifest_path);
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_gram(double alpha, double length, int order, double r_max, int n1, int n2,
             const std::string& out_path, const std::string& bounds_path,
             const std::string& manifest_path) {
    const DampingParameter al(alpha);
    if (al.regime == Regime::NoDampedSpectrum) {
        std::fprintf(stderr, "gram: no damped spectrum for alpha = %g\n", alpha);
        return kExitDomain;
    }
    if (r_max <= 0.0) r_max = TadpoleGeometry::truncation_for(*spectral_abscissa(al, length));
    const TadpoleGeometry g(length, r_max, n1, n2);
    const GramMatrix gm = build_gram(order, al, length, g);
    const FrameBounds fb = frame_bounds(gm);

    auto out = open_out(out_path);
    out << "n,m,re,im\n";
    double max_off = 0.0;
    for (std::size_t i = 0; i < gm.dim(); ++i)
        for (std::size_t j = 0; j < gm.dim(); ++j) {
            const Complex v = gm.entries[i][j];
            out << (static_cast<int>(i) - order) << "," << (static_cast<int>(j) - order)
                << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
            if (i != j)
                max_off = std::max(max_off, std::abs(v) * std::abs(double(i) - double(j)));
        }
    out.close();

    json jb;
    jb["N"] = order;
    jb["A_lower"] = fb.lower;
    jb["B_upper"] = fb.upper;
    jb["max_offdiag_times_gap"] = max_off;
    std::ofstream(bounds_path) << jb.dump(2) << "\n";

    write_manifest({"gram",
                    {{"alpha", fmt(alpha)}, {"length", fmt(length)},
                     {"order", std::to_string(order)}},
                    {out_path, bounds_path}},
                   manifest_path);
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_decay_sweep(const std::vector<double>& alphas, double length, double t_final,
                    double h, const std::string& out_path,
                    const std::string& manifest_path) {
    for (double a : alphas)
        if (DampingParameter(a).regime == Regime::NoDampedSpectrum) {
            std::fprintf(stderr, "decay-sweep: no damped spectrum for alpha = %g\n", a);
            return kExitDomain;
        }
    struct Row {
        double alpha, omega_est, omega_expected, rel_error, e0, e_final;
    };
    auto one = [&](double a) -> Row {
        const DampingParameter al(a);
        const double omega = -*spectral_abscissa(al, length);
        const double rm = TadpoleGeometry::truncation_for(-omega) + t_final / 2.0;
        const int n1 = static_cast<int>(std::round(rm / h)) + 1;
        const int n2 = std::max(3, static_cast<int>(std::round(length / h)) + 1);
        const TadpoleGeometry g(length, rm, n1, n2);
        SimulationConfig cfg{g, al, 0.9, t_final, DampedEigenfunctionIC{0}, 50};
        const EnergyTrace tr = run(cfg);
        const DecayFit fit = fit_decay_rate(tr, 0.1 * t_final, 0.9 * t_final);
        return {a, fit.omega, omega, std::abs(fit.omega - omega) / omega,
                tr.energies.front(), tr.energies.back()};
    };

    std::size_t workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("TADPOLE_THREADS"))
        workers = std::max(1, std::atoi(env));
    workers = std::max<std::size_t>(1, std::min(workers, alphas.size()));

    std::vector<Row> rows(alphas.size());
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string fail_msg;
    std::mutex fail_mu;
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = cursor++; i < alphas.size(); i = cursor++) {
                try {
                    rows[i] = one(alphas[i]);
                } catch (const std::exception& e) {
                    failed = true;
                    std::lock_guard lk(fail_mu);
                    fail_msg = e.what();
                }
            }
        }));
    for (auto& f : pool) f.get();
    if (failed) {
        std::fprintf(stderr, "decay-sweep: %s\n", fail_msg.c_str());
        return kExitNumerical;
    }

    auto out = open_out(out_path);
    out << "alpha,omega_est,omega_expected,rel_error,E0,E_final\n";
    for (const Row& r : rows)
        out << fmt(r.alpha) << "," << fmt(r.omega_est) << "," << fmt(r.omega_expected)
            << "," << fmt(r.rel_error) << "," << fmt(r.e0) << "," << fmt(r.e_final)
            << "\n";
    out.close();

    std::string alist;
    for (double a : alphas) alist += (alist.empty() ? "" : ",") + fmt(a);
    write_manifest({"decay-sweep",
                    {{"alphas", alist}, {"length", fmt(length)}, {"t_final", fmt(t_final)},
                     {"h", fmt(h)}},
                    {out_path}},
                   manifest_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Spectral and time-domain analysis of the damped wave equation on a "
        "tadpole graph (a loop joined to a half-line at one vertex)"};
    app.require_subcommand(1);

    std::string manifest_path;

    // spectrum
    double s_alpha = 2.0, s_length = 1.0;
    int s_nmin = -2, s_nmax = 2;
    bool s_verify = false;
    std::string s_out = "spectrum.csv";
    auto* sp = app.add_subcommand(
        "spectrum",
        "Closed-form point spectrum (embedded and damped eigenvalue families), "
        "optionally cross-checked against an argument-principle root finder");
    sp->add_option("--alpha", s_alpha, "damping strength, >= 0")->required();
    sp->add_option("--length", s_length, "loop length L > 0")->required();
    sp->add_option("--n-min", s_nmin, "lowest mode index");
    sp->add_option("--n-max", s_nmax, "highest mode index");
    sp->add_flag("--verify-roots", s_verify,
                 "verify damped eigenvalues against the contour root finder");
    sp->add_option("--out", s_out, "output CSV path");

    // resolvent
    double r_alpha = 2.0, r_length = 1.0, r_remin = -2.0, r_remax = -0.1;
    double r_immin = -7.0, r_immax = 7.0, r_rmax = 20.0;
    int r_resteps = 9, r_imsteps = 29, r_n1 = 2001, r_n2 = 501;
    std::string r_out = "resolvent.csv";
    auto* rp = app.add_subcommand(
        "resolvent",
        "Resolvent sweep over a left-half-plane grid: applies (A - z)^{-1} to "
        "fixed smooth data and reports norms and residuals");
    rp->add_option("--alpha", r_alpha)->required();
    rp->add_option("--length", r_length)->required();
    rp->add_option("--re-min", r_remin, "Re z grid start");
    rp->add_option("--re-max", r_remax, "Re z grid end (< 0)");
    rp->add_option("--re-steps", r_resteps);
    rp->add_option("--im-min", r_immin);
    rp->add_option("--im-max", r_immax);
    rp->add_option("--im-steps", r_imsteps);
    rp->add_option("--r-max", r_rmax, "half-line truncation length");
    rp->add_option("--n1", r_n1, "half-line grid points");
    rp->add_option("--n2", r_n2, "loop grid points");
    rp->add_option("--out", r_out, "output CSV path");

    // simulate
    std::string m_config, m_trace = "trace.csv", m_summary = "summary.json";
    auto* mp = app.add_subcommand(
        "simulate",
        "Leapfrog time integration of the damped wave system; writes the "
        "energy trace and a decay summary");
    mp->add_option("--config", m_config, "SimulationConfig JSON file")->required();
    mp->add_option("--trace", m_trace, "output trace CSV path");
    mp->add_option("--summary", m_summary, "output summary JSON path");

    // gram
    double g_alpha = 2.0, g_length = 1.0, g_rmax = 0.0;
    int g_order = 8, g_n1 = 4001, g_n2 = 2001;
    std::string g_out = "gram.csv", g_bounds = "bounds.json";
    auto* gp = app.add_subcommand(
        "gram",
        "Gram matrix of the normalized damped eigenfunctions and its extreme "
        "eigenvalues (numerical Riesz-basis frame bounds)");
    gp->add_option("--alpha", g_alpha)->required();
    gp->add_option("--length", g_length)->required();
    gp->add_option("--order", g_order, "indices n in [-order, order]");
    gp->add_option("--r-max", g_rmax, "half-line truncation (0 = automatic)");
    gp->add_option("--n1", g_n1, "half-line grid points");
    gp->add_option("--n2", g_n2, "loop grid points");
    gp->add_option("--out", g_out, "output CSV path");
    gp->add_option("--bounds", g_bounds, "output frame-bounds JSON path");

    // decay-sweep
    std::vector<double> d_alphas{1.5, 2.0, 2.5};
    double d_length = 1.0, d_tfinal = 2.0, d_h = 4e-3;
    std::string d_out = "decay_sweep.csv";
    auto* dp = app.add_subcommand(
        "decay-sweep",
        "Fitted energy decay rate vs the spectral abscissa across damping "
        "strengths; runs fan out over a worker pool (TADPOLE_THREADS)");
    dp->add_option("--alphas", d_alphas, "damping strengths (each in (1,3) or (3,inf))");
    dp->add_option("--length", d_length);
    dp->add_option("--t-final", d_tfinal);
    dp->add_option("--dx", d_h, "grid spacing");
    dp->add_option("--out", d_out, "output CSV path");

    for (auto* sub : {sp, rp, mp, gp, dp})
        sub->add_option("--manifest", manifest_path,
                        "write a JSON run manifest to this path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sp)
            return cmd_spectrum(s_alpha, s_length, s_nmin, s_nmax, s_verify, s_out,
                                manifest_path);
        if (*rp)
            return cmd_resolvent(r_alpha, r_length, r_remin, r_remax, r_resteps, r_immin,
                                 r_immax, r_imsteps, r_rmax, r_n1, r_n2, r_out,
                                 manifest_path);
        if (*mp) return cmd_simulate(m_config, m_trace, m_summary, manifest_path);
        if (*gp)
            return cmd_gram(g_alpha, g_length, g_order, g_rmax, g_n1, g_n2, g_out, g_bounds,
                            manifest_path);
        if (*dp)
            return cmd_decay_sweep(d_alphas, d_length, d_tfinal, d_h, d_out, manifest_path);
    } catch (const ParameterError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const NoDampedSpectrumError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDomain;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
