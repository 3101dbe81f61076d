// acceptance_main.cpp — end-to-end acceptance suite.  Each criterion prints one
// [PASS]/[FAIL] line with the measured numbers next to the required band; the
// process exits nonzero if any selected criterion fails.
//
// Usage: acceptance [--scenario table1.json] [--criterion N ...]

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "mist/figures.hpp"

using namespace mist;

namespace {

struct Report {
    int failures = 0;

    void line(int id, bool pass, const std::string& detail) {
        std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. Two-photon resonance: omega_3/2pi within 5% of 2 * 5.9436 GHz.
void criterion_1(const ModelContext& ctx, Report& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const double w3 = rad_to_ghz(ctx.spectrum.omega(3));
    const double target = 2.0 * 5.9436;
    const bool pass = w3 >= 0.95 * target && w3 <= 1.05 * target;
    rep.line(1, pass,
             fmt("two-photon resonance: omega_3/2pi = %.4f GHz in [%.4f, %.4f] (%.1f s)",
                 w3, 0.95 * target, 1.05 * target, elapsed_s(t0)));
}

// ---------------------------------------------------------------------------
// 2. Regime boundaries within [5, 7] and [7, 9] MHz at n_max = 100.
// 3. |Pg_ss(analytic) - Pg_ss(solver)| <= 0.05 wherever kappa/|g_eff| > 5.
void criteria_2_3(const ModelContext& ctx, Report& rep, bool want2, bool want3) {
    const auto t0 = std::chrono::steady_clock::now();
    ScanOptions opt;
    opt.n_max = 100;
    const std::vector<double> grid = ctx.scn.epsilon_grid_required("acceptance");
    const ScanResult scan = steady_scan(ctx.params, grid, {}, opt);
    const RegimeBoundaries rb = regime_boundaries(scan);
    const double runtime = elapsed_s(t0);

    if (want2) {
        const double b1 = rb.sub_to_mist ? rad_to_mhz(*rb.sub_to_mist) : -1.0;
        const double b2 = rb.mist_to_super ? rad_to_mhz(*rb.mist_to_super) : -1.0;
        const bool pass = b1 >= 5.0 && b1 <= 7.0 && b2 >= 7.0 && b2 <= 9.0 &&
                          runtime < 600.0;
        rep.line(2, pass,
                 fmt("regime thresholds: sub->MIST %.2f MHz in [5,7], MIST->super %.2f MHz "
                     "in [7,9], scan %.0f s (< 600 s)", b1, b2, runtime));
    }
    if (want3) {
        double worst = 0.0, worst_eps = 0.0;
        int checked = 0;
        for (const auto& pt : scan.points) {
            if (!pt.ok) continue;
            if (ctx.params.kappa / std::abs(ctx.params.g_eff) <= 5.0) continue;
            const RateResult r =
                transition_rates(ctx.params.with_drive(pt.epsilon_d, pt.delta_a));
            const double diff = std::abs(pt.Pg_ss - r.Pg_ss);
            ++checked;
            if (diff > worst) {
                worst = diff;
                worst_eps = rad_to_mhz(pt.epsilon_d);
            }
        }
        rep.line(3, worst <= 0.05,
                 fmt("analytic vs solver steady state: worst |dPg| = %.4f at %.1f MHz "
                     "(tolerance 0.05, %d points with kappa/|g_eff| > 5)",
                     worst, worst_eps, checked));
    }
}

// ---------------------------------------------------------------------------
// 4. Fitted gamma within 10% of analytic at eps/2pi in {3, 5, 10, 12} MHz,
//    plus a local minimum of gamma(eps) inside the MIST window.
void criterion_4(const ModelContext& ctx, Report& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> eps_mhz{3.0, 5.0, 10.0, 12.0};
    std::vector<FittedRatePoint> fits(eps_mhz.size());
    parallel_for(eps_mhz.size(), [&](std::size_t i) {
        fits[i] = fit_rate_at(ctx, mhz_to_rad(eps_mhz[i]));
    });
    bool pass = true;
    std::string detail = "fitted vs analytic gamma:";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        const double rel =
            std::abs(fits[i].fit.gamma - fits[i].analytic.gamma) / fits[i].analytic.gamma;
        pass = pass && fits[i].fit.decaying && rel <= 0.10;
        detail += fmt(" %.0fMHz:%.1f%%", eps_mhz[i], 100.0 * rel);
    }

    // structural check: gamma(eps) has an interior local minimum inside the window
    const std::vector<double> grid = ctx.scn.epsilon_grid_required("acceptance");
    std::vector<double> gamma_curve(grid.size(), std::nan(""));
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            gamma_curve[i] =
                transition_rates(ctx.params.with_drive(grid[i], ctx.params.delta_a)).gamma;
        } catch (const std::exception&) {}
    });
    ScanOptions opt;
    opt.n_max = 100;
    double min_eps = -1.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (std::isfinite(gamma_curve[i]) && gamma_curve[i] < gamma_curve[i - 1] &&
            gamma_curve[i] < gamma_curve[i + 1]) {
            min_eps = rad_to_mhz(grid[i]);
            break;
        }
    // the MIST window from the analytic steady state (0.95 crossings)
    double w_lo = -1.0, w_hi = -1.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const RateResult a =
            transition_rates(ctx.params.with_drive(grid[i - 1], ctx.params.delta_a));
        const RateResult b =
            transition_rates(ctx.params.with_drive(grid[i], ctx.params.delta_a));
        if (w_lo < 0 && a.Pg_ss > 0.95 && b.Pg_ss <= 0.95) w_lo = rad_to_mhz(grid[i - 1]);
        if (w_hi < 0 && a.Ph_ss < 0.95 && b.Ph_ss >= 0.95) w_hi = rad_to_mhz(grid[i]);
    }
    const bool min_in_window = min_eps > w_lo && w_hi > 0 && min_eps < w_hi;
    pass = pass && min_in_window;
    detail += fmt("; gamma local min at %.1f MHz inside MIST window [%.1f, %.1f]: %s "
                  "(%.0f s)", min_eps, w_lo, w_hi, min_in_window ? "yes" : "no",
                  elapsed_s(t0));
    rep.line(4, pass, detail);
}

// ---------------------------------------------------------------------------
// 5. Super-MIST divergence at eps/2pi = 12 MHz, t = 5 us.
void criterion_5(const ModelContext& ctx, Report& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps = mhz_to_rad(12.0);
    const double t_end = us_to_ns(5.0);

    // semiclassical
    const FullSystem scs = full_system_from(ctx, eps, 1);
    Vector psi0 = Vector::Zero(ctx.scn.j_max);
    psi0(0) = 1.0;
    const SemiclassicalResult sc =
        evolve_semiclassical(scs, psi0, cd(0.0, 0.0), uniform_grid(t_end, ctx.scn.dt_ns));
    const double sc_pg = sc.series.rows.back()[1];

    // reduced with negativity tracking
    const ReducedParams p = ctx.params.with_drive(eps, ctx.params.delta_a);
    Index n_max = std::max<Index>(40, suggested_n_max(p));
    const ReducedSystem sys = build_reduced_system(p, n_max);
    double peak_neg = 0.0;
    ReducedEvolveOptions opt;
    opt.on_sample = [&](double, const Matrix& rho) {
        peak_neg = std::max(peak_neg, negativity(rho, {2, n_max + 1}).negativity);
    };
    const EvolutionResult red =
        evolve_reduced(sys, reduced_vacuum_state(sys, 0), uniform_grid(t_end, 25.0), opt);
    const double red_pg = red.series.rows.back()[1];

    const bool pass = sc_pg >= 0.8 && sc_pg <= 1.0 && red_pg <= 0.3 && peak_neg > 0.05;
    rep.line(5, pass,
             fmt("super-MIST divergence at 12 MHz, 5 us: semiclassical Pg = %.3f in "
                 "[0.8, 1], reduced Pg = %.3f <= 0.3, peak negativity %.3f > 0.05, "
                 "semiclassical negativity = 0 by construction (%.0f s)",
                 sc_pg, red_pg, peak_neg, elapsed_s(t0)));
}

// ---------------------------------------------------------------------------
// 6. Full-vs-reduced tracking at desk scale (n_max = 40, j_max = 4, 100
//    trajectories): |Pg(full) - Pg(reduced, lab-frame-mapped)| <= 0.1 + 3 stderr
//    at t in {0.5, 1, 2} us.
void criterion_6(const ModelContext& ctx, Report& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps = mhz_to_rad(12.0);
    const Index n_full = 40;
    const int trajectories = 100;
    const double t_end = us_to_ns(2.0);
    const auto grid = uniform_grid(t_end, ctx.scn.dt_ns);

    const FullSystem fsys = full_system_from(ctx, eps, n_full);
    const StateVector psi0 = full_initial_state(ctx, n_full);
    const TrajectoryEnsemble ens =
        monte_carlo_evolve(fsys, psi0, grid, trajectories, ctx.scn.seed);

    const ReducedParams p = ctx.params.with_drive(eps, ctx.params.delta_a);
    const Index n_red = std::max<Index>(60, suggested_n_max(p));
    const ReducedSystem rsys = build_reduced_system(p, n_red);
    const DressedToBareMap map = make_dressed_to_bare_map(
        fig_detail::truncate_spectrum(ctx.spectrum, ctx.scn.j_max), ctx.scn.g,
        ctx.scn.omega_r, ctx.scn.omega_d, n_red, 0, ctx.h_level, ctx.params.order_k);

    const std::vector<double> probes{us_to_ns(0.5), us_to_ns(1.0), us_to_ns(2.0)};
    std::vector<double> red_pg(probes.size(), 0.0);
    ReducedEvolveOptions ropt;
    ropt.on_sample = [&](double t, const Matrix& rho) {
        for (std::size_t k = 0; k < probes.size(); ++k)
            if (std::abs(t - probes[k]) < 1e-9)
                red_pg[k] = bare_observables(map.map(rho, t)).populations(0);
    };
    evolve_reduced(rsys, reduced_vacuum_state(rsys, 0), uniform_grid(t_end, 25.0), ropt);

    bool pass = true;
    std::string detail = "full vs reduced (bare Pg):";
    for (std::size_t k = 0; k < probes.size(); ++k) {
        double full_pg = 0.0, se = 0.0;
        for (const auto& row : ens.averages.rows)
            if (std::abs(row[0] - probes[k]) < 1e-9) {
                full_pg = row[1];
                se = row.back();
            }
        const double tol = 0.1 + 3.0 * se;
        const double diff = std::abs(full_pg - red_pg[k]);
        pass = pass && diff <= tol;
        detail += fmt(" t=%.1fus |%.3f-%.3f|=%.3f<=%.3f", probes[k] / 1000.0,
                      full_pg, red_pg[k], diff, tol);
    }
    const double runtime = elapsed_s(t0);
    pass = pass && runtime < 1800.0;
    detail += fmt(" (%.0f s < 1800 s)", runtime);
    rep.line(6, pass, detail);
}

// ---------------------------------------------------------------------------
// 7. population_estimate at t = 1 us within 0.05 of the reduced master equation
//    across eps/2pi in [9, 15] MHz.
void criterion_7(const ModelContext& ctx, Report& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> eps_mhz;
    for (double e = 9.0; e <= 15.0; e += 1.0) eps_mhz.push_back(e);
    std::vector<double> diffs(eps_mhz.size(), 0.0);
    parallel_for(eps_mhz.size(), [&](std::size_t i) {
        const ReducedParams p =
            ctx.params.with_drive(mhz_to_rad(eps_mhz[i]), ctx.params.delta_a);
        const RateResult r = transition_rates(p);
        const auto [pg_est, ph_est] = population_estimate(r, us_to_ns(1.0), DressedInitial::G);
        const Index n_max = std::max<Index>(40, suggested_n_max(p));
        const ReducedSystem sys = build_reduced_system(p, n_max);
        const EvolutionResult res = evolve_reduced(sys, reduced_vacuum_state(sys, 0),
                                                   uniform_grid(us_to_ns(1.0), 2.5), {});
        diffs[i] = std::abs(pg_est - res.series.rows.back()[1]);
    });
    double worst = 0.0, worst_eps = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
        if (diffs[i] > worst) {
            worst = diffs[i];
            worst_eps = eps_mhz[i];
        }
    rep.line(7, worst <= 0.05,
             fmt("finite-time estimate vs master equation at 1 us: worst |dPg| = %.4f "
                 "at %.0f MHz (tolerance 0.05) (%.0f s)", worst, worst_eps, elapsed_s(t0)));
}

// ---------------------------------------------------------------------------
// 8. Always-on property suites.
void criterion_8(const ModelContext& ctx, Report& rep) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> fails;

    // (a) trace / Hermiticity / positivity through a reduced-model run
    {
        const ReducedParams p = ctx.params.with_drive(mhz_to_rad(10.0), ctx.params.delta_a);
        const ReducedSystem sys = build_reduced_system(p, 60);
        ReducedEvolveOptions opt;
        double worst_trace = 0.0, worst_herm = 0.0, min_eig = 0.0;
        opt.on_sample = [&](double, const Matrix& rho) {
            worst_trace = std::max(worst_trace, std::abs(rho.trace().real() - 1.0));
            worst_herm = std::max(worst_herm, hermiticity_defect(rho));
            Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        };
        evolve_reduced(sys, reduced_vacuum_state(sys, 0), uniform_grid(500.0, 50.0), opt);
        if (worst_trace >= 1e-7) fails.push_back(fmt("trace drift %.2e", worst_trace));
        if (worst_herm >= 1e-9) fails.push_back(fmt("hermiticity %.2e", worst_herm));
        if (min_eig <= -1e-7) fails.push_back(fmt("negativity of rho %.2e", min_eig));
    }

    // (b) SW generator residual on the joint space
    {
        const SWExpansion sw = first_order_generator(ctx.spectrum, ctx.scn.g, ctx.scn.omega_r);
        const Index np = 10;
        const Matrix S = assemble_joint_generator(sw, np);
        Matrix Hq = Matrix::Zero(ctx.spectrum.level_count, ctx.spectrum.level_count);
        for (Index j = 0; j < ctx.spectrum.level_count; ++j) Hq(j, j) = ctx.spectrum.omega(j);
        const Matrix H0 = kron(Hq, identity(np)) +
                          ctx.scn.omega_r * kron(identity(ctx.spectrum.level_count),
                                                 number_op(np));
        const Matrix a = destroy(np);
        const Matrix V1 = im_unit * ctx.scn.g *
                          kron(ctx.spectrum.n_matrix, Matrix(a.adjoint() - a));
        const double resid = max_abs(Matrix(S * H0 - H0 * S + V1)) / max_abs(V1);
        if (resid >= 1e-10) fails.push_back(fmt("SW residual %.2e", resid));
    }

    // (c) g^2 / g^3 scaling of the second/third-order outputs
    {
        const double loose = 0.5;  // scaling is algebraic, not a validity claim
        const ReducedParams base = second_order_params(ctx.spectrum, ctx.scn.g,
                                                       ctx.scn.omega_r, ctx.scn.omega_d, 0.0,
                                                       ctx.scn.kappa, 0, ctx.h_level, loose);
        const cd v3 = third_order_element(ctx.spectrum, ctx.scn.g, ctx.scn.omega_r, 0, 3);
        for (double s : {0.5, 2.0}) {
            const ReducedParams sc = second_order_params(ctx.spectrum, s * ctx.scn.g,
                                                         ctx.scn.omega_r, ctx.scn.omega_d,
                                                         0.0, ctx.scn.kappa, 0, ctx.h_level,
                                                         loose);
            if (std::abs(sc.g_eff - s * s * base.g_eff) > 1e-8 * std::abs(base.g_eff))
                fails.push_back("g_eff scaling");
            if (std::abs(sc.chi_g - s * s * base.chi_g) > 1e-8 * std::abs(base.chi_g))
                fails.push_back("chi scaling");
            const cd v3s = third_order_element(ctx.spectrum, s * ctx.scn.g, ctx.scn.omega_r,
                                               0, 3);
            if (std::abs(v3s - s * s * s * v3) > 1e-8 * std::abs(v3))
                fails.push_back("g_eff^(3) scaling");
        }
    }

    // (d) displaced matrix elements vs brute-force operator oracle
    {
        const ReducedParams p = ctx.params.with_drive(mhz_to_rad(9.0), ctx.params.delta_a);
        const ConditionalAmplitudes amp = conditional_amplitudes(p);
        const DisplacedElements el = displaced_matrix_elements(amp, 2, 110);
        const Index D = 170;
        auto disp = [&](cd a) {
            return exp_antihermitian(Matrix(a * create(D) - std::conj(a) * destroy(D)));
        };
        const Matrix Ab = disp(amp.alpha_h).adjoint() * destroy(D) * destroy(D) *
                          disp(amp.alpha_g);
        double worst = 0.0;
        for (Index n = 0; n <= 45; ++n)
            worst = std::max({worst, std::abs(el.A_n0[n] - Ab(n, 0)),
                              std::abs(el.A_0m[n] - Ab(0, n))});
        if (worst >= 1e-8) fails.push_back(fmt("displaced elements %.2e", worst));
    }

    // (e) recurrence solver vs dense linear solve
    {
        RngStream rng(2468, 0);
        const std::size_t n = 40;
        std::vector<cd> y(n), b(n), d(n - 1);
        for (auto& v : y) v = cd(rng.next_double() - 0.5, rng.next_double() - 0.5);
        for (auto& v : b) v = cd(1.0 + rng.next_double(), rng.next_double());
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = 0.4 * b[i] * rng.next_double();
        const auto x = solve_recurrence(y, b, d);
        Matrix A = Matrix::Zero(n, n);
        Vector rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            A(i, i) = b[i];
            if (i + 1 < n) A(i, i + 1) = d[i];
            rhs(i) = y[i];
        }
        const Vector dense = A.fullPivLu().solve(rhs);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(x[i] - dense(i)));
        if (worst >= 1e-10) fails.push_back(fmt("recurrence solver %.2e", worst));
    }

    // (f) negativity textbook value
    {
        Vector bell = Vector::Zero(4);
        bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
        const NegativityResult n = negativity(Matrix(bell * bell.adjoint()), {2, 2});
        if (std::abs(n.negativity - 0.5) > 1e-12) fails.push_back("Bell negativity");
    }

    // (g) Monte Carlo vs direct master equation on a 3 x 15 system at 3 sigma.
    // The master equation is propagated in the same rotating frame (populations
    // are frame invariants), with the nonlinear-trajectory machinery unused.
    {
        const QubitSpectrum sub = fig_detail::truncate_spectrum(ctx.spectrum, 3);
        const FullSystem sys = make_full_system(sub, ctx.scn.omega_r, ctx.scn.omega_d,
                                                ctx.scn.g, ctx.scn.kappa, mhz_to_rad(12.0),
                                                14, 3);
        const auto grid = uniform_grid(250.0, 12.5);
        Vector v = Vector::Zero(sys.dim());
        v(0) = 1.0;
        const StateVector psi0(v, {3, 15}, Basis::BareLab);
        const TrajectoryEnsemble ens = monte_carlo_evolve(sys, psi0, grid, 100, ctx.scn.seed);

        const auto rf = full_detail::build_rotating_terms(sys);
        const double h = auto_mc_substep(rf, sys.omega_d);
        const SparseMatrix a = to_sparse(kron(identity(3), destroy(15)));
        Matrix rho = psi0.amplitudes * psi0.amplitudes.adjoint();
        const Index d = sys.dim();
        Matrix hnh(d, d), k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d);
        auto rhs = [&](double t, const Matrix& r, Matrix& out) {
            hnh.setZero();
            for (std::size_t i = 0; i < rf.harmonics.size(); ++i)
                hnh += std::exp(im_unit * (rf.harmonics[i] * sys.omega_d * t)) *
                       Matrix(rf.terms[i]);
            out.noalias() = -im_unit * (hnh * r);
            out.noalias() += im_unit * (r * hnh.adjoint());
            out.noalias() += sys.kappa * Matrix(a * r * a.adjoint());
        };
        std::vector<double> me_pg{1.0};
        double t = 0.0;
        for (std::size_t gi = 1; gi < grid.size(); ++gi) {
            const int nsub = static_cast<int>(std::ceil((grid[gi] - grid[gi - 1]) / h));
            const double hh = (grid[gi] - grid[gi - 1]) / nsub;
            for (int s = 0; s < nsub; ++s) {
                rhs(t, rho, k1);
                stage = rho + 0.5 * hh * k1; rhs(t + 0.5 * hh, stage, k2);
                stage = rho + 0.5 * hh * k2; rhs(t + 0.5 * hh, stage, k3);
                stage = rho + hh * k3;       rhs(t + hh, stage, k4);
                rho += (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                stage.noalias() = rho.adjoint();
                rho = 0.5 * (rho + stage);
                t += hh;
            }
            t = grid[gi];
            double pg = 0.0;
            for (Index n = 0; n < 15; ++n) pg += rho(n, n).real();
            me_pg.push_back(pg);
        }
        double worst_sigma = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double se = std::max(ens.averages.rows[i].back(), 1e-4);
            worst_sigma = std::max(worst_sigma,
                                   std::abs(ens.averages.rows[i][1] - me_pg[i]) / se);
        }
        if (worst_sigma >= 3.0) fails.push_back(fmt("MC vs ME %.1f sigma", worst_sigma));
    }

    // (h) seed determinism: byte-identical CSVs
    {
        ModelContext cx = ctx;
        cx.scn.out_dir = "/tmp/mist_accept_det_a";
        cx.scn.t_end_ns = 50.0;
        cx.scn.n_max = 40;
        cx.scn.epsilon_d = mhz_to_rad(5.0);
        run_evolve_reduced(cx, {});
        ModelContext cy = cx;
        cy.scn.out_dir = "/tmp/mist_accept_det_b";
        run_evolve_reduced(cy, {});
        std::ifstream fa("/tmp/mist_accept_det_a/reduced_timeseries.csv", std::ios::binary);
        std::ifstream fb("/tmp/mist_accept_det_b/reduced_timeseries.csv", std::ios::binary);
        std::ostringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str().empty() || sa.str() != sb.str()) fails.push_back("CSV determinism");
    }

    // truncation robustness spot check: n_max 100 -> 120 moves one scan point < 0.5%
    {
        const ReducedParams p = ctx.params.with_drive(mhz_to_rad(10.0), ctx.params.delta_a);
        const auto a = steady_scan_point(p, p.epsilon_d, p.delta_a,
                                         ScanOptions{.n_max = 100, .auto_escalate = false});
        const auto b = steady_scan_point(p, p.epsilon_d, p.delta_a,
                                         ScanOptions{.n_max = 120, .auto_escalate = false});
        if (!a.ok || !b.ok ||
            std::abs(a.n_avg_ss - b.n_avg_ss) > 0.005 * std::abs(b.n_avg_ss) ||
            std::abs(a.Pg_ss - b.Pg_ss) > 0.005)
            fails.push_back("truncation robustness");
    }

    std::string detail = "property suites: ";
    if (fails.empty()) detail += "trace/hermiticity/positivity, SW residual, g^2/g^3 "
                                 "scaling, displaced-element oracle, recurrence oracle, "
                                 "Bell negativity, MC-vs-ME 3 sigma, CSV determinism, "
                                 "truncation robustness all green";
    else {
        detail += "failed: ";
        for (const auto& f : fails) detail += f + "; ";
    }
    detail += fmt(" (%.0f s)", elapsed_s(t0));
    rep.line(8, fails.empty(), detail);
}

} // namespace

int main(int argc, char** argv) {
    std::string scenario_path = std::string(MIST_SCENARIO_DIR) + "/table1.json";
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--scenario") && i + 1 < argc) scenario_path = argv[++i];
        else if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc)
            selected.insert(std::atoi(argv[++i]));
    }
    auto want = [&](int id) { return selected.empty() || selected.count(id); };

    try {
        Scenario scn = parse_scenario(scenario_path);
        scn.out_dir = "/tmp/mist_acceptance_out";
        const ModelContext ctx = build_context(scn);
        Report rep;
        if (want(1)) criterion_1(ctx, rep);
        if (want(2) || want(3)) criteria_2_3(ctx, rep, want(2), want(3));
        if (want(4)) criterion_4(ctx, rep);
        if (want(5)) criterion_5(ctx, rep);
        if (want(6)) criterion_6(ctx, rep);
        if (want(7)) criterion_7(ctx, rep);
        if (want(8)) criterion_8(ctx, rep);
        std::printf("%s: %d criterion(s) failed\n", rep.failures ? "RESULT FAIL" : "RESULT PASS",
                    rep.failures);
        return rep.failures ? 1 : 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 2;
    }
}
