// figures.hpp — scenario-driven pipelines behind the CLI subcommands: spectrum
// and reduction exports, rate and steady-state scans, time evolutions for each
// model, and the per-figure data products.  All outputs are deterministic CSV
// (plus optional SVG renderings).

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mist/csv.hpp"
#include "mist/full_model.hpp"
#include "mist/negativity.hpp"
#include "mist/rate_theory.hpp"
#include "mist/reduced_model.hpp"
#include "mist/scenario.hpp"
#include "mist/semiclassical.hpp"
#include "mist/svg.hpp"
#include "mist/sweep.hpp"

namespace mist {

inline constexpr const char* tool_version = "mist-sim 0.1.0";

struct RunFlags {
    bool paper_scale = false;
    bool entanglement = false;
    bool plots = false;
};

// Scenario + derived quantities shared by every pipeline.
struct ModelContext {
    Scenario scn;
    QubitSpectrum spectrum;   // sw_levels levels
    ReducedParams params;     // converged intermediate-state sums
    RwaReport rwa;
    Index h_level = 0;
    Index sum_levels_used = 0;
};

namespace fig_detail {

inline QubitSpectrum truncate_spectrum(const QubitSpectrum& s, Index levels) {
    QubitSpectrum out;
    out.level_count = levels;
    out.omega = s.omega.head(levels);
    out.n_matrix = s.n_matrix.topLeftCorner(levels, levels);
    return out;
}

} // namespace fig_detail

inline ModelContext build_context(const Scenario& scn) {
    ModelContext ctx;
    ctx.scn = scn;
    ctx.spectrum = diagonalize(scn.qubit, scn.sw_levels);
    ctx.h_level = scn.h_level
        ? *scn.h_level
        : find_multiphoton_resonance(ctx.spectrum, scn.omega_r, scn.resonance_k).level;
    if (ctx.h_level >= scn.sw_levels)
        throw ScenarioError("h_level exceeds the diagonalized level count");

    // add intermediate levels until g_eff moves by < 0.1%
    const double eps0 = scn.epsilon_d ? *scn.epsilon_d : 0.0;
    cd prev_geff{0.0, 0.0};
    for (Index L = std::min<Index>(8, scn.sw_levels); L <= scn.sw_levels; ++L) {
        const QubitSpectrum sub = fig_detail::truncate_spectrum(ctx.spectrum, L);
        ctx.params = (scn.resonance_k == 2)
            ? second_order_params(sub, scn.g, scn.omega_r, scn.omega_d, eps0, scn.kappa,
                                  0, ctx.h_level)
            : third_order_params(sub, scn.g, scn.omega_r, scn.omega_d, eps0, scn.kappa,
                                 0, ctx.h_level);
        ctx.sum_levels_used = L;
        if (L > 8 && std::abs(ctx.params.g_eff - prev_geff) <
                         1e-3 * std::max(1e-300, std::abs(ctx.params.g_eff)))
            break;
        prev_geff = ctx.params.g_eff;
    }
    ctx.rwa = rwa_validity_report(ctx.spectrum, scn.g, scn.omega_r, scn.omega_d, eps0,
                                  scn.kappa);
    return ctx;
}

inline std::vector<std::string> csv_header(const ModelContext& ctx) {
    return {tool_version, "scenario_hash=" + ctx.scn.hash};
}

inline std::string out_path(const ModelContext& ctx, const std::string& name) {
    std::filesystem::create_directories(ctx.scn.out_dir);
    return (std::filesystem::path(ctx.scn.out_dir) / name).string();
}

inline void maybe_plot(const ModelContext& ctx, const RunFlags& flags, const std::string& csv_name,
                       const std::string& title, const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows) {
    if (!flags.plots || rows.empty()) return;
    const std::string svg = csv_name.substr(0, csv_name.rfind('.')) + ".svg";
    write_svg_plot(out_path(ctx, svg), title, columns, rows);
}

// ------------------------------ spectrum / reduce -----------------------------

inline void run_spectrum(const ModelContext& ctx, const RunFlags& flags) {
    std::vector<std::vector<double>> rows;
    for (Index j = 0; j < ctx.spectrum.level_count; ++j)
        rows.push_back({static_cast<double>(j), rad_to_ghz(ctx.spectrum.omega(j))});
    write_csv(out_path(ctx, "spectrum.csv"), csv_header(ctx),
              {"level", "omega_over_2pi_GHz"}, rows);

    std::vector<std::vector<double>> nm;
    for (Index i = 0; i < ctx.spectrum.level_count; ++i)
        for (Index j = 0; j < ctx.spectrum.level_count; ++j)
            nm.push_back({static_cast<double>(i), static_cast<double>(j),
                          ctx.spectrum.n_matrix(i, j).real(),
                          ctx.spectrum.n_matrix(i, j).imag()});
    write_csv(out_path(ctx, "charge_matrix.csv"), csv_header(ctx), {"i", "j", "re", "im"}, nm);
    maybe_plot(ctx, flags, "spectrum.csv", "qubit spectrum",
               {"level", "omega_over_2pi_GHz"}, rows);
}

inline void run_reduce(const ModelContext& ctx, const RunFlags&) {
    json j;
    j["tool"] = tool_version;
    j["scenario_hash"] = ctx.scn.hash;
    j["g_level"] = 0;
    j["h_level"] = ctx.h_level;
    j["order_k"] = ctx.params.order_k;
    j["sum_levels_used"] = ctx.sum_levels_used;
    j["delta_a_MHz"] = rad_to_mhz(ctx.params.delta_a);
    j["delta_g_MHz"] = rad_to_mhz(ctx.params.delta_g);
    j["delta_h_MHz"] = rad_to_mhz(ctx.params.delta_h);
    j["delta_q_MHz"] = rad_to_mhz(ctx.params.delta_q);
    j["chi_g_MHz"] = rad_to_mhz(ctx.params.chi_g);
    j["chi_h_MHz"] = rad_to_mhz(ctx.params.chi_h);
    j["lambda_g_MHz"] = rad_to_mhz(ctx.params.lambda_g);
    j["lambda_h_MHz"] = rad_to_mhz(ctx.params.lambda_h);
    j["g_eff_re_MHz"] = rad_to_mhz(ctx.params.g_eff.real());
    j["g_eff_im_MHz"] = rad_to_mhz(ctx.params.g_eff.imag());
    j["g_eff_abs_MHz"] = rad_to_mhz(std::abs(ctx.params.g_eff));
    j["kappa_MHz"] = rad_to_mhz(ctx.params.kappa);
    j["epsilon_d_MHz"] = rad_to_mhz(ctx.params.epsilon_d);
    j["omega_g_over_2pi_GHz"] = rad_to_ghz(ctx.params.omega_g);
    j["omega_h_over_2pi_GHz"] = rad_to_ghz(ctx.params.omega_h);

    json validity;
    validity["threshold"] = ctx.rwa.threshold;
    validity["max_r1"] = ctx.rwa.max_r1;
    validity["max_r2"] = ctx.rwa.max_r2;
    validity["max_r3"] = ctx.rwa.max_r3;
    validity["any_flagged"] = ctx.rwa.any_flagged;
    json flagged = json::array();
    for (const auto& e : ctx.rwa.entries)
        if (e.flagged)
            flagged.push_back({{"i", e.i}, {"j", e.j}, {"r1", e.r1}, {"r2", e.r2}, {"r3", e.r3}});
    validity["flagged_pairs"] = flagged;
    j["validity"] = validity;

    std::ofstream out(out_path(ctx, "reduced_params.json"), std::ios::binary);
    out << j.dump(2) << "\n";
}

// ----------------------------------- rates ------------------------------------

inline void run_rates(const ModelContext& ctx, const RunFlags& flags) {
    const std::vector<double> grid = ctx.scn.epsilon_grid_required("rates");
    std::vector<std::vector<double>> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        std::vector<double> row{rad_to_mhz(grid[i])};
        try {
            const RateResult r = transition_rates(ctx.params.with_drive(grid[i],
                                                                        ctx.params.delta_a));
            row.insert(row.end(), {per_ns_to_per_us(r.gamma_g), per_ns_to_per_us(r.gamma_h),
                                   per_ns_to_per_us(r.gamma), r.Pg_ss, r.Ph_ss});
        } catch (const std::exception&) {
            row.insert(row.end(), {std::nan(""), std::nan(""), std::nan(""), std::nan(""),
                                   std::nan("")});
        }
        rows[i] = std::move(row);
    });
    const std::vector<std::string> cols{"epsilon_d_MHz", "gamma_g", "gamma_h", "gamma",
                                        "Pg_ss", "Ph_ss"};
    write_csv(out_path(ctx, "rates.csv"), csv_header(ctx), cols, rows);
    maybe_plot(ctx, flags, "rates.csv", "analytic transition rates (1/us)", cols, rows);
}

// -------------------------------- steady scans --------------------------------

inline ScanResult run_steady_scan(const ModelContext& ctx, const RunFlags& flags,
                                  const std::string& csv_name = "scan.csv") {
    const std::vector<double> eps_grid = ctx.scn.epsilon_grid_required("steady-scan");
    std::vector<double> da_grid;
    if (ctx.scn.delta_a_sweep) da_grid = ctx.scn.delta_a_sweep->grid_rad();
    ScanOptions opt;
    opt.n_max = ctx.scn.n_max;
    const ScanResult scan = steady_scan(ctx.params, eps_grid, da_grid, opt);

    std::vector<std::string> cols{"epsilon_d_MHz", "delta_a_MHz", "Pg_ss", "Ph_ss",
                                  "navg_ss", "W_ss", "regime"};
    // regime is a string column; write by hand to keep the CSV writer numeric-only
    std::ofstream out(out_path(ctx, csv_name), std::ios::binary);
    for (const auto& line : csv_header(ctx)) out << "# " << line << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << cols[i] << (i + 1 < cols.size() ? "," : "");
    out << "\n";
    for (const auto& pt : scan.points) {
        out << format_double(rad_to_mhz(pt.epsilon_d)) << ","
            << format_double(rad_to_mhz(pt.delta_a)) << "," << format_double(pt.Pg_ss) << ","
            << format_double(pt.Ph_ss) << "," << format_double(pt.n_avg_ss) << ","
            << format_double(pt.W_ss) << "," << pt.regime << "\n";
    }
    out.close();

    if (flags.plots) {
        std::vector<std::vector<double>> rows;
        for (const auto& pt : scan.points)
            if (pt.ok)
                rows.push_back({rad_to_mhz(pt.epsilon_d), pt.Pg_ss, pt.Ph_ss,
                                pt.n_avg_ss / std::max(1.0, pt.n_avg_ss)});
        maybe_plot(ctx, flags, csv_name, "steady-state populations",
                   {"epsilon_d_MHz", "Pg_ss", "Ph_ss", "navg_norm"}, rows);
    }
    return scan;
}

// ------------------------------ time evolutions -------------------------------

struct FullScaleSettings {
    Index n_max = 40;
    int trajectories = 100;
};

inline FullScaleSettings resolve_full_scale(const Scenario& scn, const RunFlags& flags,
                                            double epsilon_rad) {
    FullScaleSettings st;
    if (flags.paper_scale) {
        st.n_max = scn.n_max;
        st.trajectories = scn.trajectories > 0
            ? scn.trajectories
            : (rad_to_mhz(epsilon_rad) <= 12.0 ? 200 : 400);
    } else {
        st.n_max = std::min<Index>(scn.n_max, 40);
        st.trajectories = scn.trajectories > 0 ? scn.trajectories : 100;
    }
    return st;
}

inline FullSystem full_system_from(const ModelContext& ctx, double epsilon_rad, Index n_max) {
    return make_full_system(ctx.spectrum, ctx.scn.omega_r, ctx.scn.omega_d, ctx.scn.g,
                            ctx.scn.kappa, epsilon_rad, n_max, ctx.scn.j_max);
}

// dressed |g,0> expressed in the lab frame, the full model's initial state
inline StateVector full_initial_state(const ModelContext& ctx, Index n_max) {
    const QubitSpectrum sub = fig_detail::truncate_spectrum(ctx.spectrum, ctx.scn.j_max);
    const SWExpansion sw = first_order_generator(sub, ctx.scn.g, ctx.scn.omega_r);
    Vector v = Vector::Zero(ctx.scn.j_max * (n_max + 1));
    v(0) = 1.0;  // |g, 0> in the dressed product basis
    return lab_frame_state(sw, StateVector(std::move(v), {ctx.scn.j_max, n_max + 1},
                                           Basis::DressedRotating));
}

inline TimeSeries run_evolve_full(const ModelContext& ctx, const RunFlags& flags) {
    const double eps = ctx.scn.epsilon_d_required("evolve --model full");
    const FullScaleSettings st = resolve_full_scale(ctx.scn, flags, eps);
    const FullSystem sys = full_system_from(ctx, eps, st.n_max);
    const StateVector psi0 = full_initial_state(ctx, st.n_max);
    const auto grid = uniform_grid(ctx.scn.t_end_ns, ctx.scn.dt_ns);
    const TrajectoryEnsemble ens =
        monte_carlo_evolve(sys, psi0, grid, st.trajectories, ctx.scn.seed);
    write_csv(out_path(ctx, "full_timeseries.csv"), csv_header(ctx), ens.averages.columns,
              ens.averages.rows);
    maybe_plot(ctx, flags, "full_timeseries.csv", "full model (trajectory average)",
               ens.averages.columns, ens.averages.rows);
    return ens.averages;
}

struct ReducedEvolveOutput {
    TimeSeries dressed;   // t_ns, Pg, Ph, navg [, negativity, log_negativity]
    TimeSeries bare;      // t_ns, P0..P{j_max-1}, n_avg (only when map_to_bare)
};

inline ReducedEvolveOutput run_evolve_reduced(const ModelContext& ctx, const RunFlags& flags,
                                              bool map_to_bare = false) {
    const double eps = ctx.scn.epsilon_d_required("evolve --model reduced");
    const ReducedParams p = ctx.params.with_drive(eps, ctx.params.delta_a);
    Index n_max = ctx.scn.n_max;
    const Index need = suggested_n_max(p);
    while (n_max < need) n_max += 20;
    const ReducedSystem sys = build_reduced_system(p, n_max);
    const auto grid = uniform_grid(ctx.scn.t_end_ns, ctx.scn.dt_ns);

    ReducedEvolveOutput out;
    DressedToBareMap map;
    if (map_to_bare) {
        map = make_dressed_to_bare_map(
            fig_detail::truncate_spectrum(ctx.spectrum, ctx.scn.j_max), ctx.scn.g,
            ctx.scn.omega_r, ctx.scn.omega_d, n_max, 0, ctx.h_level, ctx.params.order_k);
        out.bare.columns.push_back("t_ns");
        for (Index j = 0; j < ctx.scn.j_max; ++j)
            out.bare.columns.push_back("P" + std::to_string(j));
        out.bare.columns.push_back("n_avg");
    }

    ReducedEvolveOptions opt;
    opt.entanglement = flags.entanglement || ctx.scn.entanglement;
    if (map_to_bare)
        opt.on_sample = [&](double t, const Matrix& rho) {
            const DensityMatrix bare = map.map(rho, t);
            const BareObservables obs = bare_observables(bare);
            std::vector<double> row{t};
            for (Index j = 0; j < ctx.scn.j_max; ++j) row.push_back(obs.populations(j));
            row.push_back(obs.n_avg);
            out.bare.add_row(row);
        };

    const EvolutionResult res = evolve_reduced(sys, reduced_vacuum_state(sys, 0), grid, opt);
    out.dressed = res.series;
    write_csv(out_path(ctx, "reduced_timeseries.csv"), csv_header(ctx), out.dressed.columns,
              out.dressed.rows);
    if (map_to_bare)
        write_csv(out_path(ctx, "reduced_bare_timeseries.csv"), csv_header(ctx),
                  out.bare.columns, out.bare.rows);
    maybe_plot(ctx, flags, "reduced_timeseries.csv", "reduced model (dressed basis)",
               out.dressed.columns, out.dressed.rows);
    return out;
}

inline TimeSeries run_evolve_semiclassical(const ModelContext& ctx, const RunFlags& flags) {
    const double eps = ctx.scn.epsilon_d_required("evolve --model semiclassical");
    const FullSystem sys = full_system_from(ctx, eps, 1);  // resonator is a c-number here
    Vector psi0 = Vector::Zero(ctx.scn.j_max);
    psi0(0) = 1.0;
    const auto grid = uniform_grid(ctx.scn.t_end_ns, ctx.scn.dt_ns);
    SemiclassicalResult res = evolve_semiclassical(sys, psi0, cd(0.0, 0.0), grid);
    if (flags.entanglement || ctx.scn.entanglement) {
        // product state by construction: negativity identically zero
        res.series.columns.push_back("negativity");
        res.series.columns.push_back("log_negativity");
        for (auto& row : res.series.rows) {
            row.push_back(0.0);
            row.push_back(0.0);
        }
    }
    write_csv(out_path(ctx, "sc_timeseries.csv"), csv_header(ctx), res.series.columns,
              res.series.rows);
    maybe_plot(ctx, flags, "sc_timeseries.csv", "semiclassical model", res.series.columns,
               res.series.rows);
    return res.series;
}

// ------------------------------- fitted rates ---------------------------------

struct FittedRatePoint {
    double epsilon_rad = 0.0;
    RelaxationFit fit;
    RateResult analytic;
    Index n_max_used = 0;
};

// Reduced-model evolution + exponential fit at one drive point, following the
// initial-state policy: start |h,0> at eps/2pi <= 7 MHz, |g,0> above.
inline FittedRatePoint fit_rate_at(const ModelContext& ctx, double epsilon_rad,
                                   double t_cap_ns = 12000.0) {
    FittedRatePoint out;
    out.epsilon_rad = epsilon_rad;
    const ReducedParams p = ctx.params.with_drive(epsilon_rad, ctx.params.delta_a);
    out.analytic = transition_rates(p);
    const double t_min = 10.0 / p.kappa;
    const double t_end = std::min(t_cap_ns, t_min + 5.0 / out.analytic.gamma);
    Index n_max = std::max<Index>(40, suggested_n_max(p));
    out.n_max_used = n_max;
    const ReducedSystem sys = build_reduced_system(p, n_max);
    const bool start_h = rad_to_mhz(epsilon_rad) <= 7.0;
    const auto grid = uniform_grid(t_end, ctx.scn.dt_ns);
    const EvolutionResult res =
        evolve_reduced(sys, reduced_vacuum_state(sys, start_h ? 1 : 0), grid, {});
    std::vector<double> ts, pg;
    for (const auto& row : res.series.rows) {
        ts.push_back(row[0]);
        pg.push_back(row[1]);
    }
    out.fit = fit_relaxation(ts, pg, t_min);
    return out;
}

inline std::vector<double> subsample(const std::vector<double>& grid, std::size_t max_points) {
    if (grid.size() <= max_points) return grid;
    std::vector<double> out;
    for (std::size_t i = 0; i < max_points; ++i)
        out.push_back(grid[(i * (grid.size() - 1)) / (max_points - 1)]);
    return out;
}

inline void run_fitted_rates(const ModelContext& ctx, const RunFlags& flags,
                             std::size_t max_points = 7) {
    const std::vector<double> grid =
        subsample(ctx.scn.epsilon_grid_required("fitted rates"), max_points);
    std::vector<std::vector<double>> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        std::vector<double> row{rad_to_mhz(grid[i])};
        try {
            const FittedRatePoint fp = fit_rate_at(ctx, grid[i]);
            row.insert(row.end(),
                       {per_ns_to_per_us(fp.fit.gamma), fp.fit.P_ss, fp.fit.C,
                        fp.fit.rms_residual, per_ns_to_per_us(fp.analytic.gamma)});
        } catch (const std::exception&) {
            row.insert(row.end(), {std::nan(""), std::nan(""), std::nan(""), std::nan(""),
                                   std::nan("")});
        }
        rows[i] = std::move(row);
    });
    write_csv(out_path(ctx, "rates_fitted.csv"), csv_header(ctx),
              {"epsilon_d_MHz", "gamma_fit", "Pss_fit", "C_fit", "rms_residual",
               "gamma_analytic"},
              rows);
}

// --------------------------------- figures ------------------------------------

inline void run_figure(const ModelContext& ctx, const std::string& figure,
                       const RunFlags& flags) {
    if (figure == "fig1b") {
        run_spectrum(ctx, flags);
        return;
    }
    if (figure == "fig2a" || figure == "fig2b") {
        run_steady_scan(ctx, flags);
        run_rates(ctx, flags);
        run_fitted_rates(ctx, flags);
        return;
    }
    if (figure == "fig2c") {
        ModelContext c2 = ctx;
        if (!c2.scn.delta_a_sweep) c2.scn.delta_a_sweep = SweepSpec{-10.0, 10.0, 5};
        run_steady_scan(c2, flags, "scan2d.csv");
        return;
    }
    if (figure == "fig3") {
        RunFlags f3 = flags;
        f3.entanglement = true;
        run_evolve_reduced(ctx, f3, /*map_to_bare=*/true);
        run_evolve_semiclassical(ctx, f3);
        run_evolve_full(ctx, flags);
        return;
    }
    if (figure == "fig4") {
        const std::vector<double> grid =
            subsample(ctx.scn.epsilon_grid_required("fig4"), 7);
        const std::vector<double> snap_us{0.25, 1.0, 5.0};
        std::ofstream out(out_path(ctx, "fig4_snapshots.csv"), std::ios::binary);
        for (const auto& line : csv_header(ctx)) out << "# " << line << "\n";
        out << "epsilon_d_MHz,t_us,model,P_g,n_avg\n";
        for (double eps : grid) {
            ModelContext cx = ctx;
            cx.scn.epsilon_d = eps;
            cx.scn.t_end_ns = us_to_ns(snap_us.back());
            const auto reduced = run_evolve_reduced(cx, flags, /*map_to_bare=*/true);
            const auto sc = run_evolve_semiclassical(cx, flags);
            const auto full = run_evolve_full(cx, flags);
            auto emit = [&](const char* model, const TimeSeries& ts, std::size_t pg_col,
                            std::size_t n_col) {
                for (double tu : snap_us)
                    for (const auto& row : ts.rows)
                        if (std::abs(row[0] - us_to_ns(tu)) < 0.5 * cx.scn.dt_ns) {
                            out << format_double(rad_to_mhz(eps)) << "," << format_double(tu)
                                << "," << model << "," << format_double(row[pg_col]) << ","
                                << format_double(row[n_col]) << "\n";
                            break;
                        }
            };
            emit("reduced", reduced.bare, 1, 1 + ctx.scn.j_max);
            emit("semiclassical", sc, 1, 1 + ctx.scn.j_max);
            emit("full", full, 1, 1 + ctx.scn.j_max);
        }
        out.close();

        // analytic finite-time estimate across the full sweep grid
        const std::vector<double> fine = ctx.scn.epsilon_grid_required("fig4");
        std::vector<std::vector<double>> rows;
        for (double eps : fine) {
            std::vector<double> row{rad_to_mhz(eps)};
            try {
                const RateResult r =
                    transition_rates(ctx.params.with_drive(eps, ctx.params.delta_a));
                const auto [pg, ph] = population_estimate(r, us_to_ns(1.0), DressedInitial::G);
                const ConditionalAmplitudes amp =
                    conditional_amplitudes(ctx.params.with_drive(eps, ctx.params.delta_a));
                row.insert(row.end(),
                           {pg, ph, pg * std::norm(amp.alpha_g) + ph * std::norm(amp.alpha_h)});
            } catch (const std::exception&) {
                row.insert(row.end(), {std::nan(""), std::nan(""), std::nan("")});
            }
            rows.push_back(std::move(row));
        }
        write_csv(out_path(ctx, "fig4_analytic.csv"), csv_header(ctx),
                  {"epsilon_d_MHz", "Pg_estimate_1us", "Ph_estimate_1us", "navg_estimate_1us"},
                  rows);
        return;
    }
    throw ScenarioError("unknown figure '" + figure +
                        "' (expected fig1b, fig2a, fig2b, fig2c, fig3, fig4)");
}

} // namespace mist
