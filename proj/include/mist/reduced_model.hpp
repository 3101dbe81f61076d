// reduced_model.hpp — the effective k-photon qubit–resonator model in the
// dressed rotating frame: Hamiltonian assembly, Lindblad time evolution with
// dressed observables, steady-state scans over drive parameters, and regime
// classification (sub-MIST / MIST / super-MIST).

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mist/errors.hpp"
#include "mist/lindblad.hpp"
#include "mist/negativity.hpp"
#include "mist/operators.hpp"
#include "mist/rate_theory.hpp"
#include "mist/schrieffer_wolff.hpp"
#include "mist/steady_state.hpp"
#include "mist/sweep.hpp"

namespace mist {

// dressed-qubit basis order within the reduced space: 0 = g, 1 = h
struct ReducedSystem {
    ReducedParams params;
    Index n_max = 100;
    LabeledOperator h_eff;                                   // reduced_rotating
    std::vector<std::pair<double, LabeledOperator>> collapse; // [(kappa, a)]

    Index dim() const { return 2 * (n_max + 1); }

    Matrix qubit_projector(int level) const {  // 0 = g, 1 = h
        Matrix pq = Matrix::Zero(2, 2);
        pq(level, level) = 1.0;
        return kron(pq, identity(n_max + 1));
    }

    Matrix photon_number() const { return kron(identity(2), number_op(n_max + 1)); }
};

// Photon truncation needed at a drive point: both conditional coherent
// amplitudes plus a 6*sqrt(n) Poisson tail guard.
inline Index suggested_n_max(const ReducedParams& p) {
    const ConditionalAmplitudes a = conditional_amplitudes(p);
    const double am = std::sqrt(std::max(std::norm(a.alpha_g), std::norm(a.alpha_h)));
    return static_cast<Index>(std::ceil(am * am + 6.0 * am + 10.0));
}

inline ReducedSystem build_reduced_system(const ReducedParams& params, Index n_max = 100) {
    params.validate();
    if (n_max < 20)
        throw std::invalid_argument("build_reduced_system: n_max must be >= 20");
    const ConditionalAmplitudes amps = conditional_amplitudes(params);
    const double ag = std::abs(amps.alpha_g);
    const Index need = static_cast<Index>(std::ceil(ag * ag + 10.0 * ag));
    if (need > n_max)
        throw NumericalError("build_reduced_system: photon truncation too small "
                             "(|alpha_g|^2 + 10|alpha_g| = " + std::to_string(need) +
                             " > n_max = " + std::to_string(n_max) +
                             "); increase n_max to at least " + std::to_string(need));

    const Index np = n_max + 1;
    const Matrix a = destroy(np);
    const Matrix nph = number_op(np);
    const Matrix iq = identity(2);
    Matrix proj_g = Matrix::Zero(2, 2), proj_h = Matrix::Zero(2, 2), gh = Matrix::Zero(2, 2);
    proj_g(0, 0) = 1.0;
    proj_h(1, 1) = 1.0;
    gh(0, 1) = 1.0;  // |g><h|

    Matrix adag_k = identity(np);
    for (int i = 0; i < params.order_k; ++i) adag_k = Matrix(create(np) * adag_k);

    Matrix H = params.delta_a * kron(iq, nph)
             + params.delta_g * kron(proj_g, identity(np))
             + params.delta_h * kron(proj_h, identity(np))
             + params.chi_g * kron(proj_g, nph)
             + params.chi_h * kron(proj_h, nph)
             + params.epsilon_d * kron(iq, Matrix(a + a.adjoint()));
    const Matrix coupling = params.g_eff * kron(gh, adag_k);
    H += coupling + coupling.adjoint();

    ReducedSystem sys;
    sys.params = params;
    sys.n_max = n_max;
    sys.h_eff = LabeledOperator(std::move(H), {2, np}, Basis::ReducedRotating);
    sys.collapse.push_back({params.kappa,
                            LabeledOperator(kron(iq, a), {2, np}, Basis::ReducedRotating)});
    return sys;
}

struct ReducedObservables {
    double P_g_dressed = 0.0;
    double P_h_dressed = 0.0;
    double n_avg_dressed = 0.0;
};

inline ReducedObservables reduced_observables(const ReducedSystem& sys, const Matrix& rho) {
    ReducedObservables o;
    o.P_g_dressed = expectation(rho, sys.qubit_projector(0)).real();
    o.P_h_dressed = expectation(rho, sys.qubit_projector(1)).real();
    o.n_avg_dressed = expectation(rho, sys.photon_number()).real();
    return o;
}

inline DensityMatrix reduced_vacuum_state(const ReducedSystem& sys, int dressed_level) {
    Vector v = Vector::Zero(sys.dim());
    v(dressed_level * (sys.n_max + 1)) = 1.0;
    return pure_state_density(StateVector(std::move(v), {2, sys.n_max + 1},
                                          Basis::ReducedRotating));
}

struct ReducedEvolveOptions {
    StepperConfig stepper;
    bool entanglement = false;         // append negativity / log-negativity columns
    std::vector<double> snapshot_times;
    SampleCallback on_sample;          // extra per-sample hook (frame maps etc.)
};

inline EvolutionResult evolve_reduced(const ReducedSystem& sys, const DensityMatrix& rho0,
                                      const std::vector<double>& t_grid,
                                      const ReducedEvolveOptions& opt = {}) {
    if (rho0.basis != Basis::ReducedRotating)
        throw std::invalid_argument("evolve_reduced: initial state must be reduced_rotating");
    LindbladSystem ls;
    ls.H = to_sparse(sys.h_eff.matrix, 1e-300);
    for (const auto& [rate, L] : sys.collapse) ls.collapse.push_back({rate, L.matrix});

    std::vector<std::pair<std::string, Matrix>> obs = {
        {"Pg", sys.qubit_projector(0)},
        {"Ph", sys.qubit_projector(1)},
        {"navg", sys.photon_number()},
    };

    std::vector<std::vector<double>> ent_rows;
    SampleCallback hook = opt.on_sample;
    if (opt.entanglement) {
        hook = [&, user = opt.on_sample](double t, const Matrix& rho) {
            const NegativityResult nr = negativity(rho, {2, sys.n_max + 1});
            ent_rows.push_back({nr.negativity, nr.log_negativity});
            if (user) user(t, rho);
        };
    }

    EvolutionResult res = evolve_density_matrix(rho0, ls, t_grid, opt.stepper, obs,
                                                opt.snapshot_times, hook);
    if (opt.entanglement) {
        res.series.columns.push_back("negativity");
        res.series.columns.push_back("log_negativity");
        for (std::size_t i = 0; i < res.series.rows.size(); ++i) {
            res.series.rows[i].push_back(ent_rows[i][0]);
            res.series.rows[i].push_back(ent_rows[i][1]);
        }
    }
    return res;
}

// ------------------------------- steady scans --------------------------------

inline const char* regime_label(double pg_ss, double ph_ss) {
    if (pg_ss > 0.95) return "sub-MIST";
    if (ph_ss > 0.95) return "super-MIST";
    return "MIST";
}

struct ScanPoint {
    double epsilon_d = 0.0;  // rad/ns
    double delta_a = 0.0;    // rad/ns
    double Pg_ss = 0.0;
    double Ph_ss = 0.0;
    double n_avg_ss = 0.0;
    double W_ss = 0.0;       // Ph_ss - Pg_ss
    std::string regime;      // sub-MIST / MIST / super-MIST, or error(<reason>)
    bool ok = false;
    Index n_max_used = 0;
};

struct ScanResult {
    std::vector<ScanPoint> points;  // grid order: delta_a outer, epsilon_d inner
};

struct ScanOptions {
    Index n_max = 100;
    bool auto_escalate = true;  // raise n_max when the truncation heuristic triggers
    Index n_max_cap = 160;
    SteadyStateOptions steady;
};

inline ScanPoint steady_scan_point(const ReducedParams& base, double epsilon_d, double delta_a,
                                   const ScanOptions& opt) {
    ScanPoint pt;
    pt.epsilon_d = epsilon_d;
    pt.delta_a = delta_a;
    try {
        const ReducedParams p = base.with_drive(epsilon_d, delta_a);
        if (epsilon_d == 0.0)
            throw DegenerateSteadyState(
                "zero drive: k-photon coupling inactive on the vacuum, dressed manifold "
                "degenerate");
        Index n_max = opt.n_max;
        if (opt.auto_escalate) {
            const Index need = suggested_n_max(p);
            while (n_max < need && n_max < opt.n_max_cap) n_max = std::min(opt.n_max_cap, n_max + 20);
        }
        const ReducedSystem sys = build_reduced_system(p, n_max);
        SteadyStateOptions sopt = opt.steady;
        sopt.dim_cap = std::max<Index>(sopt.dim_cap, sys.dim());
        std::vector<CollapseOp> cops;
        for (const auto& [rate, L] : sys.collapse) cops.push_back({rate, L.matrix});
        const Matrix rho = steady_state(to_sparse(sys.h_eff.matrix, 1e-300), cops, sopt);
        const ReducedObservables o = reduced_observables(sys, rho);
        pt.Pg_ss = o.P_g_dressed;
        pt.Ph_ss = o.P_h_dressed;
        pt.n_avg_ss = o.n_avg_dressed;
        pt.W_ss = o.P_h_dressed - o.P_g_dressed;
        pt.regime = regime_label(pt.Pg_ss, pt.Ph_ss);
        pt.n_max_used = n_max;
        pt.ok = true;
    } catch (const std::exception& e) {
        pt.regime = std::string("error(") + e.what() + ")";
        pt.Pg_ss = pt.Ph_ss = pt.n_avg_ss = pt.W_ss = std::nan("");
        pt.ok = false;
    }
    return pt;
}

inline ScanResult steady_scan(const ReducedParams& base, const std::vector<double>& epsilon_grid,
                              const std::vector<double>& delta_a_grid = {},
                              const ScanOptions& opt = {}) {
    if (epsilon_grid.empty())
        throw std::invalid_argument("steady_scan: empty epsilon grid");
    std::vector<double> das = delta_a_grid.empty() ? std::vector<double>{base.delta_a}
                                                   : delta_a_grid;
    ScanResult res;
    res.points.resize(das.size() * epsilon_grid.size());
    parallel_for(res.points.size(), [&](std::size_t idx) {
        const std::size_t di = idx / epsilon_grid.size();
        const std::size_t ei = idx % epsilon_grid.size();
        res.points[idx] = steady_scan_point(base, epsilon_grid[ei], das[di], opt);
    });
    return res;
}

// Regime boundaries along a single-delta_a scan: drive values where Pg_ss
// crosses 0.95 downward (sub-MIST -> MIST) and Ph_ss crosses 0.95 upward
// (MIST -> super-MIST), linearly interpolated; rad/ns.
struct RegimeBoundaries {
    std::optional<double> sub_to_mist;
    std::optional<double> mist_to_super;
};

inline RegimeBoundaries regime_boundaries(const ScanResult& scan) {
    RegimeBoundaries rb;
    const auto& pts = scan.points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!pts[i - 1].ok || !pts[i].ok) continue;
        const auto& a = pts[i - 1];
        const auto& b = pts[i];
        if (!rb.sub_to_mist && a.Pg_ss > 0.95 && b.Pg_ss <= 0.95) {
            const double f = (a.Pg_ss - 0.95) / (a.Pg_ss - b.Pg_ss);
            rb.sub_to_mist = a.epsilon_d + f * (b.epsilon_d - a.epsilon_d);
        }
        if (!rb.mist_to_super && a.Ph_ss < 0.95 && b.Ph_ss >= 0.95) {
            const double f = (0.95 - a.Ph_ss) / (b.Ph_ss - a.Ph_ss);
            rb.mist_to_super = a.epsilon_d + f * (b.epsilon_d - a.epsilon_d);
        }
    }
    return rb;
}

} // namespace mist
