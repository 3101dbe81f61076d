// lindblad.hpp — matrix-free Lindblad right-hand side and fixed-step RK4
// density-matrix evolution with an observation grid.
//
// The observation grid step (default 2.5 ns) is subdivided into integrator
// substeps chosen from a Gershgorin bound on the generator's spectral radius,
// so stiff far-detuned sectors cannot destabilize the fixed-step scheme.  The
// substep count is computed deterministically from the operators alone.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "mist/csv.hpp"
#include "mist/errors.hpp"
#include "mist/operators.hpp"

namespace mist {

struct CollapseOp {
    double rate = 0.0;  // kappa_c multiplying D[L]
    Matrix op;          // L
};

// d rho / dt = -i[H, rho] + sum_c rate_c (L rho L^dag - 1/2 {L^dag L, rho}),
// evaluated by matrix products; no superoperator is ever materialized here.
inline Matrix lindblad_rhs(const Matrix& H, const std::vector<CollapseOp>& collapse,
                           const Matrix& rho) {
    if (H.rows() != rho.rows() || H.cols() != rho.cols())
        throw std::invalid_argument("lindblad_rhs: H/rho dimension mismatch");
    Matrix out = -im_unit * (H * rho - rho * H);
    for (const auto& c : collapse) {
        if (c.op.rows() != rho.rows())
            throw std::invalid_argument("lindblad_rhs: collapse op dimension mismatch");
        const Matrix LdagL = c.op.adjoint() * c.op;
        out += c.rate * (c.op * rho * c.op.adjoint()
                         - 0.5 * (LdagL * rho + rho * LdagL));
    }
    return out;
}

inline Matrix lindblad_rhs(const LabeledOperator& H,
                           const std::vector<std::pair<double, LabeledOperator>>& collapse,
                           const DensityMatrix& rho) {
    std::vector<CollapseOp> ops;
    ops.reserve(collapse.size());
    for (const auto& [rate, L] : collapse) {
        require_compatible(H, L, "lindblad_rhs");
        ops.push_back({rate, L.matrix});
    }
    if (H.dims != rho.dims || H.basis != rho.basis)
        throw std::invalid_argument("lindblad_rhs: H/rho dims or basis mismatch");
    return lindblad_rhs(H.matrix, ops, rho.matrix);
}

// max row sum of |M|; bounds the spectral radius
inline double gershgorin_scale(const Matrix& m) {
    double best = 0.0;
    for (Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
    return best;
}

inline double gershgorin_scale(const SparseMatrix& m) {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            rowsum(it.row()) += std::abs(it.value());
    return m.rows() ? rowsum.maxCoeff() : 0.0;
}

struct StepperConfig {
    double dt_ns = 2.5;        // observation grid step
    int substeps = 0;          // integrator substeps per grid step; 0 = auto
    double stability_margin = 1.2;  // target |lambda|*h for the fastest mode
    double renorm_tol = 1e-7;  // trace drift beyond this renormalizes (logged)
    double abort_tol = 1e-4;   // trace drift beyond this aborts
};

struct LindbladSystem {
    SparseMatrix H;                 // static Hamiltonian
    std::vector<CollapseOp> collapse;
    // optional sinusoidal drive: H(t) = H + sin(omega_drive * t) * W
    SparseMatrix W;
    double omega_drive = 0.0;
    bool has_drive = false;

    double generator_scale() const {
        double s = 2.0 * gershgorin_scale(H);
        if (has_drive) s += 2.0 * gershgorin_scale(W);
        for (const auto& c : collapse) {
            const double l = gershgorin_scale(to_sparse(c.op));
            const double ldl = gershgorin_scale(to_sparse(Matrix(c.op.adjoint() * c.op)));
            s += c.rate * (l * l + ldl);
        }
        return s;
    }
};

using SampleCallback = std::function<void(double t_ns, const Matrix& rho)>;

struct EvolutionResult {
    TimeSeries series;                 // t_ns + named observable columns
    std::vector<DensityMatrix> snapshots;
    std::vector<double> snapshot_times;
    int renormalizations = 0;
    int substeps_per_grid_step = 0;
};

inline int auto_substeps(const LindbladSystem& sys, const StepperConfig& cfg) {
    if (cfg.substeps > 0) return cfg.substeps;
    const double scale = sys.generator_scale();
    return std::max(1, static_cast<int>(std::ceil(cfg.dt_ns * scale / cfg.stability_margin)));
}

// Fixed-step RK4 over a strictly increasing grid t_grid (t_grid[0] == 0 maps to
// rho0).  Observables are sampled at every grid point; snapshots at the listed
// times (matched to the nearest grid point).
inline EvolutionResult evolve_density_matrix(
        const DensityMatrix& rho0, const LindbladSystem& sys,
        const std::vector<double>& t_grid, const StepperConfig& cfg,
        const std::vector<std::pair<std::string, Matrix>>& observables = {},
        const std::vector<double>& snapshot_times = {},
        const SampleCallback& on_sample = nullptr) {
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw std::invalid_argument("evolve_density_matrix: t_grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] <= t_grid[i - 1])
            throw std::invalid_argument("evolve_density_matrix: t_grid must be strictly increasing");
    if (sys.H.rows() != rho0.dim())
        throw std::invalid_argument("evolve_density_matrix: H/rho dimension mismatch");

    const Index d = rho0.dim();
    EvolutionResult res;
    res.substeps_per_grid_step = auto_substeps(sys, cfg);

    // cached collapse machinery: K = sum rate * L^dag L enters as an anticommutator
    std::vector<SparseMatrix> Ls, Ldags;
    Matrix K = Matrix::Zero(d, d);
    for (const auto& c : sys.collapse) {
        Ls.push_back(to_sparse(c.op));
        Ldags.push_back(to_sparse(Matrix(c.op.adjoint())));
        K += c.rate * (c.op.adjoint() * c.op);
    }
    const SparseMatrix Ksp = to_sparse(K);

    Matrix hr(d, d);  // scratch for H(t) * rho
    auto rhs = [&](double t, const Matrix& rho_in, Matrix& out) {
        hr.noalias() = sys.H * rho_in;
        if (sys.has_drive) hr.noalias() += std::sin(sys.omega_drive * t) * (sys.W * rho_in);
        // -i(X - X^dag) with X = H(t) rho_in, valid for Hermitian H(t), rho_in
        out.noalias() = -im_unit * hr;
        out.noalias() += im_unit * hr.adjoint();
        for (std::size_t c = 0; c < Ls.size(); ++c) {
            const Matrix Lr = Ls[c] * rho_in;
            out.noalias() += sys.collapse[c].rate * (Lr * Ldags[c]);
        }
        const Matrix Kr = Ksp * rho_in;
        out.noalias() -= 0.5 * (Kr + Kr.adjoint());
    };

    res.series.columns.push_back("t_ns");
    for (const auto& [name, obs] : observables) res.series.columns.push_back(name);

    Matrix rho = rho0.matrix;
    Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);

    auto sample = [&](double t) {
        rho = 0.5 * (rho + rho.adjoint().eval());   // clear Hermiticity roundoff
        std::vector<double> row{t};
        for (const auto& [name, obs] : observables)
            row.push_back(expectation(rho, obs).real());
        res.series.add_row(row);
        if (on_sample) on_sample(t, rho);
        for (double ts : snapshot_times)
            if (std::abs(ts - t) < 1e-9) {
                res.snapshots.emplace_back(rho, rho0.dims, rho0.basis);
                res.snapshot_times.push_back(t);
            }
    };

    sample(t_grid[0]);
    for (std::size_t g = 1; g < t_grid.size(); ++g) {
        const double span = t_grid[g] - t_grid[g - 1];
        const int nsub = std::max(1, static_cast<int>(std::ceil(
            span / cfg.dt_ns * res.substeps_per_grid_step)));
        const double h = span / nsub;
        double t = t_grid[g - 1];
        for (int s = 0; s < nsub; ++s) {
            rhs(t, rho, k1);
            tmp = rho + 0.5 * h * k1; rhs(t + 0.5 * h, tmp, k2);
            tmp = rho + 0.5 * h * k2; rhs(t + 0.5 * h, tmp, k3);
            tmp = rho + h * k3;       rhs(t + h, tmp, k4);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            // project back onto Hermitian matrices each substep: the generator is
            // strongly non-normal (displacement structure), and roundoff in the
            // anti-Hermitian sector otherwise seeds slow pseudospectral growth
            tmp.noalias() = rho.adjoint();
            rho = 0.5 * (rho + tmp);
            t += h;
        }
        const double tr = rho.trace().real();
        const double drift = std::abs(tr - 1.0);
        if (drift > cfg.abort_tol)
            throw NumericalError("evolve_density_matrix: step instability, trace drift " +
                                 std::to_string(drift) + " at t=" + std::to_string(t_grid[g]) +
                                 " ns (substeps=" + std::to_string(res.substeps_per_grid_step) + ")");
        if (drift > cfg.renorm_tol) {
            rho /= tr;
            ++res.renormalizations;
        }
        sample(t_grid[g]);
    }
    return res;
}

inline std::vector<double> uniform_grid(double t_end_ns, double dt_ns) {
    std::vector<double> grid;
    const int n = std::max(1, static_cast<int>(std::llround(t_end_ns / dt_ns)));
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) grid.push_back(i * dt_ns);
    return grid;
}

} // namespace mist
