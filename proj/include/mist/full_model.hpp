// full_model.hpp — the time-dependent qubit–resonator benchmark model evolved
// by quantum-jump Monte Carlo trajectories, plus bare-basis observables.
//
// The lab-frame Hamiltonian (assembled by hamiltonian_at) carries resonator
// phases up to omega_r * n_max, which would force sub-femtosecond fixed steps.
// Trajectories are therefore integrated in the frame rotating at omega_d for
// every subsystem level (an exact unitary change of variables, no rotating-wave
// approximation): populations, photon number, and trajectory norms are frame
// invariants, and the remaining time dependence tops out at a few omega_d.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "mist/errors.hpp"
#include "mist/csv.hpp"
#include "mist/fluxonium.hpp"
#include "mist/lindblad.hpp"
#include "mist/operators.hpp"
#include "mist/rng.hpp"
#include "mist/schrieffer_wolff.hpp"
#include "mist/sweep.hpp"

namespace mist {

struct FullSystem {
    QubitSpectrum spectrum;  // truncated to j_max levels
    double omega_r = 0.0;
    double omega_d = 0.0;
    double g = 0.0;
    double kappa = 0.0;
    double epsilon_d = 0.0;  // constant envelope
    Index n_max = 40;
    Index j_max = 4;

    Index dim() const { return j_max * (n_max + 1); }
};

inline FullSystem make_full_system(const QubitSpectrum& spectrum, double omega_r,
                                   double omega_d, double g, double kappa, double epsilon_d,
                                   Index n_max, Index j_max) {
    if (spectrum.level_count < j_max)
        throw std::invalid_argument("make_full_system: spectrum has fewer than j_max levels");
    FullSystem sys;
    sys.spectrum.level_count = j_max;
    sys.spectrum.omega = spectrum.omega.head(j_max);
    sys.spectrum.n_matrix = spectrum.n_matrix.topLeftCorner(j_max, j_max);
    sys.omega_r = omega_r;
    sys.omega_d = omega_d;
    sys.g = g;
    sys.kappa = kappa;
    sys.epsilon_d = epsilon_d;
    sys.n_max = n_max;
    sys.j_max = j_max;
    return sys;
}

// H_qr + drive at time t in the bare product basis {|j> ⊗ |n>} (lab frame).
inline LabeledOperator hamiltonian_at(const FullSystem& sys, double t) {
    if (t < 0) throw std::invalid_argument("hamiltonian_at: t must be >= 0");
    const Index np = sys.n_max + 1;
    Matrix Hq = Matrix::Zero(sys.j_max, sys.j_max);
    for (Index j = 0; j < sys.j_max; ++j) Hq(j, j) = sys.spectrum.omega(j);
    const Matrix a = destroy(np);
    Matrix H = kron(Hq, identity(np))
             + sys.omega_r * kron(identity(sys.j_max), number_op(np))
             + im_unit * sys.g * kron(sys.spectrum.n_matrix, Matrix(a.adjoint() - a));
    H += -2.0 * sys.epsilon_d * std::sin(sys.omega_d * t) *
         kron(identity(sys.j_max), Matrix(im_unit * (a.adjoint() - a)));
    return LabeledOperator(std::move(H), {sys.j_max, np}, Basis::BareLab);
}

namespace full_detail {

// Non-Hermitian generator in the rotating frame, expanded as
// H_NH(t) = sum_k e^{i k omega_d t} T_k with integer harmonics k.
struct RotatingFrameTerms {
    std::vector<int> harmonics;
    std::vector<SparseMatrix> terms;
    double omega_d = 0.0;
    Index dim = 0;

    void add(int k, const Matrix& m) {
        for (std::size_t i = 0; i < harmonics.size(); ++i)
            if (harmonics[i] == k) {
                terms[i] = SparseMatrix(terms[i] + to_sparse(m, 1e-300));
                return;
            }
        harmonics.push_back(k);
        terms.push_back(to_sparse(m, 1e-300));
    }

    // y = -i H_NH(t) x
    void apply_deriv(double t, const Vector& x, Vector& y) const {
        y.setZero();
        for (std::size_t i = 0; i < harmonics.size(); ++i) {
            const cd phase =
                -im_unit * std::exp(im_unit * (harmonics[i] * omega_d * t));
            y.noalias() += phase * (terms[i] * x);
        }
    }

    double scale() const {
        double s = 0.0;
        for (const auto& m : terms) s += gershgorin_scale(m);
        return s;
    }
};

inline RotatingFrameTerms build_rotating_terms(const FullSystem& sys) {
    const Index np = sys.n_max + 1;
    const Index L = sys.j_max;
    RotatingFrameTerms rf;
    rf.omega_d = sys.omega_d;
    rf.dim = sys.dim();

    std::vector<int> q(L);
    for (Index j = 0; j < L; ++j)
        q[j] = static_cast<int>(std::llround(sys.spectrum.omega(j) / sys.omega_d));

    Matrix diag = Matrix::Zero(rf.dim, rf.dim);
    const Matrix a = destroy(np);
    const Matrix nph = number_op(np);
    Matrix qubit_detuned = Matrix::Zero(L, L);
    for (Index j = 0; j < L; ++j)
        qubit_detuned(j, j) = sys.spectrum.omega(j) - q[j] * sys.omega_d;
    diag += kron(qubit_detuned, identity(np));
    diag += (sys.omega_r - sys.omega_d) * kron(identity(L), nph);
    diag += -im_unit * 0.5 * sys.kappa * kron(identity(L), nph);   // photon-loss sink
    diag += sys.epsilon_d * kron(identity(L), Matrix(a + a.adjoint()));  // static drive part
    rf.add(0, diag);

    // coupling i g n_ij |i><j| (a^dag e^{i w t} - a e^{-i w t}) e^{i (q_i - q_j) w t}
    for (Index i = 0; i < L; ++i)
        for (Index j = 0; j < L; ++j) {
            const cd nij = sys.spectrum.n_matrix(i, j);
            if (std::abs(nij) < 1e-15) continue;
            Matrix proj = Matrix::Zero(L, L);
            proj(i, j) = 1.0;
            const int m = q[i] - q[j];
            rf.add(m + 1, Matrix(im_unit * sys.g * nij * kron(proj, Matrix(a.adjoint()))));
            rf.add(m - 1, Matrix(-im_unit * sys.g * nij * kron(proj, a)));
        }

    // counter-rotating drive remainder: -eps_d (a^dag e^{2iwt} + a e^{-2iwt})
    rf.add(+2, Matrix(-sys.epsilon_d * kron(identity(L), Matrix(a.adjoint()))));
    rf.add(-2, Matrix(-sys.epsilon_d * kron(identity(L), a)));
    return rf;
}

} // namespace full_detail

struct JumpRecord {
    double t_ns = 0.0;
    int channel = 0;  // single photon-loss channel in this model
};

struct TrajectoryEnsemble {
    int trajectory_count = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<JumpRecord>> jumps;  // per trajectory
    TimeSeries averages;                          // t_ns, P0..P{jmax-1}, n_avg, stderr_Pg
};

struct McOptions {
    double substep_ns = 0.0;        // 0 = auto from harmonic content and stiffness
    double bisection_tol = 1e-3;    // fraction of a substep
    double norm_floor = 1e-12;      // norm underflow without detected jump = failure
};

inline double auto_mc_substep(const full_detail::RotatingFrameTerms& rf, double omega_d) {
    // resolve the fastest harmonic that carries appreciable weight (harmonics
    // below 1% of the total norm are far off-resonant and tolerate coarse
    // phase sampling), and respect RK4 stability for the static stiffness
    double total = 0.0;
    std::vector<double> norms(rf.terms.size());
    for (std::size_t i = 0; i < rf.terms.size(); ++i) {
        norms[i] = gershgorin_scale(rf.terms[i]);
        total += norms[i];
    }
    int kmax = 1;
    for (std::size_t i = 0; i < rf.terms.size(); ++i)
        if (norms[i] > 0.01 * total) kmax = std::max(kmax, std::abs(rf.harmonics[i]));
    const double h_phase = 0.5 / (kmax * omega_d);
    const double h_stab = 1.2 / std::max(1e-12, total);
    return std::min(h_phase, h_stab);
}

inline TrajectoryEnsemble monte_carlo_evolve(const FullSystem& sys, const StateVector& psi0,
                                             const std::vector<double>& t_grid,
                                             int trajectory_count, std::uint64_t seed,
                                             const McOptions& opt = {}) {
    if (psi0.basis != Basis::BareLab)
        throw std::invalid_argument("monte_carlo_evolve: initial state must be bare_lab");
    if (psi0.dims != std::vector<Index>{sys.j_max, sys.n_max + 1})
        throw std::invalid_argument("monte_carlo_evolve: psi0 dims mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("monte_carlo_evolve: psi0 not normalized");
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw std::invalid_argument("monte_carlo_evolve: t_grid must start at 0");

    const auto rf = full_detail::build_rotating_terms(sys);
    const double h0 = opt.substep_ns > 0 ? opt.substep_ns : auto_mc_substep(rf, sys.omega_d);
    const Index d = sys.dim();
    const Index np = sys.n_max + 1;
    const SparseMatrix jump_op = to_sparse(kron(identity(sys.j_max), destroy(np)), 1e-300);

    const std::size_t n_times = t_grid.size();
    const std::size_t n_cols = static_cast<std::size_t>(sys.j_max) + 1;  // P_j..., n_avg
    std::vector<std::vector<double>> traj_data(
        trajectory_count, std::vector<double>(n_times * n_cols, 0.0));
    std::vector<std::vector<JumpRecord>> all_jumps(trajectory_count);

    parallel_for(static_cast<std::size_t>(trajectory_count), [&](std::size_t traj) {
        RngStream rng(seed, traj);
        Vector psi = psi0.amplitudes;
        Vector k1(d), k2(d), k3(d), k4(d), tmp(d), save(d);
        double threshold = rng.next_double_open0();

        auto rk4_step = [&](double t, double h, Vector& state) {
            rf.apply_deriv(t, state, k1);
            tmp = state + 0.5 * h * k1;
            rf.apply_deriv(t + 0.5 * h, tmp, k2);
            tmp = state + 0.5 * h * k2;
            rf.apply_deriv(t + 0.5 * h, tmp, k3);
            tmp = state + h * k3;
            rf.apply_deriv(t + h, tmp, k4);
            state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        };

        auto record = [&](std::size_t gi) {
            const double inv = 1.0 / psi.squaredNorm();
            double* out = traj_data[traj].data() + gi * n_cols;
            for (Index j = 0; j < sys.j_max; ++j) {
                double pj = 0.0;
                for (Index n = 0; n < np; ++n) pj += std::norm(psi(j * np + n));
                out[j] = pj * inv;
            }
            double navg = 0.0;
            for (Index j = 0; j < sys.j_max; ++j)
                for (Index n = 0; n < np; ++n) navg += n * std::norm(psi(j * np + n));
            out[sys.j_max] = navg * inv;
        };

        record(0);
        double t = t_grid[0];
        for (std::size_t gi = 1; gi < n_times; ++gi) {
            const double span = t_grid[gi] - t_grid[gi - 1];
            const int nsub = std::max(1, static_cast<int>(std::ceil(span / h0)));
            const double h = span / nsub;
            for (int s = 0; s < nsub; ++s) {
                save = psi;
                const double t0 = t;
                rk4_step(t0, h, psi);
                t = t0 + h;
                if (psi.squaredNorm() < threshold) {
                    // bisect the jump time within [t0, t0 + h]
                    double lo = 0.0, hi = h;
                    while (hi - lo > opt.bisection_tol * h) {
                        const double mid = 0.5 * (lo + hi);
                        tmp = save;
                        rk4_step(t0, mid, tmp);
                        if (tmp.squaredNorm() < threshold) hi = mid;
                        else lo = mid;
                    }
                    const double tj = 0.5 * (lo + hi);
                    psi = save;
                    rk4_step(t0, tj, psi);
                    psi = jump_op * psi;
                    const double nn = psi.norm();
                    if (nn < opt.norm_floor)
                        throw NumericalError("monte_carlo_evolve: norm underflow without "
                                             "viable jump at t=" + std::to_string(t0 + tj));
                    psi /= nn;
                    all_jumps[traj].push_back({t0 + tj, 0});
                    threshold = rng.next_double_open0();
                    // finish the remainder of the substep
                    rk4_step(t0 + tj, h - tj, psi);
                    t = t0 + h;
                }
            }
            record(gi);
        }
    });

    TrajectoryEnsemble ens;
    ens.trajectory_count = trajectory_count;
    ens.seed = seed;
    ens.jumps = std::move(all_jumps);
    ens.averages.columns.push_back("t_ns");
    for (Index j = 0; j < sys.j_max; ++j)
        ens.averages.columns.push_back("P" + std::to_string(j));
    ens.averages.columns.push_back("n_avg");
    ens.averages.columns.push_back("stderr_Pg");

    // deterministic fixed-order reduction over trajectory index
    for (std::size_t gi = 0; gi < n_times; ++gi) {
        std::vector<double> row(1 + n_cols + 1, 0.0);
        row[0] = t_grid[gi];
        for (int traj = 0; traj < trajectory_count; ++traj)
            for (std::size_t c = 0; c < n_cols; ++c)
                row[1 + c] += traj_data[traj][gi * n_cols + c];
        for (std::size_t c = 0; c < n_cols; ++c) row[1 + c] /= trajectory_count;
        double var = 0.0;
        for (int traj = 0; traj < trajectory_count; ++traj) {
            const double dev = traj_data[traj][gi * n_cols] - row[1];
            var += dev * dev;
        }
        const double denom = trajectory_count > 1
            ? static_cast<double>(trajectory_count - 1) * trajectory_count : 1.0;
        row[1 + n_cols] = std::sqrt(var / denom);
        ens.averages.add_row(row);
    }
    return ens;
}

struct BareObservables {
    Eigen::VectorXd populations;  // P_j
    double n_avg = 0.0;
};

inline BareObservables bare_observables(const DensityMatrix& rho) {
    if (rho.basis != Basis::BareLab)
        throw std::invalid_argument("bare_observables: state must be bare_lab "
                                    "(map dressed states through the SW frame first)");
    const Index L = rho.dims[0], np = rho.dims[1];
    BareObservables out;
    out.populations = Eigen::VectorXd::Zero(L);
    for (Index j = 0; j < L; ++j)
        for (Index n = 0; n < np; ++n) {
            const double p = rho.matrix(j * np + n, j * np + n).real();
            out.populations(j) += p;
            out.n_avg += n * p;
        }
    return out;
}

inline BareObservables bare_observables(const StateVector& psi) {
    return bare_observables(pure_state_density(psi));
}

// ---------------- dressed (reduced) -> bare lab frame mapping -----------------

// Embeds a reduced-model density matrix (dressed levels {g, h}) into the
// j_max-level dressed space, undoes the rotating frame
// U_r(t) = exp[-i (omega_d a^dag a + k omega_d |h><h|) t], and conjugates by
// e^{-S}.  Used for bare-basis comparisons against the full model.
struct DressedToBareMap {
    Matrix exp_minus_S;     // on the j_max x (n_max+1) joint space
    Index g_level = 0, h_level = 3;
    Index j_max = 4, np = 0;
    double omega_d = 0.0;
    int order_k = 2;

    DensityMatrix map(const Matrix& rho_reduced, double t_ns) const {
        Matrix big = Matrix::Zero(j_max * np, j_max * np);
        auto embed = [&](Index dressed) { return (dressed == 0 ? g_level : h_level); };
        for (Index qi = 0; qi < 2; ++qi)
            for (Index qj = 0; qj < 2; ++qj)
                for (Index n = 0; n < np; ++n)
                    for (Index m = 0; m < np; ++m) {
                        cd v = rho_reduced(qi * np + n, qj * np + m);
                        if (v == cd(0.0, 0.0)) continue;
                        // U_r phases relative between sectors and photon numbers
                        const double phase =
                            -omega_d * t_ns * (static_cast<double>(n - m) +
                                               order_k * (static_cast<double>(qi) -
                                                          static_cast<double>(qj)));
                        v *= std::exp(im_unit * phase);
                        big(embed(qi) * np + n, embed(qj) * np + m) = v;
                    }
        Matrix bare = exp_minus_S * big * exp_minus_S.adjoint();
        return DensityMatrix(std::move(bare), {j_max, np}, Basis::BareLab);
    }
};

inline DressedToBareMap make_dressed_to_bare_map(const QubitSpectrum& spectrum_jmax, double g,
                                                 double omega_r, double omega_d, Index n_max,
                                                 Index g_level, Index h_level, int order_k) {
    DressedToBareMap map;
    map.j_max = spectrum_jmax.level_count;
    map.np = n_max + 1;
    map.g_level = g_level;
    map.h_level = h_level;
    map.omega_d = omega_d;
    map.order_k = order_k;
    const SWExpansion sw = first_order_generator(spectrum_jmax, g, omega_r);
    map.exp_minus_S = exp_antihermitian(Matrix(-assemble_joint_generator(sw, n_max + 1)));
    return map;
}

} // namespace mist
