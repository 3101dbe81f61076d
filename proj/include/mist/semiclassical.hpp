// semiclassical.hpp — coherent-amplitude resonator ODE coupled to a
// time-dependent qubit Schrödinger equation (the mean-field backaction model).
// Lab-frame integration with a fixed RK4 step small enough that numerical
// dispersion stays far below the physical detunings.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mist/csv.hpp"
#include "mist/errors.hpp"
#include "mist/full_model.hpp"
#include "mist/operators.hpp"

namespace mist {

struct SemiclassicalState {
    cd alpha{0.0, 0.0};
    Vector psi;     // qubit amplitudes, j_max levels
    double t = 0.0; // ns
};

struct SemiclassicalDeriv {
    cd dalpha;
    Vector dpsi;
};

// d alpha/dt = -i omega_r alpha + g <n> - 2 sin(omega_d t) eps_d - (kappa/2) alpha
// d psi/dt   = -i (H_q + 2 g n Im{alpha}) psi
inline SemiclassicalDeriv semiclassical_rhs(const SemiclassicalState& state,
                                            const FullSystem& sys) {
    SemiclassicalDeriv d;
    const cd n_expect = state.psi.dot(sys.spectrum.n_matrix * state.psi);
    d.dalpha = -im_unit * sys.omega_r * state.alpha + sys.g * n_expect
             - 2.0 * std::sin(sys.omega_d * state.t) * sys.epsilon_d
             - 0.5 * sys.kappa * state.alpha;
    Matrix hsc = 2.0 * sys.g * state.alpha.imag() * sys.spectrum.n_matrix;
    for (Index j = 0; j < sys.j_max; ++j) hsc(j, j) += sys.spectrum.omega(j);
    d.dpsi = -im_unit * (hsc * state.psi);
    return d;
}

struct SemiclassicalOptions {
    double substep_ns = 0.0;    // 0 = auto from the fastest retained phase
    double norm_tol = 1e-9;     // renormalize psi beyond this drift (logged)
};

struct SemiclassicalResult {
    TimeSeries series;  // t_ns, P0..P{jmax-1}, n_avg
    int renormalizations = 0;
    double substep_ns = 0.0;
};

// The coupled system is integrated in the interaction frame
//   c_j = psi_j e^{+i omega_j t},  beta = alpha e^{+i omega_d t},
// where the bare GHz phases are carried analytically and the integrator only
// resolves the coupling phases (|omega_j - omega_k| + omega_d at most).  At
// g = 0 the populations are then conserved exactly, and numerical dispersion
// cannot masquerade as a frequency shift of the multiphoton resonances.
inline double auto_semiclassical_substep(const FullSystem& sys) {
    double bohr = 0.0;
    for (Index j = 0; j < sys.j_max; ++j)
        for (Index k = 0; k < sys.j_max; ++k)
            bohr = std::max(bohr, std::abs(sys.spectrum.omega(j) - sys.spectrum.omega(k)));
    const double wmax = std::max(bohr + sys.omega_d, 2.0 * sys.omega_d);
    return 0.5 / wmax;
}

inline SemiclassicalResult evolve_semiclassical(const FullSystem& sys, const Vector& psi0,
                                                cd alpha0, const std::vector<double>& t_grid,
                                                const SemiclassicalOptions& opt = {}) {
    if (psi0.size() != sys.j_max)
        throw std::invalid_argument("evolve_semiclassical: psi0 size != j_max");
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw std::invalid_argument("evolve_semiclassical: t_grid must start at 0");

    SemiclassicalResult res;
    res.substep_ns = opt.substep_ns > 0 ? opt.substep_ns : auto_semiclassical_substep(sys);

    res.series.columns.push_back("t_ns");
    for (Index j = 0; j < sys.j_max; ++j)
        res.series.columns.push_back("P" + std::to_string(j));
    res.series.columns.push_back("n_avg");

    const Index L = sys.j_max;
    Vector c = psi0 / psi0.norm();
    cd beta = alpha0;
    double t = 0.0;

    // interaction-frame derivative of (c, beta)
    Matrix ntilde(L, L);
    auto deriv = [&](double tt, const Vector& cv, cd bv, Vector& dc, cd& db) {
        for (Index j = 0; j < L; ++j)
            for (Index k = 0; k < L; ++k)
                ntilde(j, k) = sys.spectrum.n_matrix(j, k) *
                               std::exp(im_unit * (sys.spectrum.omega(j) -
                                                   sys.spectrum.omega(k)) * tt);
        const cd alpha = bv * std::exp(-im_unit * sys.omega_d * tt);
        dc.noalias() = (-im_unit * 2.0 * sys.g * alpha.imag()) * (ntilde * cv);
        const cd n_expect = cv.dot(ntilde * cv);
        db = -im_unit * (sys.omega_r - sys.omega_d) * bv - 0.5 * sys.kappa * bv
           + sys.g * n_expect * std::exp(im_unit * sys.omega_d * tt)
           + im_unit * sys.epsilon_d * (std::exp(2.0 * im_unit * sys.omega_d * tt) - 1.0);
    };

    auto record = [&]() {
        std::vector<double> row{t};
        for (Index j = 0; j < L; ++j) row.push_back(std::norm(c(j)));
        row.push_back(std::norm(beta));
        res.series.add_row(row);
    };

    Vector k1(L), k2(L), k3(L), k4(L), tmp(L);
    cd b1, b2, b3, b4;
    auto step = [&](double t0, double h) {
        deriv(t0, c, beta, k1, b1);
        tmp = c + 0.5 * h * k1;
        deriv(t0 + 0.5 * h, tmp, beta + 0.5 * h * b1, k2, b2);
        tmp = c + 0.5 * h * k2;
        deriv(t0 + 0.5 * h, tmp, beta + 0.5 * h * b2, k3, b3);
        tmp = c + h * k3;
        deriv(t0 + h, tmp, beta + h * b3, k4, b4);
        c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        beta += (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    };

    record();
    for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
        const double span = t_grid[gi] - t_grid[gi - 1];
        const int nsub = std::max(1, static_cast<int>(std::ceil(span / res.substep_ns)));
        const double h = span / nsub;
        for (int s = 0; s < nsub; ++s) step(t_grid[gi - 1] + s * h, h);
        t = t_grid[gi];
        const double norm = c.norm();
        if (!std::isfinite(norm) || norm == 0.0)
            throw NumericalError("evolve_semiclassical: step instability at t=" +
                                 std::to_string(t));
        if (std::abs(norm - 1.0) > opt.norm_tol) {
            c /= norm;
            ++res.renormalizations;
        }
        record();
    }
    return res;
}

} // namespace mist
