// rate_theory.hpp — analytic driven-dissipative rates for the reduced model:
// conditional displaced frame, displaced-Fock matrix elements A^(k), the
// bidiagonal recurrence for the adiabatically eliminated coherences, k-photon
// transition rates, steady-state populations, the closed-form finite-time
// population estimate, and exponential relaxation fits.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "mist/errors.hpp"
#include "mist/csv.hpp"
#include "mist/schrieffer_wolff.hpp"

namespace mist {

struct ConditionalAmplitudes {
    cd alpha_g{0.0, 0.0};
    cd alpha_h{0.0, 0.0};
};

// alpha_i = -eps_d / (chi_check_i - i kappa/2), chi_check_i = chi_i + delta_a
inline ConditionalAmplitudes conditional_amplitudes(const ReducedParams& p) {
    if (p.kappa <= 0.0)
        throw std::invalid_argument("conditional_amplitudes: kappa must be > 0");
    ConditionalAmplitudes a;
    a.alpha_g = -p.epsilon_d / (cd(p.chi_check_g(), -0.5 * p.kappa));
    a.alpha_h = -p.epsilon_d / (cd(p.chi_check_h(), -0.5 * p.kappa));
    return a;
}

// A^(k) = D^dag(alpha_h) a^k D(alpha_g).  Using
//   D^dag(alpha_h) D(alpha_g) = e^{i Im(conj(alpha_h) alpha_g)} D(beta),  beta = alpha_g - alpha_h,
//   a^k D(alpha_g) = D(alpha_g) (a + alpha_g)^k,
// the required rows are analytic in displaced-Fock overlaps:
//   A_{n0} = phase * alpha_g^k * e^{-|beta|^2/2} * beta^n / sqrt(n!)
//   A_{0m} = phase * e^{-|beta|^2/2} * sum_j C(k,j) alpha_g^{k-j}
//                   sqrt(m (m-1) ... (m-j+1)) * (-conj(beta))^{m-j} / sqrt((m-j)!)
struct DisplacedElements {
    int k = 2;
    Index n_trunc = 0;
    std::vector<cd> A_n0;  // n = 0 .. n_trunc
    std::vector<cd> A_0m;  // m = 0 .. n_trunc
};

inline DisplacedElements displaced_matrix_elements(const ConditionalAmplitudes& alpha, int k,
                                                   Index n_trunc) {
    const double amax2 = std::max(std::norm(alpha.alpha_g), std::norm(alpha.alpha_h));
    if (n_trunc < static_cast<Index>(std::ceil(4.0 * amax2)) + 20)
        throw std::invalid_argument("displaced_matrix_elements: n_trunc below 4*max|alpha|^2 + 20");
    const cd beta = alpha.alpha_g - alpha.alpha_h;
    const cd phase = std::exp(im_unit * std::imag(std::conj(alpha.alpha_h) * alpha.alpha_g));
    const double gauss = std::exp(-0.5 * std::norm(beta));
    const cd alpha_g_k = std::pow(alpha.alpha_g, k);

    DisplacedElements out;
    out.k = k;
    out.n_trunc = n_trunc;
    out.A_n0.resize(n_trunc + 1);
    out.A_0m.resize(n_trunc + 1);

    // q[s] = beta^s / sqrt(s!) and qb[s] = (-conj(beta))^s / sqrt(s!)
    std::vector<cd> q(n_trunc + 1), qb(n_trunc + 1);
    q[0] = qb[0] = cd(1.0, 0.0);
    for (Index s = 1; s <= n_trunc; ++s) {
        const double rs = 1.0 / std::sqrt(static_cast<double>(s));
        q[s] = q[s - 1] * beta * rs;
        qb[s] = qb[s - 1] * (-std::conj(beta)) * rs;
    }

    std::vector<double> binom(k + 1);
    binom[0] = 1.0;
    for (int j = 1; j <= k; ++j) binom[j] = binom[j - 1] * (k - j + 1) / j;

    for (Index n = 0; n <= n_trunc; ++n)
        out.A_n0[n] = phase * alpha_g_k * gauss * q[n];
    for (Index m = 0; m <= n_trunc; ++m) {
        cd sum{0.0, 0.0};
        double falling = 1.0;  // m (m-1) ... (m-j+1)
        for (int j = 0; j <= std::min<Index>(k, m); ++j) {
            if (j > 0) falling *= static_cast<double>(m - j + 1);
            sum += binom[j] * std::pow(alpha.alpha_g, k - j) * std::sqrt(falling) * qb[m - j];
        }
        out.A_0m[m] = phase * gauss * sum;
    }
    return out;
}

// Recurrence coefficients of the displaced-frame generator acting on |n><m| sigma_+.
struct RateWorkspace {
    std::vector<cd> c00_n0, c00_0m;  // diagonal coefficients along the two rows
    std::vector<cd> c10_n0, c01_0m;  // couplings to the next element
    std::vector<cd> x_g, x_h;        // recurrence solutions
    DisplacedElements A;
    cd omega_q_tilde{0.0, 0.0};
    cd frame_constant{0.0, 0.0};     // C: displaced-frame energy offset (cancels downstream)
    Index n_trunc = 0;
    int k = 2;

    static cd c11(double kappa, Index n, Index m) {
        return kappa * std::sqrt(static_cast<double>((n + 1) * (m + 1)));
    }
};

inline void recurrence_coefficients(const ReducedParams& p, const ConditionalAmplitudes& a,
                                    Index n_trunc, RateWorkspace& ws) {
    const double xg = p.chi_check_g(), xh = p.chi_check_h();
    const cd ag = a.alpha_g, ah = a.alpha_h;
    const double ng2 = std::norm(ag), nh2 = std::norm(ah);
    ws.omega_q_tilde = p.delta_q + xh * nh2 - xg * ng2 +
                       p.epsilon_d * (std::conj(ah) - std::conj(ag)) +
                       p.epsilon_d * (ah - ag);
    ws.frame_constant = 0.5 * (xh * nh2 + xg * ng2 +
                               p.epsilon_d * (std::conj(ah) + std::conj(ag)) +
                               p.epsilon_d * (ah + ag));
    const cd mixing = p.kappa * (ah * std::conj(ag) - 0.5 * (nh2 + ng2));
    ws.n_trunc = n_trunc;
    ws.c00_n0.resize(n_trunc + 1);
    ws.c00_0m.resize(n_trunc + 1);
    ws.c10_n0.resize(n_trunc + 1);
    ws.c01_0m.resize(n_trunc + 1);
    for (Index n = 0; n <= n_trunc; ++n) {
        ws.c00_n0[n] = -im_unit * (xh * static_cast<double>(n) + ws.omega_q_tilde)
                       - 0.5 * p.kappa * static_cast<double>(n) + mixing;
        ws.c00_0m[n] = -im_unit * (-xg * static_cast<double>(n) + ws.omega_q_tilde)
                       - 0.5 * p.kappa * static_cast<double>(n) + mixing;
        const double root = std::sqrt(static_cast<double>(n + 1));
        ws.c10_n0[n] = p.kappa * (std::conj(ag) - std::conj(ah)) * root;
        ws.c01_0m[n] = -p.kappa * (ag - ah) * root;
    }
}

// Truncated evaluation of x_n = sum_{l>=n} (-1)^{l-n} (y_l/b_l) prod_{k=n}^{l-1} (d_k/b_k),
// equivalently the backward substitution of b_n x_n + d_n x_{n+1} = y_n with the
// tail beyond n_trunc dropped.
inline std::vector<cd> solve_recurrence(const std::vector<cd>& y, const std::vector<cd>& b,
                                        const std::vector<cd>& d) {
    const std::size_t n = y.size();
    if (b.size() != n || d.size() + 1 < n)
        throw std::invalid_argument("solve_recurrence: sequence length mismatch");
    double worst = 0.0;
    for (std::size_t k = n / 2; k + 1 < n; ++k)
        worst = std::max(worst, std::abs(d[k] / b[k]));
    if (worst >= 1.0)
        throw NumericalError("solve_recurrence: tail ratio |d/b| = " + std::to_string(worst) +
                             " >= 1, backward sum diverges");
    std::vector<cd> x(n);
    x[n - 1] = y[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] = y[i] / b[i] - (d[i] / b[i]) * x[i + 1];
    return x;
}

struct RateResult {
    double gamma_g = 0.0;   // 1/ns
    double gamma_h = 0.0;   // 1/ns
    double gamma = 0.0;     // gamma_g + gamma_h
    double Pg_ss = 0.0;
    double Ph_ss = 0.0;
    Index n_trunc_used = 0;
    double bad_cavity_ratio = 0.0;  // kappa / (|g_eff| * max(1, max|alpha|^2))
    bool bad_cavity_ok = true;      // reported, not enforced
};

inline Index default_rate_truncation(const ConditionalAmplitudes& a) {
    const double amax2 = std::max(std::norm(a.alpha_g), std::norm(a.alpha_h));
    return std::max<Index>(60, static_cast<Index>(std::ceil(6.0 * amax2 + 30.0)));
}

namespace rate_detail {

struct RatePair {
    double gamma_g = 0.0, gamma_h = 0.0;
};

inline RatePair rates_at_truncation(const ReducedParams& p, const ConditionalAmplitudes& a,
                                    Index n_trunc, RateWorkspace* ws_out) {
    RateWorkspace ws;
    ws.k = p.order_k;
    ws.A = displaced_matrix_elements(a, p.order_k, n_trunc);
    recurrence_coefficients(p, a, n_trunc, ws);
    std::vector<cd> d10(ws.c10_n0.begin(), ws.c10_n0.end() - 1);
    std::vector<cd> d01(ws.c01_0m.begin(), ws.c01_0m.end() - 1);
    ws.x_g = solve_recurrence(ws.A.A_n0, ws.c00_n0, d10);
    ws.x_h = solve_recurrence(ws.A.A_0m, ws.c00_0m, d01);
    const double g2 = std::norm(p.g_eff);
    cd sg{0.0, 0.0}, sh{0.0, 0.0};
    for (Index n = 0; n <= n_trunc; ++n) {
        sg += std::conj(ws.A.A_n0[n]) * ws.x_g[n];
        sh += std::conj(ws.A.A_0m[n]) * ws.x_h[n];
    }
    RatePair out{-2.0 * g2 * sg.real(), -2.0 * g2 * sh.real()};
    if (ws_out) *ws_out = std::move(ws);
    return out;
}

} // namespace rate_detail

inline RateResult transition_rates(const ReducedParams& p, Index n_trunc = 0,
                                   RateWorkspace* ws_out = nullptr) {
    if (std::abs(p.g_eff) == 0.0)
        throw DegenerateSteadyState(
            "transition_rates: g_eff = 0 gives gamma_g = gamma_h = 0; steady state undefined");
    const ConditionalAmplitudes a = conditional_amplitudes(p);
    const bool user_fixed = n_trunc > 0;
    Index nt = user_fixed ? n_trunc : default_rate_truncation(a);

    for (int attempt = 0;; ++attempt) {
        const auto r0 = rate_detail::rates_at_truncation(p, a, nt, ws_out);
        const auto r1 = rate_detail::rates_at_truncation(p, a, nt + 10, nullptr);
        const double scale = std::max({std::abs(r1.gamma_g), std::abs(r1.gamma_h), 1e-300});
        const double change = std::max(std::abs(r1.gamma_g - r0.gamma_g),
                                       std::abs(r1.gamma_h - r0.gamma_h)) / scale;
        const bool converged = change < 1e-3;
        const bool positive = r0.gamma_g >= 0.0 && r0.gamma_h >= 0.0 &&
                              (r0.gamma_g + r0.gamma_h) > 0.0;
        if (converged && positive) {
            RateResult res;
            res.gamma_g = r0.gamma_g;
            res.gamma_h = r0.gamma_h;
            res.gamma = r0.gamma_g + r0.gamma_h;
            res.Pg_ss = r0.gamma_h / res.gamma;
            res.Ph_ss = r0.gamma_g / res.gamma;
            res.n_trunc_used = nt;
            const double amax2 = std::max({1.0, std::norm(a.alpha_g), std::norm(a.alpha_h)});
            res.bad_cavity_ratio = p.kappa / (std::abs(p.g_eff) * amax2);
            res.bad_cavity_ok = res.bad_cavity_ratio >= 5.0;
            return res;
        }
        if (user_fixed || attempt >= 6) {
            if (!positive)
                throw NumericalError("transition_rates: negative rate (series artifact); "
                                     "increase n_trunc beyond " + std::to_string(nt));
            throw NumericalError("transition_rates: series not converged at n_trunc = " +
                                 std::to_string(nt) + "; increase n_trunc");
        }
        nt = nt + nt / 2;
    }
}

enum class DressedInitial { G, H };

// P(t) from the closed-form single-exponential relaxation toward the steady state.
inline std::pair<double, double> population_estimate(const RateResult& r, double t_ns,
                                                     DressedInitial initial) {
    const double pg0 = (initial == DressedInitial::G) ? 1.0 : 0.0;
    const double pg = r.Pg_ss + (pg0 - r.Pg_ss) * std::exp(-r.gamma * t_ns);
    return {pg, 1.0 - pg};
}

// ---------------------------- relaxation fitting ------------------------------

struct RelaxationFit {
    double gamma = 0.0;   // 1/ns
    double P_ss = 0.0;
    double C = 0.0;
    double rms_residual = 0.0;
    bool decaying = false;     // false flags gamma <= 0 or a constant series
    bool window_short = false; // fitted window shorter than ~3 decay constants
};

// Least squares of P(t) = P_ss + C exp(-gamma t) on samples with t > t_min.
// Initialized from the log-linearized tail, refined by damped Gauss-Newton.
inline RelaxationFit fit_relaxation(const std::vector<double>& t_ns,
                                    const std::vector<double>& population, double t_min_ns) {
    if (t_ns.size() != population.size() || t_ns.size() < 4)
        throw std::invalid_argument("fit_relaxation: need matching series with >= 4 samples");
    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < t_ns.size(); ++i)
        if (t_ns[i] > t_min_ns) {
            ts.push_back(t_ns[i]);
            ys.push_back(population[i]);
        }
    RelaxationFit fit;
    if (ts.size() < 4)
        throw std::invalid_argument("fit_relaxation: fewer than 4 samples past t_min");

    const double ymin = *std::min_element(ys.begin(), ys.end());
    const double ymax = *std::max_element(ys.begin(), ys.end());
    if (ymax - ymin < 1e-12) {  // constant series: C = 0, gamma indeterminate
        fit.P_ss = ys.back();
        fit.C = 0.0;
        fit.gamma = 0.0;
        fit.decaying = false;
        return fit;
    }

    // Three-point initializer: with y = P_ss + C e^{-g t} sampled at t_a,
    // t_a + D, t_a + 2D the successive differences satisfy S2/S1 = e^{-g D},
    // which is exact on clean data.  Falls back to a crude guess otherwise.
    double P = ys.back(), C = ys.front() - ys.back(), G = 0.0;
    {
        const std::size_t n = ts.size();
        const std::size_t ia = 0, ib = n / 3, ic = 2 * (n / 3);
        const double S1 = ys[ib] - ys[ia], S2 = ys[ic] - ys[ib];
        const double D = ts[ib] - ts[ia];
        if (std::abs(S1) > 0 && S2 * S1 > 0 && std::abs(S2) < std::abs(S1) && D > 0 &&
            std::abs(ts[ic] - ts[ib] - D) < 0.05 * D) {
            const double q = S2 / S1;
            G = -std::log(q) / D;
            const double A = S1 / (q - 1.0);  // C e^{-G t_a}
            P = ys[ia] - A;
            C = A * std::exp(G * ts[ia]);
        }
        if (!(G > 0.0) || !std::isfinite(G) || !std::isfinite(C) || !std::isfinite(P)) {
            G = 2.0 / std::max(1.0, ts.back() - ts.front());
            P = ys.back();
            C = (ys.front() - ys.back()) * std::exp(G * ts.front());
        }
    }

    auto cost = [&](double p_, double c_, double g_) {
        double s = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double r = p_ + c_ * std::exp(-g_ * ts[i]) - ys[i];
            s += r * r;
        }
        return s;
    };
    double best = cost(P, C, G);
    for (int iter = 0; iter < 200; ++iter) {
        Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
        Eigen::Vector3d Jtr = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double e = std::exp(-G * ts[i]);
            const double r = P + C * e - ys[i];
            Eigen::Vector3d J(1.0, e, -C * ts[i] * e);
            JtJ += J * J.transpose();
            Jtr += J * r;
        }
        double lambda = 1e-12 * JtJ.trace();
        bool improved = false;
        for (int ls = 0; ls < 12; ++ls) {
            Eigen::Matrix3d A = JtJ + lambda * Eigen::Matrix3d::Identity();
            const Eigen::Vector3d step = A.ldlt().solve(Jtr);
            const double Pn = P - step(0), Cn = C - step(1), Gn = G - step(2);
            const double cn = cost(Pn, Cn, Gn);
            if (std::isfinite(cn) && cn < best) {
                const double rel_step = std::abs(step(2)) / std::max(1e-300, std::abs(G));
                P = Pn; C = Cn; G = Gn;
                best = cn;
                improved = rel_step > 1e-12;
                break;
            }
            lambda = std::max(lambda * 10.0, 1e-10 * JtJ.trace());
        }
        if (!improved) break;
    }

    fit.gamma = G;
    fit.P_ss = P;
    fit.C = C;
    fit.rms_residual = std::sqrt(best / ts.size());
    fit.decaying = G > 0.0 && std::isfinite(G);
    fit.window_short = fit.decaying && (ts.back() - t_min_ns) * G < 3.0;
    return fit;
}

} // namespace mist
