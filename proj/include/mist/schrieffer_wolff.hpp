// schrieffer_wolff.hpp — recursive Schrieffer–Wolff reduction of the coupled
// qubit–resonator Hamiltonian: first-order generator, second-order effective
// parameters (dispersive shifts, level shifts, two-photon coupling), the
// third-order three-photon coupling, rotating-wave validity margins, and the
// dressed <-> bare frame maps.
//
// Index convention throughout: w(i, j) = omega_j - omega_i.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mist/errors.hpp"
#include "mist/fluxonium.hpp"
#include "mist/operators.hpp"
#include "mist/units.hpp"

namespace mist {

// Generator / interaction components in normal-ordered form: the (p, n, m)
// entry is the qubit-space coefficient of (a^dag)^n a^m at order g^p.
struct SWExpansion {
    int order = 0;
    std::map<std::tuple<int, int, int>, Matrix> generator_components;    // S^(p)_nm
    std::map<std::tuple<int, int, int>, Matrix> interaction_components;  // V^(p)_nm
    Index level_count = 0;

    const Matrix& generator(int p, int n, int m) const {
        auto it = generator_components.find({p, n, m});
        if (it == generator_components.end())
            throw std::invalid_argument("SWExpansion: missing generator component");
        return it->second;
    }
    const Matrix& interaction(int p, int n, int m) const {
        auto it = interaction_components.find({p, n, m});
        if (it == interaction_components.end())
            throw std::invalid_argument("SWExpansion: missing interaction component");
        return it->second;
    }
};

// All effective-model constants of the reduced description, angular rad/ns.
struct ReducedParams {
    double delta_a = 0.0;   // omega_r - omega_d
    double delta_g = 0.0;   // omega_g + Lambda_g
    double delta_h = 0.0;   // omega_h + Lambda_h - k * omega_d
    double delta_q = 0.0;   // delta_h - delta_g
    double chi_g = 0.0;
    double chi_h = 0.0;
    double lambda_g = 0.0;
    double lambda_h = 0.0;
    cd g_eff{0.0, 0.0};     // k-photon coupling <g| V^(k)_{k0} |h>
    int order_k = 2;
    double kappa = 0.0;     // photon loss rate (1/ns)
    double epsilon_d = 0.0; // drive amplitude (rad/ns)

    // frame bookkeeping (not part of the constant set, needed by frame maps / scans)
    double omega_r = 0.0;
    double omega_d = 0.0;
    double omega_g = 0.0;
    double omega_h = 0.0;
    Index g_level = 0;
    Index h_level = 0;

    double chi_check_g() const { return chi_g + delta_a; }
    double chi_check_h() const { return chi_h + delta_a; }

    void validate() const {
        const double scale = std::max({1.0, std::abs(delta_h), std::abs(delta_g)});
        if (std::abs(delta_a - (omega_r - omega_d)) > 1e-9 * scale)
            throw std::invalid_argument("ReducedParams: delta_a != omega_r - omega_d");
        if (std::abs(delta_g - (omega_g + lambda_g)) > 1e-9 * scale)
            throw std::invalid_argument("ReducedParams: delta_g != omega_g + Lambda_g");
        if (std::abs(delta_h - (omega_h + lambda_h - order_k * omega_d)) > 1e-9 * scale)
            throw std::invalid_argument("ReducedParams: delta_h != omega_h + Lambda_h - k*omega_d");
        if (std::abs(delta_q - (delta_h - delta_g)) > 1e-9 * scale)
            throw std::invalid_argument("ReducedParams: delta_q != delta_h - delta_g");
        if (kappa < 0.0) throw std::invalid_argument("ReducedParams: kappa < 0");
        if (order_k < 2) throw std::invalid_argument("ReducedParams: order_k < 2");
    }

    // Same SW constants, different drive point (epsilon_d, delta_a).  Varying
    // delta_a moves omega_d, which enters delta_h through the rotating frame.
    ReducedParams with_drive(double new_epsilon_d, double new_delta_a) const {
        ReducedParams p = *this;
        p.epsilon_d = new_epsilon_d;
        p.delta_a = new_delta_a;
        p.omega_d = p.omega_r - new_delta_a;
        p.delta_h = p.omega_h + p.lambda_h - p.order_k * p.omega_d;
        p.delta_q = p.delta_h - p.delta_g;
        p.validate();
        return p;
    }
};

namespace sw_detail {

inline double wij(const QubitSpectrum& s, Index i, Index j) {
    return s.omega(j) - s.omega(i);
}

inline void check_dispersive_condition(const QubitSpectrum& s, double g, double omega_r,
                                       double max_ratio) {
    for (Index i = 0; i < s.level_count; ++i)
        for (Index j = 0; j < s.level_count; ++j) {
            const double num = std::abs(g * s.n_matrix(i, j));
            const double den = std::abs(wij(s, i, j) - omega_r);
            if (num >= max_ratio * den)
                throw NumericalError(
                    "first_order_generator: near-resonant single-photon pair (i=" +
                    std::to_string(i) + ", j=" + std::to_string(j) + "): |g n_ij| = " +
                    std::to_string(num) + " vs " + std::to_string(max_ratio) +
                    "*|omega_ij - omega_r| = " + std::to_string(max_ratio * den));
        }
}

} // namespace sw_detail

// <i| S^(1)_{10} |j> = -i g n_ij / (omega_ij - omega_r); S^(1)_{01} = -(S^(1)_{10})^dag,
// which both satisfies the anti-Hermiticity constraint on the expansion and
// solves [S^(1), H_0] = -(V^(1))_od exactly.
inline SWExpansion first_order_generator(const QubitSpectrum& spectrum, double g,
                                         double omega_r, double max_ratio = 0.1) {
    sw_detail::check_dispersive_condition(spectrum, g, omega_r, max_ratio);
    const Index L = spectrum.level_count;
    Matrix s10(L, L), v10(L, L);
    for (Index i = 0; i < L; ++i)
        for (Index j = 0; j < L; ++j) {
            s10(i, j) = -im_unit * g * spectrum.n_matrix(i, j) /
                        (sw_detail::wij(spectrum, i, j) - omega_r);
            v10(i, j) = im_unit * g * spectrum.n_matrix(i, j);
        }
    SWExpansion sw;
    sw.order = 1;
    sw.level_count = L;
    sw.generator_components[{1, 1, 0}] = s10;
    sw.generator_components[{1, 0, 1}] = -s10.adjoint();
    sw.interaction_components[{1, 1, 0}] = v10;
    sw.interaction_components[{1, 0, 1}] = -v10;
    return sw;
}

// Second-order interaction components from the explicit intermediate-state sums.
inline Matrix sw_v2_11(const QubitSpectrum& s, double g, double omega_r) {
    const Index L = s.level_count;
    Matrix out = Matrix::Zero(L, L);
    for (Index i = 0; i < L; ++i)
        for (Index j = 0; j < L; ++j)
            for (Index k = 0; k < L; ++k) {
                const double wki = sw_detail::wij(s, k, i);
                const double wkj = sw_detail::wij(s, k, j);
                out(i, j) += g * g * s.n_matrix(i, k) * s.n_matrix(k, j) *
                             (wki / (wki * wki - omega_r * omega_r) +
                              wkj / (wkj * wkj - omega_r * omega_r));
            }
    return out;
}

inline Matrix sw_v2_00(const QubitSpectrum& s, double g, double omega_r) {
    const Index L = s.level_count;
    Matrix out = Matrix::Zero(L, L);
    for (Index i = 0; i < L; ++i)
        for (Index j = 0; j < L; ++j)
            for (Index k = 0; k < L; ++k) {
                const double wki = sw_detail::wij(s, k, i);
                const double wkj = sw_detail::wij(s, k, j);
                out(i, j) += 0.5 * g * g * s.n_matrix(i, k) * s.n_matrix(k, j) *
                             (1.0 / (wki - omega_r) + 1.0 / (wkj - omega_r));
            }
    return out;
}

inline Matrix sw_v2_20(const QubitSpectrum& s, double g, double omega_r) {
    const Index L = s.level_count;
    Matrix out = Matrix::Zero(L, L);
    for (Index i = 0; i < L; ++i)
        for (Index j = 0; j < L; ++j)
            for (Index k = 0; k < L; ++k) {
                const double wik = sw_detail::wij(s, i, k);
                const double wkj = sw_detail::wij(s, k, j);
                out(i, j) += 0.5 * g * g * s.n_matrix(i, k) * s.n_matrix(k, j) *
                             (1.0 / (wik - omega_r) - 1.0 / (wkj - omega_r));
            }
    return out;
}

inline SWExpansion second_order_expansion(const QubitSpectrum& spectrum, double g,
                                          double omega_r, double max_ratio = 0.1) {
    SWExpansion sw = first_order_generator(spectrum, g, omega_r, max_ratio);
    sw.order = 2;
    sw.interaction_components[{2, 1, 1}] = sw_v2_11(spectrum, g, omega_r);
    sw.interaction_components[{2, 0, 0}] = sw_v2_00(spectrum, g, omega_r);
    Matrix v20 = sw_v2_20(spectrum, g, omega_r);
    sw.interaction_components[{2, 0, 2}] = v20.adjoint();
    sw.interaction_components[{2, 2, 0}] = std::move(v20);
    return sw;
}

inline ReducedParams second_order_params(const QubitSpectrum& spectrum, double g,
                                         double omega_r, double omega_d, double epsilon_d,
                                         double kappa, Index g_level, Index h_level,
                                         double max_ratio = 0.1) {
    if (g_level < 0 || h_level < 0 || g_level >= spectrum.level_count ||
        h_level >= spectrum.level_count || g_level == h_level)
        throw std::invalid_argument("second_order_params: bad (g, h) level indices");
    const SWExpansion sw = second_order_expansion(spectrum, g, omega_r, max_ratio);
    const Matrix& v11 = sw.interaction(2, 1, 1);
    const Matrix& v00 = sw.interaction(2, 0, 0);
    const Matrix& v20 = sw.interaction(2, 2, 0);

    ReducedParams p;
    p.order_k = 2;
    p.omega_r = omega_r;
    p.omega_d = omega_d;
    p.omega_g = spectrum.omega(g_level);
    p.omega_h = spectrum.omega(h_level);
    p.g_level = g_level;
    p.h_level = h_level;
    p.chi_g = v11(g_level, g_level).real();
    p.chi_h = v11(h_level, h_level).real();
    p.lambda_g = v00(g_level, g_level).real();
    p.lambda_h = v00(h_level, h_level).real();
    p.g_eff = v20(g_level, h_level);
    p.kappa = kappa;
    p.epsilon_d = epsilon_d;
    p.delta_a = omega_r - omega_d;
    p.delta_g = p.omega_g + p.lambda_g;
    p.delta_h = p.omega_h + p.lambda_h - 2.0 * omega_d;
    p.delta_q = p.delta_h - p.delta_g;
    p.validate();
    return p;
}

// <i| V^(3)_{30} |j>: the double sum over intermediate states (k, l).
inline cd third_order_element(const QubitSpectrum& s, double g, double omega_r,
                              Index i, Index j) {
    const Index L = s.level_count;
    auto w = [&](Index a, Index b) { return sw_detail::wij(s, a, b); };
    cd sum{0.0, 0.0};
    for (Index k = 0; k < L; ++k)
        for (Index l = 0; l < L; ++l) {
            const cd chain = s.n_matrix(i, l) * s.n_matrix(l, k) * s.n_matrix(k, j);
            if (chain == cd(0.0, 0.0)) continue;
            const double d_ki2 = w(k, i) - 2.0 * omega_r;
            const double d_lj2 = w(l, j) - 2.0 * omega_r;
            const double d_kj = w(k, j) - omega_r;
            const double d_il = w(i, l) - omega_r;
            const double d_lk = w(l, k) - omega_r;
            for (double den : {d_ki2, d_lj2, d_kj, d_il, d_lk})
                if (std::abs(den) < 1e-12)
                    throw NumericalError(
                        "third_order_coupling: vanishing denominator for intermediate triple "
                        "(i,l,k,j)=(" + std::to_string(i) + "," + std::to_string(l) + "," +
                        std::to_string(k) + "," + std::to_string(j) + ")");
            sum += im_unit * g * g * g * chain *
                   (-(0.5 / d_ki2 + (1.0 / 6.0) / d_kj) * (1.0 / d_il - 1.0 / d_kj) +
                    (0.5 / d_lj2 + (1.0 / 6.0) / d_il) * (1.0 / d_lk - 1.0 / d_kj));
        }
    return sum;
}

// Two-photon detuning guard for the three-photon reduction: no pair may sit
// near a two-photon resonance, otherwise the k=3 channel is not the leading one.
inline void check_two_photon_clearance(const QubitSpectrum& s, double g, double omega_r,
                                       double max_ratio) {
    for (Index i = 0; i < s.level_count; ++i)
        for (Index j = 0; j < s.level_count; ++j) {
            const double det = std::abs(sw_detail::wij(s, i, j) - 2.0 * omega_r);
            if (det < max_ratio * omega_r && std::abs(s.n_matrix(i, j)) > 0)
                throw NumericalError("third_order_coupling: lower-order (two-photon) resonance "
                                     "between levels " + std::to_string(i) + " and " +
                                     std::to_string(j));
        }
}

inline cd third_order_coupling(const QubitSpectrum& spectrum, double g, double omega_r,
                               Index g_level, Index j_level, double max_ratio = 0.1) {
    sw_detail::check_dispersive_condition(spectrum, g, omega_r, max_ratio);
    check_two_photon_clearance(spectrum, g, omega_r, 0.02);
    return third_order_element(spectrum, g, omega_r, g_level, j_level);
}

inline ReducedParams third_order_params(const QubitSpectrum& spectrum, double g,
                                        double omega_r, double omega_d, double epsilon_d,
                                        double kappa, Index g_level, Index j_level,
                                        double max_ratio = 0.1) {
    ReducedParams p = second_order_params(spectrum, g, omega_r, omega_d, epsilon_d, kappa,
                                          g_level, j_level, max_ratio);
    p.order_k = 3;
    p.g_eff = third_order_coupling(spectrum, g, omega_r, g_level, j_level, max_ratio);
    p.delta_h = p.omega_h + p.lambda_h - 3.0 * omega_d;
    p.delta_q = p.delta_h - p.delta_g;
    p.validate();
    return p;
}

// ------------------------- RWA validity margins ------------------------------

struct RwaEntry {
    Index i = 0, j = 0;
    double r1 = 0.0;  // |g n_ij| / |omega_ij - omega_r|
    double r2 = 0.0;  // |eps_d g n_ij| / |(omega_ij - omega_r)(omega_ij ± omega_d)|, worst sign
    double r3 = 0.0;  // |kappa g n_ij| / (omega_ij - omega_r)^2
    bool flagged = false;
};

struct RwaReport {
    std::vector<RwaEntry> entries;
    double max_r1 = 0.0, max_r2 = 0.0, max_r3 = 0.0;
    double threshold = 0.1;
    bool any_flagged = false;
};

inline RwaReport rwa_validity_report(const QubitSpectrum& spectrum, double g, double omega_r,
                                     double omega_d, double epsilon_d, double kappa,
                                     double threshold = 0.1) {
    RwaReport rep;
    rep.threshold = threshold;
    for (Index i = 0; i < spectrum.level_count; ++i)
        for (Index j = 0; j < spectrum.level_count; ++j) {
            if (i == j && std::abs(spectrum.n_matrix(i, j)) < 1e-15) continue;
            const double wij_ = sw_detail::wij(spectrum, i, j);
            const double gn = std::abs(g * spectrum.n_matrix(i, j));
            const double d1 = std::abs(wij_ - omega_r);
            RwaEntry e;
            e.i = i;
            e.j = j;
            e.r1 = gn / d1;
            const double dp = std::abs((wij_ - omega_r) * (wij_ + omega_d));
            const double dm = std::abs((wij_ - omega_r) * (wij_ - omega_d));
            e.r2 = std::abs(epsilon_d) * gn / std::min(dp, dm);
            e.r3 = kappa * gn / (d1 * d1);
            e.flagged = e.r1 > threshold || e.r2 > threshold || e.r3 > threshold;
            rep.max_r1 = std::max(rep.max_r1, e.r1);
            rep.max_r2 = std::max(rep.max_r2, e.r2);
            rep.max_r3 = std::max(rep.max_r3, e.r3);
            rep.any_flagged = rep.any_flagged || e.flagged;
            rep.entries.push_back(e);
        }
    return rep;
}

// ------------------------ dressed <-> bare frame maps ------------------------

// S^(1) assembled on the joint space [levels, n_max+1]: S10 ⊗ a^dag + S01 ⊗ a.
inline Matrix assemble_joint_generator(const SWExpansion& sw, Index photon_dim) {
    const Matrix& s10 = sw.generator(1, 1, 0);
    const Matrix& s01 = sw.generator(1, 0, 1);
    return kron(s10, create(photon_dim)) + kron(s01, destroy(photon_dim));
}

// Unitary e^{S} for anti-Hermitian S, via the eigendecomposition of iS.
inline Matrix exp_antihermitian(const Matrix& S) {
    const Matrix iS = im_unit * S;
    Eigen::SelfAdjointEigenSolver<Matrix> es(iS);
    if (es.info() != Eigen::Success)
        throw NumericalError("exp_antihermitian: eigendecomposition failed");
    Vector phases(S.rows());
    for (Index k = 0; k < S.rows(); ++k)
        phases(k) = std::exp(-im_unit * es.eigenvalues()(k));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

struct LabFrameMap {
    Matrix exp_minus_S;  // e^{-S}: dressed -> bare
    std::vector<Index> dims;

    StateVector to_bare(const StateVector& dressed) const {
        if (dressed.dims != dims)
            throw std::invalid_argument("LabFrameMap: dims mismatch");
        Vector v = exp_minus_S * dressed.amplitudes;
        const double n = v.norm();
        v /= n;
        StateVector out(std::move(v), dims, Basis::BareLab);
        return out;
    }

    Matrix to_bare(const Matrix& rho_dressed) const {
        return exp_minus_S * rho_dressed * exp_minus_S.adjoint();
    }
};

inline LabFrameMap make_lab_frame_map(const SWExpansion& sw, Index photon_dim) {
    LabFrameMap map;
    map.exp_minus_S = exp_antihermitian(Matrix(-assemble_joint_generator(sw, photon_dim)));
    map.dims = {sw.level_count, photon_dim};
    return map;
}

inline StateVector lab_frame_state(const SWExpansion& sw, const StateVector& dressed) {
    if (dressed.dims.size() != 2 || dressed.dims[0] != sw.level_count)
        throw std::invalid_argument("lab_frame_state: dims mismatch with generator");
    return make_lab_frame_map(sw, dressed.dims[1]).to_bare(dressed);
}

} // namespace mist
