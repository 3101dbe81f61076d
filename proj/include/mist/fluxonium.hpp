// fluxonium.hpp — fluxonium circuit Hamiltonian in a harmonic-oscillator basis,
// its diagonalization, and derived spectral quantities (charge matrix elements,
// dispersive limit, multi-photon resonance search).
//
// Circuit energies are specified as ordinary frequencies (GHz, i.e. E/h); all
// derived spectra are angular (rad/ns).  The oscillator basis diagonalizes the
// quadratic part: phi = phi_zpf (b + b^dag), n = i n_zpf (b^dag - b), with
// phi_zpf = (2 E_C / E_L)^{1/4}, n_zpf = (E_L / 32 E_C)^{1/4} so [phi, n] = i.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "mist/errors.hpp"
#include "mist/operators.hpp"
#include "mist/units.hpp"

namespace mist {

struct FluxoniumSpec {
    double E_C_GHz = 0.0;     // charging energy, E_C / h
    double E_L_GHz = 0.0;     // inductive energy, E_L / h
    double E_J_GHz = 0.0;     // Josephson energy, E_J / h
    double phi_ext = 0.0;     // external flux, 2*pi*Phi_ext/Phi_0 (radians)
    Index ho_truncation = 120;

    void validate() const {
        if (!(std::isfinite(E_C_GHz) && std::isfinite(E_L_GHz) && std::isfinite(E_J_GHz) &&
              std::isfinite(phi_ext)))
            throw std::invalid_argument("FluxoniumSpec: non-finite parameter");
        if (E_C_GHz <= 0.0 || E_L_GHz <= 0.0 || E_J_GHz < 0.0)
            throw std::invalid_argument("FluxoniumSpec: requires E_C > 0, E_L > 0, E_J >= 0");
        if (ho_truncation < 20)
            throw std::invalid_argument(
                "FluxoniumSpec: ho_truncation below 20 is rejected as unconverged");
    }
};

struct QubitSpectrum {
    Eigen::VectorXd omega;   // eigenfrequencies, rad/ns, shifted so omega(0) = 0
    Matrix n_matrix;         // <i| n |j> in the eigenbasis
    Index level_count = 0;
};

struct DispersiveLimit {
    double omega_q = 0.0;        // omega_1 - omega_0
    double delta = 0.0;          // omega_q - omega_r
    double chi_two_level = 0.0;  // g^2 / delta
};

// phi and n in the oscillator basis (rad/ns energies enter only through zpf ratios)
inline Matrix fluxonium_phi_op(const FluxoniumSpec& spec) {
    const double phi_zpf = std::pow(2.0 * spec.E_C_GHz / spec.E_L_GHz, 0.25);
    const Index d = spec.ho_truncation;
    return phi_zpf * (destroy(d) + create(d));
}

inline Matrix fluxonium_n_op(const FluxoniumSpec& spec) {
    const double n_zpf = std::pow(spec.E_L_GHz / (32.0 * spec.E_C_GHz), 0.25);
    const Index d = spec.ho_truncation;
    return im_unit * n_zpf * (create(d) - destroy(d));
}

// 4 E_C n^2 + (1/2) E_L phi^2 - E_J cos(phi - phi_ext), in rad/ns.
// The cosine is evaluated exactly within the truncation as the Hermitian part
// of e^{i phi_ext} expm(-i phi), via the eigendecomposition of phi.
inline Matrix build_fluxonium_hamiltonian(const FluxoniumSpec& spec) {
    spec.validate();
    const double ec = ghz_to_rad(spec.E_C_GHz);
    const double el = ghz_to_rad(spec.E_L_GHz);
    const double ej = ghz_to_rad(spec.E_J_GHz);

    const Matrix phi = fluxonium_phi_op(spec);
    const Matrix n = fluxonium_n_op(spec);

    Eigen::SelfAdjointEigenSolver<Matrix> es(phi);
    if (es.info() != Eigen::Success)
        throw NumericalError("build_fluxonium_hamiltonian: phi eigendecomposition failed");
    Vector exp_phase(phi.rows());
    for (Index k = 0; k < phi.rows(); ++k)
        exp_phase(k) = std::exp(-im_unit * es.eigenvalues()(k));
    const Matrix M = es.eigenvectors() * exp_phase.asDiagonal() * es.eigenvectors().adjoint();
    const Matrix shifted = std::exp(im_unit * spec.phi_ext) * M;
    const Matrix cos_op = 0.5 * (shifted + shifted.adjoint());

    Matrix H = 4.0 * ec * (n * n) + 0.5 * el * (phi * phi) - ej * cos_op;
    H = 0.5 * (H + H.adjoint().eval());
    return H;
}

// Deterministic eigenvector phases: the largest-magnitude component of each
// column is rotated to be real positive, so charge matrix element signs are
// reproducible across runs.
inline void fix_eigenvector_phases(Matrix& vectors) {
    for (Index j = 0; j < vectors.cols(); ++j) {
        Index imax = 0;
        double best = -1.0;
        for (Index i = 0; i < vectors.rows(); ++i) {
            const double a = std::abs(vectors(i, j));
            if (a > best + 1e-15) {
                best = a;
                imax = i;
            }
        }
        const cd v = vectors(imax, j);
        if (std::abs(v) > 0) vectors.col(j) *= std::conj(v) / std::abs(v);
    }
}

inline QubitSpectrum diagonalize(const FluxoniumSpec& spec, Index level_count) {
    spec.validate();
    if (level_count < 2 || level_count > spec.ho_truncation / 4)
        throw std::invalid_argument(
            "diagonalize: level_count must be in [2, ho_truncation/4] to avoid truncation "
            "artifacts (got " + std::to_string(level_count) + ")");
    const Matrix H = build_fluxonium_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    if (es.info() != Eigen::Success)
        throw NumericalError("diagonalize: eigendecomposition failed");
    Matrix vectors = es.eigenvectors().leftCols(level_count);
    fix_eigenvector_phases(vectors);

    QubitSpectrum out;
    out.level_count = level_count;
    out.omega = es.eigenvalues().head(level_count).array() - es.eigenvalues()(0);
    out.n_matrix = vectors.adjoint() * fluxonium_n_op(spec) * vectors;
    out.n_matrix = 0.5 * (out.n_matrix + out.n_matrix.adjoint().eval());
    return out;
}

// Synthetic spectra (tests and reduced two-level cross-checks)
inline QubitSpectrum make_synthetic_spectrum(const Eigen::VectorXd& omega, const Matrix& n_matrix) {
    QubitSpectrum s;
    s.omega = omega;
    s.n_matrix = n_matrix;
    s.level_count = omega.size();
    return s;
}

inline DispersiveLimit dispersive_limit(const QubitSpectrum& spectrum, double g, double omega_r) {
    if (spectrum.level_count < 2)
        throw std::invalid_argument("dispersive_limit: need at least two levels");
    DispersiveLimit out;
    out.omega_q = spectrum.omega(1) - spectrum.omega(0);
    out.delta = out.omega_q - omega_r;
    if (out.delta == 0.0)
        throw NumericalError("dispersive_limit: zero detuning, chi undefined");
    out.chi_two_level = g * g / out.delta;
    return out;
}

struct ResonanceMatch {
    Index level = 0;       // j minimizing |omega_j - omega_0 - k*omega_r|
    double residual = 0.0; // omega_j - omega_0 - k*omega_r at the minimum
};

inline ResonanceMatch find_multiphoton_resonance(const QubitSpectrum& spectrum,
                                                 double omega_r, int k) {
    if (k < 2) throw std::invalid_argument("find_multiphoton_resonance: k must be >= 2");
    if (spectrum.level_count < k + 1)
        throw std::invalid_argument("find_multiphoton_resonance: spectrum needs >= k+1 levels");
    const double target = spectrum.omega(0) + k * omega_r;
    ResonanceMatch best;
    double best_abs = std::numeric_limits<double>::infinity();
    for (Index j = 1; j < spectrum.level_count; ++j) {
        const double r = spectrum.omega(j) - target;
        if (std::abs(r) < best_abs) {
            best_abs = std::abs(r);
            best.level = j;
            best.residual = r;
        }
    }
    return best;
}

} // namespace mist
