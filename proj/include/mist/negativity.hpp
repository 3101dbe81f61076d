// negativity.hpp — entanglement negativity of bipartite density matrices via
// the partial transpose.

#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "mist/operators.hpp"

namespace mist {

// Transpose the indices of one subsystem (0 or 1) of a bipartite operator.
inline Matrix partial_transpose(const Matrix& rho, const std::vector<Index>& dims,
                                int subsystem) {
    if (dims.size() != 2)
        throw std::invalid_argument("partial_transpose: expected bipartite dims");
    if (subsystem != 0 && subsystem != 1)
        throw std::invalid_argument("partial_transpose: subsystem must be 0 or 1");
    const Index da = dims[0], db = dims[1];
    if (rho.rows() != da * db || rho.cols() != da * db)
        throw std::invalid_argument("partial_transpose: dimension mismatch");
    Matrix out(da * db, da * db);
    for (Index i = 0; i < da; ++i)
        for (Index j = 0; j < da; ++j)
            for (Index k = 0; k < db; ++k)
                for (Index l = 0; l < db; ++l) {
                    if (subsystem == 0)
                        out(j * db + k, i * db + l) = rho(i * db + k, j * db + l);
                    else
                        out(i * db + l, j * db + k) = rho(i * db + k, j * db + l);
                }
    return out;
}

inline LabeledOperator partial_transpose(const DensityMatrix& rho, int subsystem) {
    return LabeledOperator(partial_transpose(rho.matrix, rho.dims, subsystem),
                           rho.dims, rho.basis);
}

struct NegativityResult {
    double trace_norm = 1.0;      // ||rho^{T_A}||_1
    double negativity = 0.0;      // sum of |negative eigenvalues|
    double log_negativity = 0.0;  // log2(trace_norm)
};

// Eigenvalues of the partial transpose over the first (qubit) subsystem.
inline NegativityResult negativity(const Matrix& rho, const std::vector<Index>& dims) {
    Matrix pt = partial_transpose(rho, dims, 0);
    pt = 0.5 * (pt + pt.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(pt, Eigen::EigenvaluesOnly);
    NegativityResult res;
    double neg = 0.0, abs_sum = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()(i);
        abs_sum += std::abs(lam);
        if (lam < 0.0) neg += -lam;
    }
    res.negativity = neg;
    res.trace_norm = abs_sum;
    res.log_negativity = std::log2(std::max(abs_sum, 1e-300));
    return res;
}

inline NegativityResult negativity(const DensityMatrix& rho) {
    return negativity(rho.matrix, rho.dims);
}

} // namespace mist
