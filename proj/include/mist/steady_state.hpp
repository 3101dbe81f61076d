// steady_state.hpp — steady states of Lindblad generators via a sparse
// vectorized Liouvillian (column-major vec convention: vec(A X B) = (B^T ⊗ A) vec X).
//
// The singular system L rho = 0, tr rho = 1 is solved by replacing one
// equation row with the trace functional.  Uniqueness is probed by repeating
// the solve with a different replaced row: a null space of dimension > 1
// leaves the system rank-deficient, which shows up either as a solver failure
// or as two inconsistent solutions.

#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <string>
#include <vector>

#include "mist/errors.hpp"
#include "mist/lindblad.hpp"
#include "mist/operators.hpp"

namespace mist {

inline SparseMatrix sparse_identity(Index d) {
    SparseMatrix I(d, d);
    I.setIdentity();
    return I;
}

inline SparseMatrix build_liouvillian(const SparseMatrix& H,
                                      const std::vector<CollapseOp>& collapse) {
    const Index d = H.rows();
    const SparseMatrix I = sparse_identity(d);
    SparseMatrix HT = H.transpose();
    SparseMatrix L = -im_unit * (kron_sparse(I, H) - kron_sparse(HT, I));
    for (const auto& c : collapse) {
        const SparseMatrix Lop = to_sparse(c.op, 1e-300);
        const SparseMatrix Lconj = Lop.conjugate();
        SparseMatrix LdL = to_sparse(Matrix(c.op.adjoint() * c.op), 1e-300);
        SparseMatrix LdLT = LdL.transpose();
        L += c.rate * SparseMatrix(kron_sparse(Lconj, Lop)
                                   - 0.5 * kron_sparse(SparseMatrix(I), LdL)
                                   - 0.5 * kron_sparse(LdLT, I));
    }
    L.makeCompressed();
    return L;
}

namespace detail {

// Solve L x = 0 with row `replaced_row` swapped for the trace functional.
inline Vector solve_with_trace_row(const SparseMatrix& L, Index d, Index replaced_row) {
    const Index n = L.rows();
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(static_cast<std::size_t>(L.nonZeros()) + static_cast<std::size_t>(d));
    for (int k = 0; k < L.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(L, k); it; ++it)
            if (it.row() != replaced_row) trip.emplace_back(it.row(), it.col(), it.value());
    for (Index j = 0; j < d; ++j) trip.emplace_back(replaced_row, j * (d + 1), cd(1.0, 0.0));
    SparseMatrix A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success)
        throw DegenerateSteadyState("steady_state: sparse LU factorization failed "
                                    "(singular Liouvillian after trace substitution)");
    Vector b = Vector::Zero(n);
    b(replaced_row) = 1.0;
    Vector x = lu.solve(b);
    if (lu.info() != Eigen::Success)
        throw NumericalError("steady_state: sparse LU solve failed");
    return x;
}

} // namespace detail

struct SteadyStateOptions {
    Index dim_cap = 512;           // refuse larger Hilbert spaces
    double residual_factor = 1e-10;  // ||L rho|| <= factor * ||L||_F
    double uniqueness_tol = 1e-6;  // max-abs mismatch between the two probe solves
};

inline Matrix steady_state(const SparseMatrix& H, const std::vector<CollapseOp>& collapse,
                           const SteadyStateOptions& opt = {}) {
    const Index d = H.rows();
    if (d > opt.dim_cap)
        throw std::invalid_argument("steady_state: dimension " + std::to_string(d) +
                                    " exceeds cap " + std::to_string(opt.dim_cap));
    const SparseMatrix L = build_liouvillian(H, collapse);

    const Vector x1 = detail::solve_with_trace_row(L, d, 0);
    const Vector x2 = detail::solve_with_trace_row(L, d, L.rows() - 1);
    const double mismatch = (x1 - x2).cwiseAbs().maxCoeff();
    if (!std::isfinite(mismatch) || mismatch > opt.uniqueness_tol)
        throw DegenerateSteadyState(
            "steady_state: null space dimension > 1 (probe solutions differ by " +
            std::to_string(mismatch) + ")");

    const double residual = (L * x1).norm();
    const double scale = L.norm();  // Frobenius
    if (residual > opt.residual_factor * scale)
        throw NumericalError("steady_state: residual " + std::to_string(residual) +
                             " exceeds tolerance " + std::to_string(opt.residual_factor * scale));

    Matrix rho = Eigen::Map<const Matrix>(x1.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();
    return rho;
}

inline DensityMatrix steady_state(const LabeledOperator& H,
                                  const std::vector<std::pair<double, LabeledOperator>>& collapse,
                                  const SteadyStateOptions& opt = {}) {
    std::vector<CollapseOp> ops;
    for (const auto& [rate, L] : collapse) {
        require_compatible(H, L, "steady_state");
        ops.push_back({rate, L.matrix});
    }
    Matrix rho = steady_state(to_sparse(H.matrix, 1e-300), ops, opt);
    return DensityMatrix(std::move(rho), H.dims, H.basis);
}

} // namespace mist
