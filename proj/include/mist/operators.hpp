// operators.hpp — finite-dimensional operator algebra on labeled tensor-product
// spaces: ladder operators, Kronecker products, expectation values, partial
// trace, and the basis bookkeeping shared by every model in the library.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <string>
#include <vector>

#include "mist/errors.hpp"

namespace mist {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cd>;
using Index = Eigen::Index;

inline constexpr cd im_unit{0.0, 1.0};

// Frame/basis a state or operator is expressed in.  Mixing tags is an error:
// every algebraic operation on labeled quantities checks compatibility.
enum class Basis { BareLab, DressedRotating, ReducedRotating };

inline const char* basis_name(Basis b) {
    switch (b) {
        case Basis::BareLab: return "bare_lab";
        case Basis::DressedRotating: return "dressed_rotating";
        case Basis::ReducedRotating: return "reduced_rotating";
    }
    return "?";
}

inline Index dims_product(const std::vector<Index>& dims) {
    Index p = 1;
    for (Index d : dims) p *= d;
    return p;
}

// ----------------------------- labeled quantities ----------------------------

struct LabeledOperator {
    Matrix matrix;
    std::vector<Index> dims;   // subsystem dimensions, e.g. {qubit_levels, n_max+1}
    Basis basis = Basis::BareLab;

    LabeledOperator() = default;
    LabeledOperator(Matrix m, std::vector<Index> d, Basis b)
        : matrix(std::move(m)), dims(std::move(d)), basis(b) {
        if (matrix.rows() != matrix.cols() || matrix.rows() != dims_product(dims))
            throw std::invalid_argument("LabeledOperator: matrix size does not match dims");
    }

    Index dim() const { return matrix.rows(); }
};

inline void require_compatible(const LabeledOperator& a, const LabeledOperator& b,
                               const char* where) {
    if (a.dims != b.dims)
        throw std::invalid_argument(std::string(where) + ": subsystem dims mismatch");
    if (a.basis != b.basis)
        throw std::invalid_argument(std::string(where) + ": basis mismatch (" +
                                    basis_name(a.basis) + " vs " + basis_name(b.basis) + ")");
}

struct StateVector {
    Vector amplitudes;
    std::vector<Index> dims;
    Basis basis = Basis::BareLab;

    StateVector() = default;
    StateVector(Vector v, std::vector<Index> d, Basis b)
        : amplitudes(std::move(v)), dims(std::move(d)), basis(b) {
        if (amplitudes.size() != dims_product(dims))
            throw std::invalid_argument("StateVector: length does not match dims");
    }

    double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
    Matrix matrix;
    std::vector<Index> dims;
    Basis basis = Basis::BareLab;
    double trace = 0.0;  // cached at construction / after evolution steps

    DensityMatrix() = default;
    DensityMatrix(Matrix m, std::vector<Index> d, Basis b)
        : matrix(std::move(m)), dims(std::move(d)), basis(b) {
        if (matrix.rows() != matrix.cols() || matrix.rows() != dims_product(dims))
            throw std::invalid_argument("DensityMatrix: matrix size does not match dims");
        trace = matrix.trace().real();
    }

    Index dim() const { return matrix.rows(); }
};

inline DensityMatrix pure_state_density(const StateVector& psi) {
    return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint(), psi.dims, psi.basis);
}

// ------------------------------- free functions -------------------------------

template <typename Derived>
Matrix dag(const Eigen::MatrixBase<Derived>& a) { return a.adjoint(); }

inline Matrix identity(Index d) { return Matrix::Identity(d, d); }

// bosonic annihilation operator on a (n_max+1)-dimensional Fock space
inline Matrix destroy(Index dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Matrix create(Index dim) { return destroy(dim).adjoint(); }

inline Matrix number_op(Index dim) {
    Matrix n = Matrix::Zero(dim, dim);
    for (Index k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

inline Vector fock_state(Index dim, Index n) {
    if (n < 0 || n >= dim) throw std::invalid_argument("fock_state: level out of range");
    Vector v = Vector::Zero(dim);
    v(n) = 1.0;
    return v;
}

inline Vector coherent_state(Index dim, cd alpha) {
    Vector v(dim);
    v(0) = std::exp(-0.5 * std::norm(alpha));
    for (Index n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    return v;  // truncated; norm deficit is the tail weight
}

// Kronecker product, row-major composite index (i_A * dim_B + i_B)
template <typename DA, typename DB>
Matrix kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<cd>> trip;
    trip.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib)
                    trip.emplace_back(ia.row() * b.rows() + ib.row(),
                                      ia.col() * b.cols() + ib.col(),
                                      ia.value() * ib.value());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

inline SparseMatrix to_sparse(const Matrix& m, double prune_tol = 0.0) {
    return m.sparseView(1.0, prune_tol);
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.cwiseAbs().maxCoeff();
}

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
    const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

// ------------------------------ expectation values ----------------------------

inline cd expectation(const DensityMatrix& rho, const LabeledOperator& obs) {
    require_compatible(LabeledOperator(obs.matrix, rho.dims, rho.basis), obs, "expectation");
    return (obs.matrix * rho.matrix).trace();
}

inline cd expectation(const StateVector& psi, const LabeledOperator& obs) {
    if (psi.dims != obs.dims)
        throw std::invalid_argument("expectation: subsystem dims mismatch");
    if (psi.basis != obs.basis)
        throw std::invalid_argument("expectation: basis mismatch");
    return psi.amplitudes.dot(obs.matrix * psi.amplitudes);
}

// raw-matrix overloads for inner loops
inline cd expectation(const Matrix& rho, const Matrix& obs) { return (obs * rho).trace(); }
inline cd expectation(const Vector& psi, const Matrix& obs) { return psi.dot(obs * psi); }

// -------------------------------- partial trace -------------------------------

// Trace out all subsystems except `keep` (0-based index into dims).
// Bipartite only, matching every use in this library.
inline Matrix partial_trace(const Matrix& rho, const std::vector<Index>& dims, int keep) {
    if (dims.size() != 2)
        throw std::invalid_argument("partial_trace: expected bipartite dims");
    if (keep != 0 && keep != 1)
        throw std::invalid_argument("partial_trace: keep must be 0 or 1");
    const Index da = dims[0], db = dims[1];
    if (rho.rows() != da * db || rho.cols() != da * db)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep == 0) {
        Matrix out = Matrix::Zero(da, da);
        for (Index i = 0; i < da; ++i)
            for (Index j = 0; j < da; ++j)
                for (Index k = 0; k < db; ++k)
                    out(i, j) += rho(i * db + k, j * db + k);
        return out;
    }
    Matrix out = Matrix::Zero(db, db);
    for (Index i = 0; i < db; ++i)
        for (Index j = 0; j < db; ++j)
            for (Index k = 0; k < da; ++k)
                out(i, j) += rho(k * db + i, k * db + j);
    return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, int keep) {
    Matrix m = partial_trace(rho.matrix, rho.dims, keep);
    return DensityMatrix(std::move(m), {rho.dims[static_cast<std::size_t>(keep)]}, rho.basis);
}

} // namespace mist
