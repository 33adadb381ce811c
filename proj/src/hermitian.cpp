#include "qfisher/hermitian.hpp"

#include <cmath>
#include <sstream>

namespace qfisher {

ComplexMatrix identity_matrix(Eigen::Index dim) {
    return ComplexMatrix::Identity(dim, dim);
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix, double hermiticity_tol)
    : matrix_(std::move(matrix)), cache_(std::make_shared<EigCache>()) {
    if (matrix_.rows() != matrix_.cols()) {
        std::ostringstream msg;
        msg << "HermitianOperator requires a square matrix, got " << matrix_.rows()
            << "x" << matrix_.cols();
        throw DimensionError(msg.str());
    }
    if (hermiticity_tol < 0.0) {
        throw ValidationError("hermiticity tolerance must be nonnegative");
    }
    const double norm = matrix_.norm();
    const double residual = (matrix_ - matrix_.adjoint()).norm();
    if (residual > hermiticity_tol * std::max(1.0, norm)) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: ||M - M^dagger||_F = " << residual
            << " exceeds " << hermiticity_tol << " * max(1, ||M||_F = " << norm << ")";
        throw ValidationError(msg.str());
    }
    // Remove round-off drift so spectral routines see an exactly Hermitian matrix.
    matrix_ = ((matrix_ + matrix_.adjoint()) / 2.0).eval();
}

const EigenDecomposition &HermitianOperator::eig() const {
    std::call_once(cache_->once, [this] {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_);
        if (solver.info() != Eigen::Success) {
            throw Error("eigendecomposition failed to converge");
        }
        cache_->value.eigenvalues = solver.eigenvalues();
        cache_->value.eigenvectors = solver.eigenvectors();
    });
    return cache_->value;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) {
        std::ostringstream msg;
        msg << "kron requires square factors, got " << a.rows() << "x" << a.cols()
            << " and " << b.rows() << "x" << b.cols();
        throw DimensionError(msg.str());
    }
    const Eigen::Index da = a.rows();
    const Eigen::Index db = b.rows();
    ComplexMatrix out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < da; ++j) {
            out.block(i * db, j * db, db, db) = a(i, j) * b;
        }
    }
    return out;
}

EigenDecomposition eigh(const HermitianOperator &h) { return h.eig(); }

HermitianOperator spectral_function(const HermitianOperator &h,
                                    const std::function<double(double)> &f,
                                    std::string_view fname) {
    const EigenDecomposition &eig = h.eig();
    const Eigen::Index dim = h.dim();
    RealVector mapped(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double value = f(eig.eigenvalues(i));
        if (!std::isfinite(value)) {
            std::ostringstream msg;
            msg << "spectral_function: " << fname << "(lambda) is not finite for eigenvalue lambda = "
                << eig.eigenvalues(i) << " (index " << i << ")";
            throw DomainError(msg.str());
        }
        mapped(i) = value;
    }
    ComplexMatrix result = eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
    return HermitianOperator(std::move(result));
}

Complex trace_product(const HermitianOperator &a, const HermitianOperator &b) {
    if (a.dim() != b.dim()) {
        std::ostringstream msg;
        msg << "trace_product dimension mismatch: " << a.dim() << " vs " << b.dim();
        throw DimensionError(msg.str());
    }
    return (a.matrix().array() * b.matrix().transpose().array()).sum();
}

} // namespace qfisher
