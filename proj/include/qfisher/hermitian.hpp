#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <string_view>

#include <Eigen/Dense>

#include "qfisher/errors.hpp"

namespace qfisher {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

ComplexMatrix identity_matrix(Eigen::Index dim);

/// Eigensystem of a Hermitian matrix. Eigenvalues are ascending, column k of
/// `eigenvectors` pairs with `eigenvalues[k]`, and the column set is unitary.
struct EigenDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

/// A dense complex Hermitian matrix.
///
/// Construction validates Hermiticity against a relative tolerance and then
/// symmetrizes the stored matrix, so downstream spectral calculus always sees
/// an exactly Hermitian operand. The eigendecomposition is computed lazily and
/// cached; copies share the cache. Instances are immutable and safe for
/// concurrent reads.
class HermitianOperator {
  public:
    static constexpr double kDefaultHermiticityTol = 1e-12;

    explicit HermitianOperator(ComplexMatrix matrix,
                               double hermiticity_tol = kDefaultHermiticityTol);

    Eigen::Index dim() const noexcept { return matrix_.rows(); }
    const ComplexMatrix &matrix() const noexcept { return matrix_; }

    /// Cached eigendecomposition (thread-safe lazy initialization).
    const EigenDecomposition &eig() const;

    double min_eigenvalue() const { return eig().eigenvalues(0); }
    double max_eigenvalue() const { return eig().eigenvalues(dim() - 1); }

  private:
    struct EigCache {
        std::once_flag once;
        EigenDecomposition value;
    };

    ComplexMatrix matrix_;
    std::shared_ptr<EigCache> cache_;
};

/// Kronecker product of two square matrices, left factor most significant:
/// result(i*dim(b)+k, j*dim(b)+l) = a(i,j) * b(k,l).
ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// Eigendecomposition with ascending eigenvalues.
EigenDecomposition eigh(const HermitianOperator &h);

/// Applies a real scalar function to the spectrum: V f(Lambda) V^dagger.
/// Throws DomainError naming the offending eigenvalue if f returns a
/// non-finite value there. `fname` only decorates error messages.
HermitianOperator spectral_function(const HermitianOperator &h,
                                    const std::function<double(double)> &f,
                                    std::string_view fname = "f");

/// tr(a * b) evaluated entrywise in O(dim^2).
Complex trace_product(const HermitianOperator &a, const HermitianOperator &b);

} // namespace qfisher
