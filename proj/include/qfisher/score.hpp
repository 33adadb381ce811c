#pragma once

#include <utility>
#include <vector>

#include "qfisher/hermitian.hpp"

namespace qfisher {

/// Controls for the double-integral evaluation of the exact score.
/// The outer integral over x is truncated at x_max = x_truncation_factor /
/// lambda_min, where the integrand's tail is bounded by exp(-x_truncation_factor)
/// relative; the default 50 puts the tail below 1e-21.
struct QuadratureConfig {
    double rel_tol = 1e-8;
    double x_truncation_factor = 50.0;
    int panels = 16;      // starting panel count; refinement doubles it
    int inner_order = 32; // fixed Gauss-Legendre order for the lambda integral
    int max_panels = 1 << 15;

    void validate() const;
};

/// The three logarithmic derivatives of a positive-definite parametric
/// density matrix at one parameter point. `sld` and `exact` are Hermitian;
/// `rld` is not, in general.
struct ScoreTriple {
    HermitianOperator sld;
    ComplexMatrix rld;
    HermitianOperator exact;
};

/// Symmetric logarithmic derivative: the Hermitian L solving
/// (rho L + L rho)/2 = drho, computed in rho's eigenbasis as
/// L_ij = 2 drho_ij / (lambda_i + lambda_j).
HermitianOperator sld(const HermitianOperator &rho, const HermitianOperator &drho);

/// Right logarithmic derivative: L = rho^-1 drho, solving rho L = drho.
ComplexMatrix rld(const HermitianOperator &rho, const HermitianOperator &drho);

/// Exact score d(ln rho)/d theta via divided differences of the logarithm:
/// (d ln rho)_ij = drho_ij * (ln l_i - ln l_j)/(l_i - l_j), diagonal limit 1/l_i.
HermitianOperator exact_score_spectral(const HermitianOperator &rho,
                                       const HermitianOperator &drho);

/// Exact score evaluated as the literal double integral
/// int_0^inf dx int_0^1 dlambda exp(-lambda x rho) drho exp(-(1-lambda) x rho),
/// with adaptive composite Gauss-Legendre panels in x and a fixed-order rule
/// in lambda. Agrees with exact_score_spectral up to the quadrature tolerance.
HermitianOperator exact_score_quadrature(const HermitianOperator &rho,
                                         const HermitianOperator &drho,
                                         const QuadratureConfig &cfg = {});

ScoreTriple score_triple(const HermitianOperator &rho, const HermitianOperator &drho);

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

} // namespace qfisher
