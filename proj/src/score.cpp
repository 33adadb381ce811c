#include "qfisher/score.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qfisher {

namespace {

constexpr double kDegeneracyTol = 1e-12;
constexpr int kOuterOrder = 16; // Gauss-Legendre order per x panel

void check_pair(const HermitianOperator &rho, const HermitianOperator &drho) {
    if (rho.dim() != drho.dim()) {
        std::ostringstream msg;
        msg << "state and derivative dimensions differ: " << rho.dim() << " vs "
            << drho.dim();
        throw DimensionError(msg.str());
    }
    const double min_eig = rho.min_eigenvalue();
    if (!(min_eig > 0.0)) {
        std::ostringstream msg;
        msg << "state is not positive definite: min eigenvalue = " << min_eig;
        throw DomainError(msg.str());
    }
}

bool nearly_degenerate(double a, double b) {
    return std::abs(a - b) < kDegeneracyTol * std::max(a, b);
}

} // namespace

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0)) {
        throw ValidationError("QuadratureConfig: rel_tol must be positive");
    }
    if (inner_order < 2) {
        throw ValidationError("QuadratureConfig: inner_order must be at least 2");
    }
    if (panels < 1 || max_panels < panels) {
        throw ValidationError("QuadratureConfig: need 1 <= panels <= max_panels");
    }
    if (!(x_truncation_factor > 0.0)) {
        throw ValidationError("QuadratureConfig: x_truncation_factor must be positive");
    }
}

HermitianOperator sld(const HermitianOperator &rho, const HermitianOperator &drho) {
    check_pair(rho, drho);
    const EigenDecomposition &eig = rho.eig();
    const ComplexMatrix b = eig.eigenvectors.adjoint() * drho.matrix() * eig.eigenvectors;
    const Eigen::Index dim = rho.dim();
    ComplexMatrix l(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            l(i, j) = 2.0 * b(i, j) / (eig.eigenvalues(i) + eig.eigenvalues(j));
        }
    }
    return HermitianOperator(eig.eigenvectors * l * eig.eigenvectors.adjoint());
}

ComplexMatrix rld(const HermitianOperator &rho, const HermitianOperator &drho) {
    check_pair(rho, drho);
    const EigenDecomposition &eig = rho.eig();
    const ComplexMatrix inv =
        eig.eigenvectors * eig.eigenvalues.cwiseInverse().asDiagonal() *
        eig.eigenvectors.adjoint();
    return inv * drho.matrix();
}

HermitianOperator exact_score_spectral(const HermitianOperator &rho,
                                       const HermitianOperator &drho) {
    check_pair(rho, drho);
    const EigenDecomposition &eig = rho.eig();
    const ComplexMatrix b = eig.eigenvectors.adjoint() * drho.matrix() * eig.eigenvectors;
    const Eigen::Index dim = rho.dim();
    ComplexMatrix score(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double li = eig.eigenvalues(i);
            const double lj = eig.eigenvalues(j);
            // The divided difference of ln collapses to 1/lambda at (near-)
            // coincident eigenvalues; the ratio of logs would cancel
            // catastrophically there.
            const double weight = nearly_degenerate(li, lj)
                                      ? 1.0 / (0.5 * (li + lj))
                                      : (std::log(li) - std::log(lj)) / (li - lj);
            score(i, j) = b(i, j) * weight;
        }
    }
    return HermitianOperator(eig.eigenvectors * score * eig.eigenvectors.adjoint());
}

HermitianOperator exact_score_quadrature(const HermitianOperator &rho,
                                         const HermitianOperator &drho,
                                         const QuadratureConfig &cfg) {
    cfg.validate();
    check_pair(rho, drho);
    const EigenDecomposition &eig = rho.eig();
    const RealVector &mu = eig.eigenvalues;
    const Eigen::Index dim = rho.dim();
    const ComplexMatrix b = eig.eigenvectors.adjoint() * drho.matrix() * eig.eigenvectors;

    // The integrand depends on eigenvalues only, so collapse (near-)degenerate
    // ones into clusters; the kernel is evaluated per cluster pair.
    std::vector<double> cluster_mu;
    std::vector<Eigen::Index> cluster_of(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (cluster_mu.empty() || !nearly_degenerate(cluster_mu.back(), mu(i))) {
            cluster_mu.push_back(mu(i));
        }
        cluster_of[static_cast<std::size_t>(i)] =
            static_cast<Eigen::Index>(cluster_mu.size()) - 1;
    }
    const auto n_clusters = static_cast<Eigen::Index>(cluster_mu.size());

    const double mu_min = mu(0);
    const double mu_max = mu(dim - 1);
    const double x_max = cfg.x_truncation_factor / mu_min;

    // Panel breakpoints graded geometrically from the fastest decay scale
    // 1/mu_max out to x_max; uniform panels would need ~x_max * mu_max of them.
    std::vector<double> breakpoints{0.0};
    for (double x = 1.0 / mu_max; x < x_max; x *= 2.0) {
        breakpoints.push_back(x);
    }
    breakpoints.push_back(x_max);
    const auto split_panels = [](const std::vector<double> &bp) {
        std::vector<double> out;
        out.reserve(2 * bp.size());
        for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
            out.push_back(bp[i]);
            out.push_back(0.5 * (bp[i] + bp[i + 1]));
        }
        out.push_back(bp.back());
        return out;
    };
    while (static_cast<int>(breakpoints.size()) - 1 < cfg.panels) {
        breakpoints = split_panels(breakpoints);
    }

    const auto [outer_nodes, outer_weights] = gauss_legendre(kOuterOrder);
    auto [inner_nodes, inner_weights] = gauss_legendre(cfg.inner_order);
    for (auto &node : inner_nodes) {
        node = 0.5 * (node + 1.0); // map to [0, 1]
    }
    for (auto &weight : inner_weights) {
        weight *= 0.5;
    }

    Eigen::MatrixXd kernel(n_clusters, n_clusters);
    Eigen::VectorXd left(n_clusters), right(n_clusters);
    const auto accumulate = [&](const std::vector<double> &bp) {
        kernel.setZero();
        for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
            const double half = 0.5 * (bp[p + 1] - bp[p]);
            const double mid = 0.5 * (bp[p + 1] + bp[p]);
            for (int m = 0; m < kOuterOrder; ++m) {
                const double x = mid + half * outer_nodes[static_cast<std::size_t>(m)];
                const double wx = half * outer_weights[static_cast<std::size_t>(m)];
                for (int k = 0; k < cfg.inner_order; ++k) {
                    const double lam = inner_nodes[static_cast<std::size_t>(k)];
                    const double w = wx * inner_weights[static_cast<std::size_t>(k)];
                    for (Eigen::Index c = 0; c < n_clusters; ++c) {
                        left(c) = std::exp(-lam * x * cluster_mu[static_cast<std::size_t>(c)]);
                        right(c) =
                            std::exp(-(1.0 - lam) * x * cluster_mu[static_cast<std::size_t>(c)]);
                    }
                    kernel.noalias() += w * left * right.transpose();
                }
            }
        }
        return kernel;
    };

    const auto score_distance = [&](const Eigen::MatrixXd &ka, const Eigen::MatrixXd &kb) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                const double diff = ka(cluster_of[static_cast<std::size_t>(i)],
                                       cluster_of[static_cast<std::size_t>(j)]) -
                                    kb(cluster_of[static_cast<std::size_t>(i)],
                                       cluster_of[static_cast<std::size_t>(j)]);
                sum += std::norm(diff * b(i, j));
            }
        }
        return std::sqrt(sum);
    };

    Eigen::MatrixXd previous = accumulate(breakpoints);
    double residual = std::numeric_limits<double>::infinity();
    while (true) {
        const auto next_breakpoints = split_panels(breakpoints);
        if (static_cast<int>(next_breakpoints.size()) - 1 > cfg.max_panels) {
            std::ostringstream msg;
            msg << "exact_score_quadrature did not reach rel_tol = " << cfg.rel_tol
                << " within " << cfg.max_panels << " panels; achieved residual " << residual;
            throw ConvergenceError(msg.str(), residual);
        }
        breakpoints = next_breakpoints;
        const Eigen::MatrixXd current = accumulate(breakpoints);
        const double distance = score_distance(current, previous);
        const double scale = score_distance(current, Eigen::MatrixXd::Zero(n_clusters, n_clusters));
        residual = distance / std::max(scale, 1e-300);
        previous = current;
        if (residual <= cfg.rel_tol) {
            break;
        }
    }

    ComplexMatrix score(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            score(i, j) = b(i, j) * previous(cluster_of[static_cast<std::size_t>(i)],
                                             cluster_of[static_cast<std::size_t>(j)]);
        }
    }
    return HermitianOperator(eig.eigenvectors * score * eig.eigenvectors.adjoint());
}

ScoreTriple score_triple(const HermitianOperator &rho, const HermitianOperator &drho) {
    return ScoreTriple{sld(rho, drho), rld(rho, drho), exact_score_spectral(rho, drho)};
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
    if (order < 1) {
        throw ValidationError("gauss_legendre: order must be positive");
    }
    const auto n = static_cast<std::size_t>(order);
    std::vector<double> nodes(n), weights(n);
    const double pi = 3.14159265358979323846;
    const std::size_t mid = (n + 1) / 2;
    for (std::size_t i = 0; i < mid; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double z = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * static_cast<double>(j) + 1.0) * z * p2 -
                      static_cast<double>(j) * p3) /
                     (static_cast<double>(j) + 1.0);
            }
            pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    return {nodes, weights};
}

} // namespace qfisher
