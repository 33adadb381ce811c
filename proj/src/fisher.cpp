#include "qfisher/fisher.hpp"

#include <cmath>
#include <sstream>

#include "qfisher/score.hpp"

namespace qfisher {

namespace {

constexpr double kProbabilityFloor = 1e-15;
constexpr double kSensitivityFloor = 1e-12;
constexpr double kPsdTol = 1e-10;

ComplexMatrix eigenbasis_transform(const HermitianOperator &rho,
                                   const HermitianOperator &drho) {
    const EigenDecomposition &eig = rho.eig();
    return eig.eigenvectors.adjoint() * drho.matrix() * eig.eigenvectors;
}

void check_positive_definite(const HermitianOperator &rho) {
    const double min_eig = rho.min_eigenvalue();
    if (!(min_eig > 0.0)) {
        std::ostringstream msg;
        msg << "state is not positive definite: min eigenvalue = " << min_eig;
        throw DomainError(msg.str());
    }
}

void check_density_like(const HermitianOperator &op, const char *name) {
    const double trace = op.matrix().trace().real();
    if (std::abs(trace - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << name << " must have unit trace, got " << trace;
        throw ValidationError(msg.str());
    }
    if (op.min_eigenvalue() < -kPsdTol) {
        std::ostringstream msg;
        msg << name << " must be positive semidefinite, min eigenvalue = "
            << op.min_eigenvalue();
        throw ValidationError(msg.str());
    }
}

} // namespace

Povm::Povm(std::vector<HermitianOperator> elements, std::vector<std::string> labels)
    : elements_(std::move(elements)), labels_(std::move(labels)) {
    if (elements_.empty()) {
        throw ValidationError("Povm requires at least one element");
    }
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (elements_[i].dim() != elements_.front().dim()) {
            throw DimensionError("Povm elements must share one dimension");
        }
        if (elements_[i].min_eigenvalue() < -kPsdTol) {
            std::ostringstream msg;
            msg << "Povm element " << i << " is not positive semidefinite: min eigenvalue = "
                << elements_[i].min_eigenvalue();
            throw ValidationError(msg.str());
        }
    }
    default_labels();
    check_completeness();
}

Povm::Povm(Unchecked, std::vector<HermitianOperator> elements, std::vector<std::string> labels)
    : elements_(std::move(elements)), labels_(std::move(labels)) {
    default_labels();
    check_completeness();
}

void Povm::default_labels() {
    if (labels_.empty()) {
        labels_.reserve(elements_.size());
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            labels_.push_back(std::to_string(i));
        }
    }
    if (labels_.size() != elements_.size()) {
        throw ValidationError("Povm label count must match element count");
    }
}

void Povm::check_completeness() const {
    ComplexMatrix sum = ComplexMatrix::Zero(dim(), dim());
    for (const auto &element : elements_) {
        sum += element.matrix();
    }
    const double residual = (sum - identity_matrix(dim())).norm();
    if (residual > 1e-10) {
        std::ostringstream msg;
        msg << "Povm elements do not sum to the identity: residual " << residual;
        throw ValidationError(msg.str());
    }
}

Povm Povm::from_unitary_columns(const ComplexMatrix &unitary,
                                const std::vector<std::vector<int>> &partition) {
    if (unitary.rows() != unitary.cols()) {
        throw DimensionError("from_unitary_columns requires a square matrix");
    }
    std::vector<HermitianOperator> elements;
    elements.reserve(partition.size());
    for (const auto &group : partition) {
        if (group.empty()) {
            throw ValidationError("from_unitary_columns: empty outcome group");
        }
        ComplexMatrix element = ComplexMatrix::Zero(unitary.rows(), unitary.rows());
        for (int column : group) {
            element += unitary.col(column) * unitary.col(column).adjoint();
        }
        elements.emplace_back(std::move(element));
    }
    return Povm(Unchecked{}, std::move(elements), {});
}

Povm Povm::binary_projective(const HermitianOperator &projector, std::string label_in,
                             std::string label_out) {
    std::vector<HermitianOperator> elements;
    elements.push_back(projector);
    elements.emplace_back(identity_matrix(projector.dim()) - projector.matrix());
    std::vector<std::string> labels{std::move(label_in), std::move(label_out)};
    return Povm(Unchecked{}, std::move(elements), std::move(labels));
}

Povm Povm::computational_basis(Eigen::Index dim) {
    std::vector<HermitianOperator> elements;
    elements.reserve(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) {
        ComplexMatrix element = ComplexMatrix::Zero(dim, dim);
        element(k, k) = 1.0;
        elements.emplace_back(std::move(element));
    }
    return Povm(Unchecked{}, std::move(elements), {});
}

Povm Povm::trivial(Eigen::Index dim) {
    std::vector<HermitianOperator> elements;
    elements.emplace_back(identity_matrix(dim));
    return Povm(Unchecked{}, std::move(elements), {"sure"});
}

double qfi_sld(const HermitianOperator &rho, const HermitianOperator &drho) {
    if (rho.dim() != drho.dim()) {
        throw DimensionError("qfi_sld dimension mismatch");
    }
    check_positive_definite(rho);
    const RealVector &mu = rho.eig().eigenvalues;
    const ComplexMatrix b = eigenbasis_transform(rho, drho);
    double total = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        for (Eigen::Index j = 0; j < rho.dim(); ++j) {
            total += 2.0 * std::norm(b(i, j)) / (mu(i) + mu(j));
        }
    }
    return total;
}

double qfi_rld(const HermitianOperator &rho, const HermitianOperator &drho) {
    if (rho.dim() != drho.dim()) {
        throw DimensionError("qfi_rld dimension mismatch");
    }
    check_positive_definite(rho);
    const RealVector &mu = rho.eig().eigenvalues;
    const ComplexMatrix b = eigenbasis_transform(rho, drho);
    double total = 0.0;
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        for (Eigen::Index j = 0; j < rho.dim(); ++j) {
            total += std::norm(b(i, j)) / mu(i);
        }
    }
    return total;
}

double werner_qfi_closed_form(const QuditSystem &system, double theta) {
    if (!(theta >= 0.0 && theta < 1.0)) {
        std::ostringstream msg;
        msg << "theta = " << theta << " is outside [0, 1)";
        throw DomainError(msg.str());
    }
    const double dim = static_cast<double>(system.dim);
    return (dim - 1.0) / ((1.0 - theta) * (1.0 + (dim - 1.0) * theta));
}

double classical_fisher(std::span<const double> probabilities,
                        std::span<const double> sensitivities) {
    if (probabilities.size() != sensitivities.size()) {
        throw DimensionError("classical_fisher: probability/sensitivity size mismatch");
    }
    double total = 0.0;
    for (std::size_t alpha = 0; alpha < probabilities.size(); ++alpha) {
        const double p = probabilities[alpha];
        const double dp = sensitivities[alpha];
        if (p <= kProbabilityFloor) {
            if (std::abs(dp) <= kSensitivityFloor) {
                continue; // vanishing outcome, vanishing sensitivity: no contribution
            }
            std::ostringstream msg;
            msg << "ill-posed measurement: outcome " << alpha << " has probability " << p
                << " below the floor but sensitivity " << dp
                << "; its Fisher contribution diverges";
            throw DomainError(msg.str());
        }
        total += dp * dp / p;
    }
    return total;
}

double classical_fisher(const Povm &povm, const HermitianOperator &rho,
                        const HermitianOperator &drho) {
    if (povm.dim() != rho.dim() || rho.dim() != drho.dim()) {
        throw DimensionError("classical_fisher dimension mismatch");
    }
    const std::vector<double> p = outcome_probabilities(povm, rho);
    const std::vector<double> dp = outcome_sensitivities(povm, drho);
    return classical_fisher(p, dp);
}

double cramer_rao_bound(double fisher, std::uint64_t n_samples) {
    if (!(fisher > 0.0)) {
        std::ostringstream msg;
        msg << "Cramer-Rao bound requires positive Fisher information, got " << fisher;
        throw DomainError(msg.str());
    }
    if (n_samples < 1) {
        throw DomainError("Cramer-Rao bound requires at least one sample");
    }
    return 1.0 / (static_cast<double>(n_samples) * fisher);
}

namespace detail {

double fidelity_uhlmann(const HermitianOperator &sigma, const HermitianOperator &rho) {
    const auto clipped_sqrt = [](const HermitianOperator &op) {
        // Eigenvalues that are zero up to rounding must not leak sqrt(eps)
        // into the root; clip everything below the spectral noise floor.
        const double floor = 1e-13 * std::max(op.max_eigenvalue(), 0.0);
        return spectral_function(
            op,
            [floor](double x) {
                if (x < -1e-12) {
                    std::ostringstream msg;
                    msg << "fidelity: eigenvalue " << x << " is below the clip threshold";
                    throw ValidationError(msg.str());
                }
                return x <= floor ? 0.0 : std::sqrt(x);
            },
            "sqrt");
    };
    const HermitianOperator root_sigma = clipped_sqrt(sigma);
    const HermitianOperator root_rho = clipped_sqrt(rho);
    // tr (sqrt(sigma) rho sqrt(sigma))^(1/2) equals the trace norm of
    // sqrt(rho) sqrt(sigma); singular values carry absolute rather than
    // square-rooted rounding error, which matters when sigma is near-singular.
    const Eigen::BDCSVD<ComplexMatrix> svd(root_rho.matrix() * root_sigma.matrix());
    const double sum = svd.singularValues().sum();
    return sum * sum;
}

} // namespace detail

double fidelity(const HermitianOperator &sigma, const HermitianOperator &rho) {
    if (sigma.dim() != rho.dim()) {
        throw DimensionError("fidelity dimension mismatch");
    }
    check_density_like(sigma, "sigma");
    check_density_like(rho, "rho");
    const double purity = (sigma.matrix() * sigma.matrix()).trace().real();
    if (purity >= 1.0 - 1e-12) {
        // sigma = |psi><psi|: F reduces to the overlap <psi| rho |psi>.
        return trace_product(sigma, rho).real();
    }
    return detail::fidelity_uhlmann(sigma, rho);
}

double werner_fidelity_closed_form(const QuditSystem &system, double theta) {
    if (!(theta >= 0.0 && theta < 1.0)) {
        std::ostringstream msg;
        msg << "theta = " << theta << " is outside [0, 1)";
        throw DomainError(msg.str());
    }
    const double dim = static_cast<double>(system.dim);
    return (1.0 - theta + dim * theta) / dim;
}

std::vector<double> outcome_probabilities(const Povm &povm, const HermitianOperator &rho) {
    std::vector<double> p(povm.size());
    for (std::size_t alpha = 0; alpha < povm.size(); ++alpha) {
        p[alpha] = trace_product(povm.element(alpha), rho).real();
    }
    return p;
}

std::vector<double> outcome_sensitivities(const Povm &povm, const HermitianOperator &drho) {
    std::vector<double> dp(povm.size());
    for (std::size_t alpha = 0; alpha < povm.size(); ++alpha) {
        dp[alpha] = trace_product(povm.element(alpha), drho).real();
    }
    return dp;
}

Povm ghz_projective_povm(const QuditSystem &system, std::uint64_t dense_cap) {
    if (system.dim > dense_cap) {
        std::ostringstream msg;
        msg << "ghz_projective_povm: dimension " << system.dim << " exceeds the dense cap "
            << dense_cap;
        throw CapacityError(msg.str());
    }
    const StateVector phi = ghz_vector(system);
    HermitianOperator projector(phi.amplitudes * phi.amplitudes.adjoint());
    return Povm::binary_projective(projector, "ghz", "rest");
}

ComplexMatrix random_unitary(Eigen::Index dim, Philox2x64 &gen) {
    ComplexMatrix ginibre(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            ginibre(r, c) = Complex(standard_normal(gen), standard_normal(gen));
        }
    }
    const Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < dim; ++k) {
        const Complex diag = r(k, k);
        const double mag = std::abs(diag);
        if (mag > 0.0) {
            q.col(k) *= std::conj(diag / mag); // phase fix for Haar measure
        }
    }
    return q;
}

Povm random_povm(Eigen::Index dim, Philox2x64 &gen, bool coarse_grain) {
    const ComplexMatrix unitary = random_unitary(dim, gen);
    std::vector<std::vector<int>> partition;
    if (coarse_grain && dim > 1) {
        const auto split =
            1 + static_cast<int>(gen() % static_cast<std::uint64_t>(dim - 1));
        partition.resize(2);
        for (int k = 0; k < dim; ++k) {
            partition[static_cast<std::size_t>(k >= split)].push_back(k);
        }
    } else {
        partition.resize(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            partition[static_cast<std::size_t>(k)].push_back(k);
        }
    }
    return Povm::from_unitary_columns(unitary, partition);
}

double golden_section_minimize(const std::function<double(double)> &f, double a, double b,
                               double xtol) {
    if (!(a < b)) {
        throw DomainError("golden_section_minimize requires a < b");
    }
    if (!(xtol > 0.0)) {
        throw DomainError("golden_section_minimize requires xtol > 0");
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a;
    double hi = b;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > xtol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    const double x = 0.5 * (lo + hi);

    // One parabolic vertex step with offsets wide enough to rise above the
    // floating-point noise floor of f near its flat minimum; the bracket alone
    // cannot locate the argmin better than ~sqrt(eps) there.
    const double h = std::max(1e-5 * std::max(1.0, std::abs(x)), 8.0 * xtol);
    const double left = std::max(a, x - h);
    const double right = std::min(b, x + h);
    const double fl = f(left);
    const double fm = f(x);
    const double fr = f(right);
    const double b1 = x - left;
    const double b2 = x - right;
    const double denom = b1 * (fm - fr) - b2 * (fm - fl);
    if (fl >= fm && fr >= fm && std::abs(denom) > 0.0) {
        const double numer = b1 * b1 * (fm - fr) - b2 * b2 * (fm - fl);
        const double vertex = x - 0.5 * numer / denom;
        if (vertex >= left && vertex <= right) {
            return vertex;
        }
    }
    return x;
}

} // namespace qfisher
