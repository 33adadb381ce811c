#include "qfisher/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "qfisher/estimation.hpp"
#include "qfisher/fisher.hpp"
#include "qfisher/score.hpp"
#include "qfisher/werner.hpp"

namespace qfisher {

namespace {

struct CheckBody {
    double residual = 0.0;
    std::string detail;
};

std::vector<QuditSystem> dense_grid_systems() {
    std::vector<QuditSystem> systems;
    for (int d = 2; d <= 4; ++d) {
        for (int n = 2; n <= 3; ++n) {
            QuditSystem sys(d, n);
            if (sys.dim <= 256) {
                systems.push_back(sys);
            }
        }
    }
    return systems;
}

std::vector<double> theta_grid(bool fast) {
    std::vector<double> grid;
    const int step = fast ? 6 : 1;
    for (int k = 1; k <= 19; k += step) {
        grid.push_back(0.05 * k);
    }
    return grid;
}

struct RandomInstance {
    HermitianOperator rho;
    HermitianOperator drho;
};

// Positive definite rho with eigenvalues in [0.2, 1] (modest condition number
// keeps finite differences and the fixed-order inner quadrature accurate) and
// a unit-Frobenius-norm Hermitian direction.
RandomInstance random_instance(Eigen::Index dim, Philox2x64 &gen) {
    const ComplexMatrix unitary = random_unitary(dim, gen);
    RealVector eigenvalues(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        eigenvalues(i) = 0.2 + 0.8 * uniform_unit(gen);
    }
    ComplexMatrix rho = unitary * eigenvalues.asDiagonal() * unitary.adjoint();

    ComplexMatrix g(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            g(r, c) = Complex(standard_normal(gen), standard_normal(gen));
        }
    }
    ComplexMatrix direction = (g + g.adjoint()) / 2.0;
    direction /= direction.norm();
    return {HermitianOperator(std::move(rho)), HermitianOperator(std::move(direction))};
}

double pairwise_max_distance(const std::vector<ComplexMatrix> &mats) {
    double worst = 0.0;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            worst = std::max(worst, (mats[i] - mats[j]).norm());
        }
    }
    return worst;
}

CheckBody check_qfi_closed_form(bool fast) {
    double worst = 0.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const HermitianOperator drho = derivative(sys);
        for (double theta : theta_grid(fast)) {
            const HermitianOperator rho = density(WernerState(sys, theta));
            const double dense = qfi_sld(rho, drho);
            const double closed = werner_qfi_closed_form(sys, theta);
            worst = std::max(worst, std::abs(dense - closed) / closed);
        }
    }
    return {worst, std::string("dense tr[rho L^2] vs (D-1)/((1-t)(1+(D-1)t))")};
}

CheckBody check_minimizer_argmin() {
    double worst = 0.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const auto objective = [&](double theta) {
            return werner_qfi_closed_form(sys, theta);
        };
        const double argmin = golden_section_minimize(objective, 0.0, 1.0 - 1e-6, 1e-10);
        worst = std::max(worst, std::abs(argmin - qfi_minimizer(sys)));
    }
    return {worst, std::string("golden-section argmin of the QFI vs (D-2)/(2(D-1))")};
}

CheckBody check_minimum_value() {
    double worst = 0.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const double dim = static_cast<double>(sys.dim);
        const double expected = 4.0 * (dim - 1.0) * (dim - 1.0) / (dim * dim);
        const double value = werner_qfi_closed_form(sys, qfi_minimizer(sys));
        worst = std::max(worst, std::abs(value - expected) / expected);
    }
    return {worst, std::string("QFI at its minimizer vs 4(D-1)^2/D^2")};
}

CheckBody check_two_qubit_coincidence() {
    const QuditSystem two_qubits(2, 2);
    const double gap22 = std::abs(qfi_minimizer(two_qubits) - separability_threshold(two_qubits));
    double min_gap_elsewhere = 1.0;
    for (int d = 2; d <= 5; ++d) {
        for (int n = 2; n <= 5; ++n) {
            if (d == 2 && n == 2) {
                continue;
            }
            const QuditSystem sys(d, n);
            if (sys.dim > 1024) {
                continue;
            }
            min_gap_elsewhere =
                std::min(min_gap_elsewhere, qfi_minimizer(sys) - separability_threshold(sys));
        }
    }
    std::ostringstream detail;
    detail << "minimizer equals the separability threshold only at d=2,N=2; smallest gap "
              "elsewhere "
           << min_gap_elsewhere;
    const double residual = (min_gap_elsewhere > 0.0) ? gap22 : 1.0;
    return {residual, detail.str()};
}

CheckBody check_universality_closed_form() {
    double worst = 0.0;
    int count = 0;
    for (int d = 2; d <= 10; ++d) {
        for (int n = 2;; ++n) {
            QuditSystem sys(d, n);
            if (sys.dim > 1'000'000'000'000ULL) {
                break;
            }
            worst = std::max(
                worst, std::abs(werner_fidelity_closed_form(sys, qfi_minimizer(sys)) - 0.5));
            ++count;
        }
    }
    std::ostringstream text;
    text << "closed-form fidelity at the QFI minimizer vs 1/2 over " << count
         << " systems with D up to 1e12";
    return {worst, std::string(text.str())};
}

CheckBody check_universality_dense() {
    double worst = 0.0;
    for (int d = 2; d <= 4; ++d) {
        for (int n = 2; n <= 4; ++n) {
            const QuditSystem sys(d, n);
            if (sys.dim > 256) {
                continue;
            }
            const StateVector phi = ghz_vector(sys);
            const HermitianOperator projector(phi.amplitudes * phi.amplitudes.adjoint());
            const HermitianOperator rho = density(WernerState(sys, qfi_minimizer(sys)));
            worst = std::max(worst, std::abs(detail::fidelity_uhlmann(projector, rho) - 0.5));
        }
    }
    return {worst, std::string("dense Uhlmann fidelity at the QFI minimizer vs 1/2")};
}

CheckBody check_fidelity_closed_form(bool fast) {
    double worst = 0.0;
    bool theta0_exact = true;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const StateVector phi = ghz_vector(sys);
        const HermitianOperator projector(phi.amplitudes * phi.amplitudes.adjoint());
        for (double theta : theta_grid(fast)) {
            const HermitianOperator rho = density(WernerState(sys, theta));
            const double dense = detail::fidelity_uhlmann(projector, rho);
            worst = std::max(worst, std::abs(dense - werner_fidelity_closed_form(sys, theta)));
        }
        theta0_exact = theta0_exact && (werner_fidelity_closed_form(sys, 0.0) ==
                                        1.0 / static_cast<double>(sys.dim));
    }
    std::ostringstream text;
    text << "dense Uhlmann fidelity vs (1-t+Dt)/D; F(0) = 1/D exactly: "
         << (theta0_exact ? "yes" : "no");
    return {theta0_exact ? worst : 1.0, std::string(text.str())};
}

CheckBody check_score_trio_werner(bool fast) {
    double worst = 0.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const HermitianOperator drho = derivative(sys);
        for (double theta : theta_grid(fast)) {
            const HermitianOperator rho = density(WernerState(sys, theta));
            const ScoreTriple triple = score_triple(rho, drho);
            worst = std::max(worst, pairwise_max_distance({triple.sld.matrix(), triple.rld,
                                                           triple.exact.matrix()}));
        }
    }
    return {worst,
            std::string("pairwise Frobenius distance of SLD, RLD, exact score")};
}

CheckBody check_score_quadrature_werner(bool fast) {
    double worst = 0.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const HermitianOperator drho = derivative(sys);
        for (double theta : theta_grid(fast)) {
            const HermitianOperator rho = density(WernerState(sys, theta));
            const HermitianOperator spectral = exact_score_spectral(rho, drho);
            const HermitianOperator quad = exact_score_quadrature(rho, drho);
            worst = std::max(worst, (spectral.matrix() - quad.matrix()).norm());
        }
    }
    return {worst, std::string("double-integral score vs divided-difference score")};
}

CheckBody check_defining_relations(bool fast) {
    Philox2x64 gen(1001);
    const int instances = fast ? 10 : 50;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 7);
        const RandomInstance inst = random_instance(dim, gen);
        const double scale = inst.drho.matrix().norm();
        const HermitianOperator l = sld(inst.rho, inst.drho);
        const ComplexMatrix r = rld(inst.rho, inst.drho);
        const double sld_residual =
            ((inst.rho.matrix() * l.matrix() + l.matrix() * inst.rho.matrix()) / 2.0 -
             inst.drho.matrix())
                .norm() /
            scale;
        const double rld_residual =
            (inst.rho.matrix() * r - inst.drho.matrix()).norm() / scale;
        worst = std::max({worst, sld_residual, rld_residual});
    }
    return {worst, std::string("(rho L + L rho)/2 = drho and rho R = drho on random "
                               "positive-definite instances")};
}

CheckBody check_quadrature_random(bool fast) {
    Philox2x64 gen(1002);
    const int instances = fast ? 10 : 50;
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 7);
        const RandomInstance inst = random_instance(dim, gen);
        const HermitianOperator spectral = exact_score_spectral(inst.rho, inst.drho);
        const HermitianOperator quad = exact_score_quadrature(inst.rho, inst.drho);
        worst = std::max(worst, (spectral.matrix() - quad.matrix()).norm());
    }
    return {worst, std::string("double-integral score vs divided-difference score on "
                               "random non-commuting instances")};
}

CheckBody check_measurement_bound(bool fast) {
    Philox2x64 gen(1003);
    const int povms_per_point = fast ? 5 : 50;
    double worst_excess = -1.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const HermitianOperator drho = derivative(sys);
        for (double theta : theta_grid(fast)) {
            const HermitianOperator rho = density(WernerState(sys, theta));
            const double quantum = qfi_sld(rho, drho);
            for (int k = 0; k < povms_per_point; ++k) {
                const Povm povm = random_povm(rho.dim(), gen, k % 2 == 1);
                const double classical = classical_fisher(povm, rho, drho);
                worst_excess = std::max(worst_excess, classical - quantum);
            }
        }
    }
    return {worst_excess,
            std::string("classical Fisher information minus the quantum bound over "
                        "seeded random POVMs (must stay <= 1e-9)")};
}

CheckBody check_ghz_saturation(bool fast) {
    double worst = 0.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const HermitianOperator drho = derivative(sys);
        const Povm povm = ghz_projective_povm(sys);
        for (double theta : theta_grid(fast)) {
            const HermitianOperator rho = density(WernerState(sys, theta));
            const double classical = classical_fisher(povm, rho, drho);
            const double closed = werner_qfi_closed_form(sys, theta);
            worst = std::max(worst, std::abs(classical - closed) / closed);
        }
    }
    return {worst, std::string("{P_Phi, I-P_Phi} classical Fisher information vs the "
                               "closed-form quantum value")};
}

CheckBody check_population_identity() {
    const QuditSystem sys(2, 2);
    const double theta = 1.0 / 3.0;
    const Povm povm = ghz_projective_povm(sys);
    const Estimator estimator = build_estimator(povm, sys, theta);
    const HermitianOperator rho = density(WernerState(sys, theta));
    const std::vector<double> p = outcome_probabilities(povm, rho);
    const double variance = population_variance(estimator, p);
    const double residual = std::abs(variance - 4.0 / 9.0);
    return {residual, std::string("single-shot population variance vs 1/J = 4/9 at "
                                    "d=2, N=2, theta=1/3",
                                    residual)};
}

CheckBody check_monte_carlo(bool fast) {
    const QuditSystem sys(2, 2);
    const double theta = 1.0 / 3.0;
    const Povm povm = ghz_projective_povm(sys);
    (void)fast; // cheap enough to always run at full scale
    const std::uint64_t shots = 10000;
    const EstimationReport report = run_experiment(sys, theta, povm, shots, 200, 3);
    const double target = 4.0 / 9.0;
    const double scaled = report.estimate_variance * static_cast<double>(shots);
    const double residual = std::abs(scaled - target) / target;
    std::ostringstream text;
    text << "Monte Carlo variance*shots = " << scaled << " vs 1/J = " << target << " over "
         << report.n_trials << " trials (seed " << report.seed << ")";
    return {residual, text.str()};
}

CheckBody check_score_finite_difference(bool fast) {
    Philox2x64 gen(1004);
    const int instances = fast ? 5 : 20;
    const double h = 1e-5;
    double worst = 0.0;
    const auto log_fn = [](double x) { return std::log(x); };
    for (int i = 0; i < instances; ++i) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 7);
        const RandomInstance inst = random_instance(dim, gen);
        const HermitianOperator plus(inst.rho.matrix() + h * inst.drho.matrix());
        const HermitianOperator minus(inst.rho.matrix() - h * inst.drho.matrix());
        const ComplexMatrix fd = (spectral_function(plus, log_fn, "ln").matrix() -
                                  spectral_function(minus, log_fn, "ln").matrix()) /
                                 (2.0 * h);
        const HermitianOperator exact = exact_score_spectral(inst.rho, inst.drho);
        worst = std::max(worst, (fd - exact.matrix()).norm());
    }
    return {worst, std::string("divided-difference score vs central finite difference "
                               "of the matrix logarithm (h = 1e-5)")};
}

CheckBody check_derivative_finite_difference() {
    const double h = 1e-6;
    const double theta = 0.4;
    double worst = 0.0;
    for (const QuditSystem &sys : dense_grid_systems()) {
        const ComplexMatrix fd = (density(WernerState(sys, theta + h)).matrix() -
                                  density(WernerState(sys, theta - h)).matrix()) /
                                 (2.0 * h);
        const ComplexMatrix exact = derivative(sys).matrix();
        worst = std::max(worst, (fd - exact).cwiseAbs().maxCoeff());
    }
    return {worst, std::string("state derivative vs central finite difference of the "
                               "density matrix (h = 1e-6, entrywise)")};
}

} // namespace

std::vector<CheckResult> run_verification(const VerifyOptions &options) {
    std::vector<CheckResult> results;
    const auto run = [&](int criterion, std::string name, double tolerance,
                         const std::function<CheckBody()> &body) {
        const auto start = std::chrono::steady_clock::now();
        CheckBody outcome = body();
        const auto stop = std::chrono::steady_clock::now();
        CheckResult result;
        result.criterion = criterion;
        result.name = std::move(name);
        result.detail = std::move(outcome.detail);
        result.residual = outcome.residual;
        result.tolerance = options.tolerance_override.value_or(tolerance);
        result.passed = outcome.residual <= result.tolerance;
        result.elapsed_seconds =
            std::chrono::duration<double>(stop - start).count();
        results.push_back(std::move(result));
    };

    const bool fast = options.fast;
    run(1, "qfi_closed_form_agreement", 1e-10, [&] { return check_qfi_closed_form(fast); });
    run(2, "qfi_minimizer_argmin", 1e-8, [&] { return check_minimizer_argmin(); });
    run(2, "qfi_minimum_value", 1e-10, [&] { return check_minimum_value(); });
    run(3, "two_qubit_coincidence", 0.0, [&] { return check_two_qubit_coincidence(); });
    run(4, "fidelity_universality_closed_form", 1e-12,
        [&] { return check_universality_closed_form(); });
    run(4, "fidelity_universality_dense", 1e-10, [&] { return check_universality_dense(); });
    run(5, "fidelity_closed_form_agreement", 1e-10,
        [&] { return check_fidelity_closed_form(fast); });
    run(6, "score_spectral_trio_werner", 1e-10, [&] { return check_score_trio_werner(fast); });
    run(6, "score_quadrature_werner", 1e-6,
        [&] { return check_score_quadrature_werner(fast); });
    run(6, "score_defining_relations_random", 1e-10,
        [&] { return check_defining_relations(fast); });
    run(6, "score_quadrature_random", 1e-6, [&] { return check_quadrature_random(fast); });
    run(7, "measurement_bound_random_povms", 1e-9,
        [&] { return check_measurement_bound(fast); });
    run(7, "ghz_povm_saturation", 1e-10, [&] { return check_ghz_saturation(fast); });
    run(8, "estimator_population_identity", 1e-10,
        [&] { return check_population_identity(); });
    run(8, "cramer_rao_monte_carlo", 0.15, [&] { return check_monte_carlo(fast); });
    run(9, "score_finite_difference", 1e-6,
        [&] { return check_score_finite_difference(fast); });
    run(9, "derivative_finite_difference", 1e-9,
        [&] { return check_derivative_finite_difference(); });
    return results;
}

} // namespace qfisher
