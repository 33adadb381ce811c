#include "qfisher/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qfisher {

namespace {

constexpr double kProbabilityFloor = 1e-15;

void check_estimator_invariants(const Estimator &estimator, std::span<const double> p,
                                std::span<const double> dp) {
    double mean = 0.0;
    double sensitivity = 0.0;
    for (std::size_t alpha = 0; alpha < p.size(); ++alpha) {
        mean += p[alpha] * estimator.values[alpha];
        sensitivity += dp[alpha] * estimator.values[alpha];
    }
    if (std::abs(mean - estimator.anchor_theta) > 1e-10) {
        std::ostringstream msg;
        msg << "estimator is not locally unbiased: mean " << mean << " vs anchor "
            << estimator.anchor_theta;
        throw ValidationError(msg.str());
    }
    if (std::abs(sensitivity - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << "estimator does not have unit sensitivity: " << sensitivity;
        throw ValidationError(msg.str());
    }
}

} // namespace

Estimator build_estimator(const Povm &povm, const QuditSystem &system, double theta0,
                          std::uint64_t dense_cap) {
    const WernerState state(system, theta0);
    const HermitianOperator rho = density(state, dense_cap);
    const HermitianOperator drho = derivative(system, dense_cap);
    const std::vector<double> p = outcome_probabilities(povm, rho);
    const std::vector<double> dp = outcome_sensitivities(povm, drho);

    const double fisher = classical_fisher(p, dp);
    // A measurement whose information is zero up to rounding cannot anchor the
    // 1/J_A construction.
    if (!(fisher > 1e-12)) {
        std::ostringstream msg;
        msg << "uninformative measurement: classical Fisher information is " << fisher
            << ", no estimator can be built";
        throw DomainError(msg.str());
    }

    Estimator estimator;
    estimator.anchor_theta = theta0;
    estimator.values.resize(povm.size(), theta0);
    for (std::size_t alpha = 0; alpha < povm.size(); ++alpha) {
        if (p[alpha] > kProbabilityFloor) {
            estimator.values[alpha] = theta0 + (dp[alpha] / p[alpha]) / fisher;
        }
        // Below-floor outcomes keep value theta0; they are never sampled in
        // practice and contribute nothing to the constraints.
    }
    check_estimator_invariants(estimator, p, dp);
    return estimator;
}

double population_variance(const Estimator &estimator, std::span<const double> probabilities) {
    if (probabilities.size() != estimator.values.size()) {
        throw DimensionError("population_variance: outcome count mismatch");
    }
    double variance = 0.0;
    for (std::size_t alpha = 0; alpha < probabilities.size(); ++alpha) {
        const double dev = estimator.values[alpha] - estimator.anchor_theta;
        variance += probabilities[alpha] * dev * dev;
    }
    return variance;
}

std::vector<std::uint64_t> sample_outcomes(std::span<const double> probabilities,
                                           std::uint64_t n_shots, Philox2x64 &gen) {
    if (probabilities.empty()) {
        throw ValidationError("sample_outcomes: empty distribution");
    }
    double sum = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0)) {
            std::ostringstream msg;
            msg << "sample_outcomes: negative probability " << p;
            throw ValidationError(msg.str());
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << "sample_outcomes: probabilities sum to " << sum << ", not 1";
        throw ValidationError(msg.str());
    }

    // Exact renormalization, then a cumulative table closed at exactly 1.
    std::vector<double> cumulative(probabilities.size());
    double running = 0.0;
    for (std::size_t alpha = 0; alpha < probabilities.size(); ++alpha) {
        running += probabilities[alpha] / sum;
        cumulative[alpha] = running;
    }
    cumulative.back() = 1.0;

    std::vector<std::uint64_t> counts(probabilities.size(), 0);
    for (std::uint64_t shot = 0; shot < n_shots; ++shot) {
        const double u = uniform_unit(gen);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        counts[static_cast<std::size_t>(it - cumulative.begin())]++;
    }
    return counts;
}

std::vector<std::uint64_t> sample_outcomes(std::span<const double> probabilities,
                                           std::uint64_t n_shots, std::uint64_t seed) {
    Philox2x64 gen(seed, 0);
    return sample_outcomes(probabilities, n_shots, gen);
}

EstimationReport run_experiment(const QuditSystem &system, double theta_true,
                                const Povm &povm, std::uint64_t n_shots,
                                std::uint64_t n_trials, std::uint64_t seed,
                                std::uint64_t dense_cap) {
    if (n_shots < 1 || n_trials < 1) {
        throw DomainError("run_experiment requires n_shots >= 1 and n_trials >= 1");
    }
    const WernerState state(system, theta_true);
    const HermitianOperator rho = density(state, dense_cap);
    const HermitianOperator drho = derivative(system, dense_cap);
    const std::vector<double> p = outcome_probabilities(povm, rho);
    const std::vector<double> dp = outcome_sensitivities(povm, drho);

    const Estimator estimator = build_estimator(povm, system, theta_true, dense_cap);
    const double fisher_classical = classical_fisher(p, dp);
    const double fisher_quantum = qfi_sld(rho, drho);
    const double fisher_quantum_rld = qfi_rld(rho, drho);

    std::vector<double> trial_means(n_trials, 0.0);
    for (std::uint64_t trial = 0; trial < n_trials; ++trial) {
        Philox2x64 gen(seed, trial);
        const std::vector<std::uint64_t> counts = sample_outcomes(p, n_shots, gen);
        double total = 0.0;
        for (std::size_t alpha = 0; alpha < counts.size(); ++alpha) {
            total += static_cast<double>(counts[alpha]) * estimator.values[alpha];
        }
        trial_means[trial] = total / static_cast<double>(n_shots);
    }

    const double mean =
        std::accumulate(trial_means.begin(), trial_means.end(), 0.0) /
        static_cast<double>(n_trials);
    double variance = 0.0;
    if (n_trials > 1) {
        for (double m : trial_means) {
            variance += (m - mean) * (m - mean);
        }
        variance /= static_cast<double>(n_trials - 1);
    }

    EstimationReport report;
    report.theta_true = theta_true;
    report.n_shots = n_shots;
    report.n_trials = n_trials;
    report.seed = seed;
    report.estimate_mean = mean;
    report.estimate_variance = variance;
    report.classical_bound = cramer_rao_bound(fisher_classical, n_shots);
    report.quantum_bound = cramer_rao_bound(fisher_quantum, n_shots);
    report.fisher.theta = theta_true;
    report.fisher.quantum_sld = fisher_quantum;
    report.fisher.quantum_rld = fisher_quantum_rld;
    report.fisher.classical = fisher_classical;
    report.fisher.cr_bound = 1.0 / fisher_quantum;
    if (report.fisher.classical > report.fisher.quantum_sld + 1e-9) {
        throw Error("internal: classical Fisher information exceeded the quantum bound");
    }
    return report;
}

} // namespace qfisher
