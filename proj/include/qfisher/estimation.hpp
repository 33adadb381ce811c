#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qfisher/fisher.hpp"
#include "qfisher/rng.hpp"
#include "qfisher/werner.hpp"

namespace qfisher {

/// Locally unbiased estimator anchored at theta0: outcome values
/// theta_hat(alpha) = theta0 + (dp_alpha / p_alpha) / J_A. By construction
/// sum_alpha p_alpha theta_hat(alpha) = theta0 and
/// sum_alpha dp_alpha theta_hat(alpha) = 1.
struct Estimator {
    double anchor_theta = 0.0;
    std::vector<double> values; // one per outcome, in POVM label order
};

/// Aggregate record of one Monte Carlo estimation experiment.
struct EstimationReport {
    double theta_true = 0.0;
    std::uint64_t n_shots = 0;
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    double estimate_mean = 0.0;
    double estimate_variance = 0.0; // unbiased across-trial variance
    double classical_bound = 0.0;   // 1 / (n_shots * J_A)
    double quantum_bound = 0.0;     // 1 / (n_shots * J)
    FisherReport fisher;
};

Estimator build_estimator(const Povm &povm, const QuditSystem &system, double theta0,
                          std::uint64_t dense_cap = kDefaultDenseCap);

/// Population variance sum_alpha p_alpha (theta_hat(alpha) - anchor)^2 of a
/// single shot; equals 1/J_A exactly for the locally unbiased estimator.
double population_variance(const Estimator &estimator, std::span<const double> probabilities);

/// Multinomial sampling by inverse CDF in fixed outcome order. The
/// distribution is renormalized exactly before sampling; identical
/// (seed, n_shots, distribution) inputs give identical counts.
std::vector<std::uint64_t> sample_outcomes(std::span<const double> probabilities,
                                           std::uint64_t n_shots, std::uint64_t seed);

/// Same, drawing from an existing generator stream.
std::vector<std::uint64_t> sample_outcomes(std::span<const double> probabilities,
                                           std::uint64_t n_shots, Philox2x64 &gen);

/// Full Cramer-Rao experiment: sample POVM outcomes from the Werner state at
/// theta_true, estimate with the locally unbiased estimator anchored there,
/// and aggregate mean and variance across trials. Trial t draws from stream
/// (seed, t), so trials are independent and the report does not depend on
/// evaluation order.
EstimationReport run_experiment(const QuditSystem &system, double theta_true,
                                const Povm &povm, std::uint64_t n_shots,
                                std::uint64_t n_trials, std::uint64_t seed,
                                std::uint64_t dense_cap = kDefaultDenseCap);

} // namespace qfisher
