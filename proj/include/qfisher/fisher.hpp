#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qfisher/hermitian.hpp"
#include "qfisher/rng.hpp"
#include "qfisher/werner.hpp"

namespace qfisher {

/// Positive operator-valued measure: elements E_alpha >= 0 with
/// sum_alpha E_alpha = I. The public constructor validates both conditions;
/// the factory functions build elements that are positive by construction and
/// only re-check completeness.
class Povm {
  public:
    explicit Povm(std::vector<HermitianOperator> elements,
                  std::vector<std::string> labels = {});

    /// Rank-one projectors onto the columns of a unitary, grouped by
    /// `partition` (a partition of the column indices into outcomes).
    static Povm from_unitary_columns(const ComplexMatrix &unitary,
                                     const std::vector<std::vector<int>> &partition);

    /// Two-outcome projective measurement {P, I - P} of a projector P.
    static Povm binary_projective(const HermitianOperator &projector,
                                  std::string label_in = "in",
                                  std::string label_out = "out");

    static Povm computational_basis(Eigen::Index dim);

    /// The single sure outcome {I}; carries no information about any parameter.
    static Povm trivial(Eigen::Index dim);

    std::size_t size() const noexcept { return elements_.size(); }
    Eigen::Index dim() const noexcept { return elements_.front().dim(); }
    const HermitianOperator &element(std::size_t i) const { return elements_.at(i); }
    const std::string &label(std::size_t i) const { return labels_.at(i); }

  private:
    struct Unchecked {};
    Povm(Unchecked, std::vector<HermitianOperator> elements, std::vector<std::string> labels);

    void check_completeness() const;
    void default_labels();

    std::vector<HermitianOperator> elements_;
    std::vector<std::string> labels_;
};

/// Fisher quantities of one measurement at one parameter point.
struct FisherReport {
    double theta = 0.0;
    double quantum_sld = 0.0;
    double quantum_rld = 0.0;
    double classical = 0.0;
    double cr_bound = 0.0; // 1 / quantum_sld
};

/// Quantum Fisher information tr[rho L^2] with the symmetric logarithmic
/// derivative L.
double qfi_sld(const HermitianOperator &rho, const HermitianOperator &drho);

/// Right-logarithmic-derivative variant tr[L^dagger rho L]; coincides with
/// qfi_sld whenever rho and drho commute.
double qfi_rld(const HermitianOperator &rho, const HermitianOperator &drho);

/// Closed form for the Werner family: (D-1) / ((1-theta)(1+(D-1)theta)).
double werner_qfi_closed_form(const QuditSystem &system, double theta);

/// Classical Fisher information sum_alpha (dp_alpha)^2 / p_alpha of the
/// outcome distribution p_alpha = tr[E_alpha rho].
double classical_fisher(const Povm &povm, const HermitianOperator &rho,
                        const HermitianOperator &drho);

/// Same, from precomputed probabilities and their theta-derivatives.
/// Outcomes with p <= 1e-15 are skipped when |dp| <= 1e-12 (they contribute
/// nothing in the limit) and rejected otherwise.
double classical_fisher(std::span<const double> probabilities,
                        std::span<const double> sensitivities);

/// Lower bound 1/(n * fisher) on the variance of an unbiased estimate from n
/// independent samples.
double cramer_rao_bound(double fisher, std::uint64_t n_samples);

/// Uhlmann fidelity F(sigma, rho) = [tr (sqrt(sigma) rho sqrt(sigma))^(1/2)]^2.
/// Uses the overlap shortcut tr(sigma rho) when sigma is pure.
double fidelity(const HermitianOperator &sigma, const HermitianOperator &rho);

/// Closed form for the Werner family against |Phi><Phi|: (1 - theta + D theta)/D.
double werner_fidelity_closed_form(const QuditSystem &system, double theta);

/// Outcome probabilities tr[E_alpha rho] (real parts; valid inputs make the
/// imaginary parts vanish).
std::vector<double> outcome_probabilities(const Povm &povm, const HermitianOperator &rho);

/// Outcome sensitivities tr[E_alpha drho].
std::vector<double> outcome_sensitivities(const Povm &povm, const HermitianOperator &drho);

/// The measurement {P_Phi, I - P_Phi} that saturates the quantum bound on the
/// Werner family.
Povm ghz_projective_povm(const QuditSystem &system,
                         std::uint64_t dense_cap = kDefaultDenseCap);

/// Seeded random POVM: Haar-random unitary column projectors, optionally
/// coarse-grained into two outcomes at a random split point.
Povm random_povm(Eigen::Index dim, Philox2x64 &gen, bool coarse_grain);

/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix).
ComplexMatrix random_unitary(Eigen::Index dim, Philox2x64 &gen);

/// Golden-section search for the minimum of a unimodal function on [a, b],
/// followed by one parabolic vertex refinement: near a flat minimum the
/// bracket alone cannot resolve the argmin below ~sqrt(eps).
double golden_section_minimize(const std::function<double(double)> &f, double a,
                               double b, double xtol);

namespace detail {

/// The general Uhlmann route, with no pure-state shortcut; exposed so tests
/// and verification can cross-check the shortcut against it.
double fidelity_uhlmann(const HermitianOperator &sigma, const HermitianOperator &rho);

} // namespace detail

} // namespace qfisher
