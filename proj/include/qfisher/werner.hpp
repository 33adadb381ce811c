#pragma once

#include <cstdint>

#include "qfisher/hermitian.hpp"

namespace qfisher {

/// Matrix-returning operations refuse dimensions above this cap by default;
/// the closed-form paths (spectrum, thresholds, inverse coefficients) have no
/// such limit.
inline constexpr std::uint64_t kDefaultDenseCap = 1024;

/// N qudits with d levels each; total dimension d^N.
struct QuditSystem {
    QuditSystem(int levels, int particles);

    int d;
    int n;
    std::uint64_t dim;
};

/// Normalized pure state on a qudit system.
struct StateVector {
    StateVector(QuditSystem system, ComplexVector amplitudes);

    QuditSystem system;
    ComplexVector amplitudes;
};

/// Convex mixture of the maximally mixed state and the projector onto the
/// maximally entangled vector: rho(theta) = (1-theta)/D * I + theta |Phi><Phi|.
/// theta is restricted to [0, 1); the state is singular at theta = 1.
class WernerState {
  public:
    WernerState(QuditSystem system, double theta);

    const QuditSystem &system() const noexcept { return system_; }
    double theta() const noexcept { return theta_; }

  private:
    QuditSystem system_;
    double theta_;
};

/// Two-eigenvalue spectrum of a Werner-type state: `bulk` with multiplicity
/// D-1 on the complement of |Phi>, `top` = bulk + theta on |Phi> itself.
struct WernerSpectrum {
    WernerSpectrum(double bulk_eigenvalue, double top_eigenvalue, std::uint64_t dim);

    /// All D eigenvalues in ascending order (dense dimensions only).
    RealVector ascending(std::uint64_t dense_cap = kDefaultDenseCap) const;

    double bulk;
    double top;
    std::uint64_t dim;
};

/// Coefficients of the closed-form inverse: rho^-1 = identity_coeff * I +
/// projector_coeff * |Phi><Phi|. Valid for any dimension.
struct WernerInverseCoefficients {
    double identity;
    double projector;
};

/// The maximally entangled vector (1/sqrt(d)) * sum_m |m m ... m>.
StateVector ghz_vector(const QuditSystem &system);

/// Dense density matrix of the state.
HermitianOperator density(const WernerState &state,
                          std::uint64_t dense_cap = kDefaultDenseCap);

/// d rho / d theta = -(1/D) I + |Phi><Phi|; theta-independent and traceless.
HermitianOperator derivative(const QuditSystem &system,
                             std::uint64_t dense_cap = kDefaultDenseCap);

/// Dense inverse of the density matrix, from the closed-form coefficients.
HermitianOperator inverse(const WernerState &state,
                          std::uint64_t dense_cap = kDefaultDenseCap);

WernerInverseCoefficients werner_inverse_coefficients(const WernerState &state);

WernerSpectrum werner_spectrum(const WernerState &state);

/// theta* = 1/(1 + d^(N-1)); the state is separable exactly for theta < theta*.
double separability_threshold(const QuditSystem &system);

/// Location of the quantum Fisher information minimum: (D-2)/(2(D-1)).
double qfi_minimizer(const QuditSystem &system);

} // namespace qfisher
