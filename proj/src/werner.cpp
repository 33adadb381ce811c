#include "qfisher/werner.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qfisher {

namespace {

void check_dense_cap(std::uint64_t dim, std::uint64_t dense_cap, const char *what) {
    if (dim > dense_cap) {
        std::ostringstream msg;
        msg << what << ": dimension " << dim << " exceeds the dense cap " << dense_cap
            << "; use the closed-form paths (werner_spectrum, werner_inverse_coefficients, "
               "separability_threshold, qfi_minimizer) instead";
        throw CapacityError(msg.str());
    }
}

ComplexMatrix ghz_projector(const QuditSystem &system) {
    const StateVector phi = ghz_vector(system);
    return phi.amplitudes * phi.amplitudes.adjoint();
}

} // namespace

QuditSystem::QuditSystem(int levels, int particles) : d(levels), n(particles), dim(1) {
    if (levels < 2) {
        throw ValidationError("QuditSystem requires at least 2 levels per particle");
    }
    if (particles < 2) {
        throw ValidationError("QuditSystem requires at least 2 particles");
    }
    const auto base = static_cast<std::uint64_t>(levels);
    for (int i = 0; i < particles; ++i) {
        if (dim > std::numeric_limits<std::uint64_t>::max() / base) {
            std::ostringstream msg;
            msg << "dimension " << levels << "^" << particles << " overflows 64 bits";
            throw ValidationError(msg.str());
        }
        dim *= base;
    }
}

StateVector::StateVector(QuditSystem sys, ComplexVector amps)
    : system(sys), amplitudes(std::move(amps)) {
    if (static_cast<std::uint64_t>(amplitudes.size()) != system.dim) {
        std::ostringstream msg;
        msg << "StateVector length " << amplitudes.size() << " does not match dimension "
            << system.dim;
        throw DimensionError(msg.str());
    }
    const double norm2 = amplitudes.squaredNorm();
    if (std::abs(norm2 - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "StateVector is not normalized: |amplitudes|^2 = " << norm2;
        throw ValidationError(msg.str());
    }
}

WernerState::WernerState(QuditSystem system, double theta) : system_(system), theta_(theta) {
    if (!(theta >= 0.0 && theta < 1.0)) {
        std::ostringstream msg;
        msg << "mixing parameter theta = " << theta
            << " must lie in [0, 1); the state is pure and non-invertible at theta = 1";
        throw DomainError(msg.str());
    }
}

WernerSpectrum::WernerSpectrum(double bulk_eigenvalue, double top_eigenvalue, std::uint64_t d)
    : bulk(bulk_eigenvalue), top(top_eigenvalue), dim(d) {
    const double trace = static_cast<double>(dim - 1) * bulk + top;
    if (std::abs(trace - 1.0) > 1e-14) {
        std::ostringstream msg;
        msg << "WernerSpectrum does not sum to unit trace: " << trace;
        throw ValidationError(msg.str());
    }
    if (!(bulk > 0.0) || !(top > 0.0)) {
        throw ValidationError("WernerSpectrum eigenvalues must be positive");
    }
}

RealVector WernerSpectrum::ascending(std::uint64_t dense_cap) const {
    check_dense_cap(dim, dense_cap, "WernerSpectrum::ascending");
    RealVector values(static_cast<Eigen::Index>(dim));
    values.setConstant(bulk);
    values(static_cast<Eigen::Index>(dim) - 1) = top;
    return values;
}

StateVector ghz_vector(const QuditSystem &system) {
    const auto dim = static_cast<Eigen::Index>(system.dim);
    ComplexVector amps = ComplexVector::Zero(dim);
    // |m m ... m> sits at index m * (d^(N-1) + ... + d + 1), particle 1 most
    // significant.
    const std::uint64_t stride = (system.dim - 1) / static_cast<std::uint64_t>(system.d - 1);
    const double amp = 1.0 / std::sqrt(static_cast<double>(system.d));
    for (int m = 0; m < system.d; ++m) {
        amps(static_cast<Eigen::Index>(static_cast<std::uint64_t>(m) * stride)) = amp;
    }
    return StateVector(system, std::move(amps));
}

HermitianOperator density(const WernerState &state, std::uint64_t dense_cap) {
    const QuditSystem &sys = state.system();
    check_dense_cap(sys.dim, dense_cap, "density");
    const auto dim = static_cast<Eigen::Index>(sys.dim);
    const double mixed = (1.0 - state.theta()) / static_cast<double>(sys.dim);
    ComplexMatrix rho = mixed * identity_matrix(dim) + state.theta() * ghz_projector(sys);
    return HermitianOperator(std::move(rho));
}

HermitianOperator derivative(const QuditSystem &system, std::uint64_t dense_cap) {
    check_dense_cap(system.dim, dense_cap, "derivative");
    const auto dim = static_cast<Eigen::Index>(system.dim);
    ComplexMatrix drho =
        ghz_projector(system) - identity_matrix(dim) / static_cast<double>(system.dim);
    return HermitianOperator(std::move(drho));
}

WernerInverseCoefficients werner_inverse_coefficients(const WernerState &state) {
    const double dim = static_cast<double>(state.system().dim);
    const double theta = state.theta();
    const double identity = dim / (1.0 - theta);
    const double projector =
        -dim * dim * theta / ((1.0 - theta) * (1.0 + (dim - 1.0) * theta));
    return {identity, projector};
}

HermitianOperator inverse(const WernerState &state, std::uint64_t dense_cap) {
    const QuditSystem &sys = state.system();
    check_dense_cap(sys.dim, dense_cap, "inverse");
    const auto dim = static_cast<Eigen::Index>(sys.dim);
    const WernerInverseCoefficients coeff = werner_inverse_coefficients(state);
    ComplexMatrix inv =
        coeff.identity * identity_matrix(dim) + coeff.projector * ghz_projector(sys);
    return HermitianOperator(std::move(inv));
}

WernerSpectrum werner_spectrum(const WernerState &state) {
    const double dim = static_cast<double>(state.system().dim);
    const double bulk = (1.0 - state.theta()) / dim;
    return WernerSpectrum(bulk, bulk + state.theta(), state.system().dim);
}

double separability_threshold(const QuditSystem &system) {
    // d^(N-1) = dim / d, exactly, in integer arithmetic.
    const std::uint64_t partial = system.dim / static_cast<std::uint64_t>(system.d);
    return 1.0 / (1.0 + static_cast<double>(partial));
}

double qfi_minimizer(const QuditSystem &system) {
    const double dim = static_cast<double>(system.dim);
    return (dim - 2.0) / (2.0 * (dim - 1.0));
}

} // namespace qfisher
