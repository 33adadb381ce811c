#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfisher/fisher.hpp"
#include "qfisher/hermitian.hpp"
#include "qfisher/rng.hpp"
#include "qfisher/werner.hpp"

using namespace qfisher;

namespace {

ComplexMatrix random_hermitian(Eigen::Index dim, Philox2x64 &gen) {
    ComplexMatrix g(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            g(r, c) = Complex(standard_normal(gen), standard_normal(gen));
        }
    }
    return (g + g.adjoint()) / 2.0;
}

ComplexMatrix random_positive_definite(Eigen::Index dim, Philox2x64 &gen) {
    const ComplexMatrix u = random_unitary(dim, gen);
    RealVector eigenvalues(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        eigenvalues(i) = 0.5 + uniform_unit(gen);
    }
    return u * eigenvalues.asDiagonal() * u.adjoint();
}

// Integer-valued complex entries make every entry of a triple Kronecker
// product exactly representable, so associativity can be checked bit-for-bit.
ComplexMatrix random_integer_matrix(Eigen::Index dim, Philox2x64 &gen) {
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            const double re = static_cast<double>(static_cast<int>(gen() % 9)) - 4.0;
            const double im = static_cast<double>(static_cast<int>(gen() % 9)) - 4.0;
            m(r, c) = Complex(re, im);
        }
    }
    return m;
}

} // namespace

TEST_CASE("kron of identities is the identity") {
    const ComplexMatrix i2 = identity_matrix(2);
    CHECK((kron(i2, i2) - identity_matrix(4)).norm() == 0.0);
}

TEST_CASE("kron of diagonal matrices") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    b(0, 0) = 3.0;
    b(1, 1) = 4.0;
    const ComplexMatrix k = kron(a, b);
    CHECK(k(0, 0) == Complex(3.0));
    CHECK(k(1, 1) == Complex(4.0));
    CHECK(k(2, 2) == Complex(6.0));
    CHECK(k(3, 3) == Complex(8.0));
    CHECK(k.cwiseAbs().sum() == doctest::Approx(21.0).epsilon(1e-15));
}

TEST_CASE("kron of two bit-flips is the antidiagonal") {
    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    const ComplexMatrix k = kron(x, x);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            CHECK(k(i, j) == Complex(i + j == 3 ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("kron index convention puts the left factor most significant") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 1) = 5.0;
    ComplexMatrix b = ComplexMatrix::Zero(3, 3);
    b(2, 0) = 7.0;
    const ComplexMatrix k = kron(a, b);
    CHECK(k(0 * 3 + 2, 1 * 3 + 0) == Complex(35.0));
    CHECK(k.cwiseAbs().sum() == doctest::Approx(35.0));
}

TEST_CASE("kron rejects non-square factors") {
    CHECK_THROWS_AS(kron(ComplexMatrix::Zero(2, 3), identity_matrix(2)), DimensionError);
    CHECK_THROWS_AS(kron(identity_matrix(2), ComplexMatrix::Zero(3, 2)), DimensionError);
}

TEST_CASE("kron is associative, bit-exactly, on integer-valued matrices") {
    Philox2x64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_integer_matrix(2, gen);
        const ComplexMatrix b = random_integer_matrix(3, gen);
        const ComplexMatrix c = random_integer_matrix(2, gen);
        const ComplexMatrix left = kron(kron(a, b), c);
        const ComplexMatrix right = kron(a, kron(b, c));
        CHECK((left - right).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("trace of kron factorizes") {
    Philox2x64 gen(8);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_hermitian(3, gen);
        const ComplexMatrix b = random_hermitian(4, gen);
        const Complex lhs = kron(a, b).trace();
        const Complex rhs = a.trace() * b.trace();
        CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("HermitianOperator rejects non-Hermitian input") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0; // no conjugate partner
    CHECK_THROWS_AS(HermitianOperator{m}, ValidationError);
    CHECK_THROWS_AS(HermitianOperator(ComplexMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("eigh trivial spectra") {
    CHECK(eigh(HermitianOperator(identity_matrix(3))).eigenvalues.isConstant(1.0));

    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = -1.0;
    const EigenDecomposition eig = eigh(HermitianOperator(d));
    CHECK(eig.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eig.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-14));

    ComplexMatrix x = ComplexMatrix::Zero(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    const EigenDecomposition pauli = eigh(HermitianOperator(x));
    CHECK(pauli.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(pauli.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigh reconstruction and unitarity residuals on random matrices") {
    Philox2x64 gen(9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 63);
        const ComplexMatrix h = random_hermitian(dim, gen);
        const HermitianOperator op(h);
        const EigenDecomposition eig = eigh(op);
        const ComplexMatrix reconstructed =
            eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.adjoint();
        CHECK((reconstructed - op.matrix()).norm() <=
              1e-10 * std::max(1.0, op.matrix().norm()));
        CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors - identity_matrix(dim)).norm() <=
              1e-10);
    }
}

TEST_CASE("spectral_function applies scalar maps to the spectrum") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const HermitianOperator root =
        spectral_function(HermitianOperator(d), [](double x) { return std::sqrt(x); }, "sqrt");
    CHECK(root.matrix()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(root.matrix()(1, 1).real() == doctest::Approx(3.0).epsilon(1e-14));

    const HermitianOperator half(identity_matrix(8) / 2.0);
    const HermitianOperator log_half =
        spectral_function(half, [](double x) { return std::log(x); }, "ln");
    CHECK((log_half.matrix() + std::log(2.0) * identity_matrix(8)).norm() <= 1e-12);
}

TEST_CASE("spectral_function logarithm of a Werner state") {
    const QuditSystem sys(2, 2);
    const HermitianOperator rho = density(WernerState(sys, 0.5));
    const HermitianOperator log_rho =
        spectral_function(rho, [](double x) { return std::log(x); }, "ln");
    const RealVector values = eigh(log_rho).eigenvalues;
    for (int i = 0; i < 3; ++i) {
        CHECK(values(i) == doctest::Approx(std::log(1.0 / 8.0)).epsilon(1e-12));
    }
    CHECK(values(3) == doctest::Approx(std::log(5.0 / 8.0)).epsilon(1e-12));
}

TEST_CASE("spectral_function with the identity map returns the input") {
    Philox2x64 gen(10);
    const ComplexMatrix h = random_hermitian(12, gen);
    const HermitianOperator op(h);
    const HermitianOperator same =
        spectral_function(op, [](double x) { return x; }, "id");
    CHECK((same.matrix() - op.matrix()).norm() <= 1e-12 * std::max(1.0, op.matrix().norm()));
}

TEST_CASE("spectral_function names the offending eigenvalue") {
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(1, 1) = 1.0; // eigenvalue 0 is outside the log domain
    try {
        spectral_function(HermitianOperator(d), [](double x) { return std::log(x); }, "ln");
        FAIL("expected DomainError");
    } catch (const DomainError &e) {
        CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
        CHECK(std::string(e.what()).find("ln") != std::string::npos);
    }
}

TEST_CASE("exp undoes ln on positive definite matrices") {
    Philox2x64 gen(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 15);
        const HermitianOperator op(random_positive_definite(dim, gen));
        const HermitianOperator log_op =
            spectral_function(op, [](double x) { return std::log(x); }, "ln");
        const HermitianOperator round_trip =
            spectral_function(log_op, [](double x) { return std::exp(x); }, "exp");
        CHECK((round_trip.matrix() - op.matrix()).norm() <= 1e-9 * op.matrix().norm());
    }
}

TEST_CASE("trace_product basics") {
    const QuditSystem sys(2, 2);
    const HermitianOperator rho = density(WernerState(sys, 0.7));
    CHECK(trace_product(HermitianOperator(identity_matrix(4)), rho).real() ==
          doctest::Approx(1.0).epsilon(1e-14));

    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    b(0, 0) = 3.0;
    b(1, 1) = 4.0;
    CHECK(trace_product(HermitianOperator(a), HermitianOperator(b)).real() ==
          doctest::Approx(11.0).epsilon(1e-15));

    CHECK_THROWS_AS(
        trace_product(HermitianOperator(identity_matrix(2)), HermitianOperator(identity_matrix(3))),
        DimensionError);
}

TEST_CASE("trace_product of the entangled projector with a Werner state is the fidelity") {
    const QuditSystem sys(2, 2);
    const StateVector phi = ghz_vector(sys);
    const HermitianOperator projector(phi.amplitudes * phi.amplitudes.adjoint());
    const HermitianOperator rho = density(WernerState(sys, 1.0 / 3.0));
    const Complex overlap = trace_product(projector, rho);
    CHECK(overlap.real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(overlap.imag()) <= 1e-12);
    CHECK(overlap.real() ==
          doctest::Approx(werner_fidelity_closed_form(sys, 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("trace_product is real for Hermitian pairs") {
    Philox2x64 gen(12);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator a(random_hermitian(6, gen));
        const HermitianOperator b(random_hermitian(6, gen));
        CHECK(std::abs(trace_product(a, b).imag()) <= 1e-12);
    }
}
