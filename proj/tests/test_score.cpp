#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "qfisher/fisher.hpp"
#include "qfisher/rng.hpp"
#include "qfisher/score.hpp"
#include "qfisher/werner.hpp"

using namespace qfisher;

namespace {

HermitianOperator diag2(double a, double b) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return HermitianOperator(std::move(m));
}

// The non-commuting reference pair used across the score tests.
HermitianOperator noncommuting_rho() {
    ComplexMatrix m(2, 2);
    m << Complex(0.6), Complex(0.1), Complex(0.1), Complex(0.4);
    return HermitianOperator(std::move(m));
}

HermitianOperator noncommuting_drho() {
    ComplexMatrix m(2, 2);
    m << Complex(0.2), Complex(0.3), Complex(0.3), Complex(-0.2);
    return HermitianOperator(std::move(m));
}

struct RandomPair {
    HermitianOperator rho;
    HermitianOperator drho;
};

RandomPair random_pair(Eigen::Index dim, Philox2x64 &gen, double min_eigenvalue = 0.2) {
    const ComplexMatrix u = random_unitary(dim, gen);
    RealVector eigenvalues(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        eigenvalues(i) = min_eigenvalue + (1.0 - min_eigenvalue) * uniform_unit(gen);
    }
    ComplexMatrix rho = u * eigenvalues.asDiagonal() * u.adjoint();
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

} // namespace

TEST_CASE("sld in a commuting diagonal pair is the elementwise log-derivative") {
    const HermitianOperator l = sld(diag2(0.25, 0.75), diag2(1.0, -1.0));
    CHECK(l.matrix()(0, 0).real() == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(l.matrix()(1, 1).real() == doctest::Approx(-4.0 / 3.0).epsilon(1e-13));
    CHECK(std::abs(l.matrix()(0, 1)) <= 1e-14);
}

TEST_CASE("sld agrees with a brute-force solve of its defining linear system") {
    const HermitianOperator rho = noncommuting_rho();
    const HermitianOperator drho = noncommuting_drho();

    // Solve the 4x4 real linear system for vec(L) directly, with column-major
    // vec(M) index m(row, col) = row + 2 * col:
    // [(rho L + L rho)/2]_{kl} = sum_{ij} A[m(k,l), m(i,j)] L_{ij}.
    Eigen::Matrix4d system = Eigen::Matrix4d::Zero();
    const Eigen::Matrix2d r = rho.matrix().real();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                for (int l = 0; l < 2; ++l) {
                    double value = 0.0;
                    if (l == j) {
                        value += r(k, i) / 2.0; // (rho L) term
                    }
                    if (k == i) {
                        value += r(j, l) / 2.0; // (L rho) term
                    }
                    system(k + 2 * l, i + 2 * j) += value;
                }
            }
        }
    }
    Eigen::Vector4d rhs;
    rhs << drho.matrix()(0, 0).real(), drho.matrix()(1, 0).real(),
        drho.matrix()(0, 1).real(), drho.matrix()(1, 1).real();
    const Eigen::Vector4d solution = system.colPivHouseholderQr().solve(rhs);
    Eigen::Matrix2d expected;
    expected(0, 0) = solution(0);
    expected(1, 0) = solution(1);
    expected(0, 1) = solution(2);
    expected(1, 1) = solution(3);

    const HermitianOperator l = sld(rho, drho);
    CHECK((l.matrix().real() - expected).norm() <= 1e-10);
}

TEST_CASE("sld rejects states that are not positive definite") {
    try {
        sld(HermitianOperator(ComplexMatrix::Zero(2, 2)), diag2(1.0, -1.0));
        FAIL("expected DomainError");
    } catch (const DomainError &e) {
        CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
    }
    CHECK_THROWS_AS(sld(diag2(0.5, 0.5), HermitianOperator(identity_matrix(3))),
                    DimensionError);
}

TEST_CASE("rld equals sld in commuting cases") {
    const ComplexMatrix r = rld(diag2(0.25, 0.75), diag2(1.0, -1.0));
    CHECK(r(0, 0).real() == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(r(1, 1).real() == doctest::Approx(-4.0 / 3.0).epsilon(1e-13));

    const QuditSystem sys(3, 2);
    const HermitianOperator rho = density(WernerState(sys, 0.3));
    const HermitianOperator drho = derivative(sys);
    CHECK((rld(rho, drho) - sld(rho, drho).matrix()).norm() <= 1e-10);
}

TEST_CASE("rld satisfies its defining relation and is genuinely non-Hermitian") {
    const HermitianOperator rho = noncommuting_rho();
    const HermitianOperator drho = noncommuting_drho();
    const ComplexMatrix r = rld(rho, drho);
    CHECK((rho.matrix() * r - drho.matrix()).norm() <= 1e-12);
    CHECK((r - r.adjoint()).norm() > 0.1);
}

TEST_CASE("exact spectral score reduces to the scalar derivative in diagonal cases") {
    const HermitianOperator score = exact_score_spectral(diag2(0.25, 0.75), diag2(1.0, -1.0));
    CHECK(score.matrix()(0, 0).real() == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(score.matrix()(1, 1).real() == doctest::Approx(-4.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("the three scores coincide on the commuting Werner family") {
    for (const auto &[d, n, theta] :
         {std::tuple{2, 2, 1.0 / 3.0}, std::tuple{2, 3, 0.5}, std::tuple{3, 2, 0.3}}) {
        const QuditSystem sys(d, n);
        const HermitianOperator rho = density(WernerState(sys, theta));
        const HermitianOperator drho = derivative(sys);
        const ScoreTriple triple = score_triple(rho, drho);
        CHECK((triple.sld.matrix() - triple.rld).norm() <= 1e-10);
        CHECK((triple.sld.matrix() - triple.exact.matrix()).norm() <= 1e-10);
        CHECK((triple.rld - triple.exact.matrix()).norm() <= 1e-10);
    }
}

TEST_CASE("exact spectral score matches a finite difference of the matrix logarithm") {
    const HermitianOperator rho = noncommuting_rho();
    const HermitianOperator drho = noncommuting_drho();
    const double h = 1e-5;
    const auto log_fn = [](double x) { return std::log(x); };
    const HermitianOperator plus(rho.matrix() + h * drho.matrix());
    const HermitianOperator minus(rho.matrix() - h * drho.matrix());
    const ComplexMatrix fd =
        (spectral_function(plus, log_fn, "ln").matrix() -
         spectral_function(minus, log_fn, "ln").matrix()) /
        (2.0 * h);
    CHECK((fd - exact_score_spectral(rho, drho).matrix()).norm() <= 1e-6);
}

TEST_CASE("quadrature score: scalar case integrates to 1/rho") {
    ComplexMatrix rho(1, 1);
    rho(0, 0) = 0.5;
    ComplexMatrix drho(1, 1);
    drho(0, 0) = 1.0;
    const HermitianOperator score =
        exact_score_quadrature(HermitianOperator(rho), HermitianOperator(drho));
    CHECK(score.matrix()(0, 0).real() == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("quadrature score matches the spectral score") {
    SUBCASE("Werner family") {
        const QuditSystem sys(2, 2);
        const HermitianOperator rho = density(WernerState(sys, 0.4));
        const HermitianOperator drho = derivative(sys);
        CHECK((exact_score_quadrature(rho, drho).matrix() -
               exact_score_spectral(rho, drho).matrix())
                  .norm() <= 1e-6);
    }
    SUBCASE("non-commuting pair") {
        const HermitianOperator rho = noncommuting_rho();
        const HermitianOperator drho = noncommuting_drho();
        CHECK((exact_score_quadrature(rho, drho).matrix() -
               exact_score_spectral(rho, drho).matrix())
                  .norm() <= 1e-6);
    }
}

TEST_CASE("tightening the quadrature tolerance never degrades the result") {
    Philox2x64 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 5);
        const RandomPair pair = random_pair(dim, gen);
        const ComplexMatrix reference = exact_score_spectral(pair.rho, pair.drho).matrix();
        double previous = std::numeric_limits<double>::infinity();
        for (double tol : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
            QuadratureConfig cfg;
            cfg.rel_tol = tol;
            const double distance =
                (exact_score_quadrature(pair.rho, pair.drho, cfg).matrix() - reference).norm();
            CHECK(distance <= std::max(previous, 5e-13));
            previous = distance;
        }
    }
}

TEST_CASE("quadrature reports the achieved residual when the budget is exhausted") {
    const HermitianOperator rho = noncommuting_rho();
    const HermitianOperator drho = noncommuting_drho();
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-30;
    cfg.max_panels = 64;
    try {
        exact_score_quadrature(rho, drho, cfg);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError &e) {
        CHECK(e.achieved_residual() > 0.0);
        CHECK(std::string(e.what()).find("residual") != std::string::npos);
    }
}

TEST_CASE("QuadratureConfig validation") {
    QuadratureConfig cfg;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.inner_order = 1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.max_panels = 4;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("defining relations hold on random positive definite pairs") {
    Philox2x64 gen(32);
    for (int trial = 0; trial < 50; ++trial) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 31);
        const RandomPair pair = random_pair(dim, gen, 0.05);
        const double scale = pair.drho.matrix().norm();
        const HermitianOperator l = sld(pair.rho, pair.drho);
        const ComplexMatrix r = rld(pair.rho, pair.drho);
        CHECK(((pair.rho.matrix() * l.matrix() + l.matrix() * pair.rho.matrix()) / 2.0 -
               pair.drho.matrix())
                  .norm() <= 1e-10 * scale);
        CHECK((pair.rho.matrix() * r - pair.drho.matrix()).norm() <= 1e-10 * scale);
    }
}

TEST_CASE("a traceless direction has vanishing expected score") {
    Philox2x64 gen(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto dim = static_cast<Eigen::Index>(2 + gen() % 7);
        RandomPair pair = random_pair(dim, gen);
        ComplexMatrix traceless = pair.drho.matrix();
        traceless -= (traceless.trace() / static_cast<double>(dim)) * identity_matrix(dim);
        const HermitianOperator direction(std::move(traceless));
        const HermitianOperator l = sld(pair.rho, direction);
        CHECK(std::abs(trace_product(pair.rho, l).real()) <= 1e-10);
    }
}

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly") {
    const auto [nodes, weights] = gauss_legendre(5);
    double integral_x8 = 0.0;
    double total_weight = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        integral_x8 += weights[i] * std::pow(nodes[i], 8);
        total_weight += weights[i];
    }
    CHECK(integral_x8 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(total_weight == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(nodes[0] == doctest::Approx(-nodes[4]).epsilon(1e-15));
}
