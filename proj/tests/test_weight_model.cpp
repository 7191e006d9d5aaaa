#include "mvop/mvop_core.hpp"
#include "mvop/weight_model.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace mvop;
using Catch::Approx;

namespace {

WeightSpec laguerre_pair(double alpha, double beta, double a) {
    return {2, {a}, {ScalarWeightSpec::laguerre(alpha), ScalarWeightSpec::laguerre(beta)}};
}

MatrixPolynomial<Complex> random_poly(std::mt19937& rng, int n, int deg) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Matrix<Complex>> c;
    for (int k = 0; k <= deg; ++k) {
        Matrix<Complex> m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
        c.push_back(m);
    }
    return MatrixPolynomial<Complex>(c);
}

}  // namespace

TEST_CASE("nilpotent pattern", "[weight]") {
    const WeightSpec two{2, {3.0}, {ScalarWeightSpec::hermite(), ScalarWeightSpec::hermite()}};
    Matrix<Complex> expect = Matrix<Complex>::Zero(2, 2);
    expect(0, 1) = 3.0;
    CHECK(build_nilpotent<Complex>(two) == expect);

    const WeightSpec three{3, {1.5, -2.0}, std::vector<ScalarWeightSpec>(3, ScalarWeightSpec::laguerre(0))};
    const auto A3 = build_nilpotent<Complex>(three);
    CHECK(A3(0, 1) == Complex(1.5));
    CHECK(A3(2, 1) == Complex(-2.0));
    CHECK(A3.cwiseAbs().sum() == Approx(3.5));

    for (int N = 2; N <= 9; ++N) {
        WeightSpec s{N, std::vector<double>(static_cast<std::size_t>(N - 1), 1.0),
                     std::vector<ScalarWeightSpec>(static_cast<std::size_t>(N), ScalarWeightSpec::hermite())};
        const auto A = build_nilpotent<Rational>(s);
        CHECK((A * A).isZero());
    }

    const WeightSpec bad{2, {0.0}, {ScalarWeightSpec::hermite(), ScalarWeightSpec::hermite()}};
    try {
        build_nilpotent<Complex>(bad);
        FAIL("expected InvalidParam");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParam);
    }
    const WeightSpec short_spec{3, {1.0}, std::vector<ScalarWeightSpec>(3, ScalarWeightSpec::hermite())};
    CHECK_THROWS_AS(build_nilpotent<Complex>(short_spec), Error);
}

TEST_CASE("T and its inverse", "[weight]") {
    const auto spec = laguerre_pair(0, 0, 1.0);
    const auto t = build_T<Rational>(spec);
    CHECK(t.t * t.t_inv == MatrixPolynomial<Rational>::identity(2));
    const auto tc = build_T<Complex>(spec);
    CHECK(tc.t.evaluate(Complex(0.0)) == Matrix<Complex>::Identity(2, 2));
    CHECK(tc.t.coeff(1)(0, 1) == Complex(1.0));
}

TEST_CASE("weight evaluation", "[weight]") {
    const double alpha = 0.5, beta = 1.25, a = 0.75;
    const auto spec = laguerre_pair(alpha, beta, a);
    for (double x : {0.1, 1.0, 3.7}) {
        const auto W = weight_eval(spec, x);
        const double e = std::exp(-x);
        CHECK(W(0, 0).real() == Approx(e * (std::pow(x, alpha) + a * a * std::pow(x, beta + 2))));
        CHECK(W(0, 1).real() == Approx(e * a * std::pow(x, beta + 1)));
        CHECK(W(1, 0).real() == Approx(e * a * std::pow(x, beta + 1)));
        CHECK(W(1, 1).real() == Approx(e * std::pow(x, beta)));
    }
    CHECK(weight_eval(spec, -1.0).isZero());

    const WeightSpec herm{2, {2.0}, {ScalarWeightSpec::hermite(0.3), ScalarWeightSpec::hermite(-0.4)}};
    CHECK(weight_eval(herm, 0.0).isApprox(Matrix<Complex>::Identity(2, 2)));

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 4.0);
    const WeightSpec mixed{2, {1.0}, {ScalarWeightSpec::hermite(1.0), ScalarWeightSpec::laguerre(0.5)}};
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        const auto W = weight_eval(mixed, x);
        CHECK((W - W.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Matrix<Complex>> es(W);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12 * W.trace().real());
    }
}

TEST_CASE("inner products", "[weight]") {
    SECTION("moment values") {
        InnerProductEngine<Complex> eng(laguerre_pair(0, 0, 1.0));
        const auto G = eng.inner_product(MatrixPolynomial<Complex>::identity(2), MatrixPolynomial<Complex>::identity(2));
        CHECK(G(0, 0).real() == Approx(3.0).epsilon(1e-14));
        CHECK(G(0, 1).real() == Approx(1.0).epsilon(1e-14));
        CHECK(G(1, 0).real() == Approx(1.0).epsilon(1e-14));
        CHECK(G(1, 1).real() == Approx(1.0).epsilon(1e-14));

        InnerProductEngine<Rational> ex(laguerre_pair(0, 0, 1.0));
        Matrix<Rational> expect(2, 2);
        expect << 3, 1, 1, 1;
        CHECK(ex.inner_product(MatrixPolynomial<Rational>::identity(2), MatrixPolynomial<Rational>::identity(2)) == expect);
    }
    SECTION("conjugate symmetry and sesquilinearity") {
        const WeightSpec spec{3, {0.5, -1.0}, {ScalarWeightSpec::jacobi(0.5, 0.5), ScalarWeightSpec::jacobi(1.0, 0.0),
                                                ScalarWeightSpec::jacobi(0.0, 2.0)}};
        InnerProductEngine<Complex> eng(spec);
        std::mt19937 rng(2);
        for (int t = 0; t < 5; ++t) {
            const auto P = random_poly(rng, 3, 4), Q = random_poly(rng, 3, 3), R = random_poly(rng, 3, 5);
            const auto pq = eng.inner_product(P, Q);
            CHECK((pq - eng.inner_product(Q, P).adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * pq.cwiseAbs().maxCoeff());
            const Complex s(0.3, -1.2);
            const auto lhs = eng.inner_product(s * P + R, Q);
            const Matrix<Complex> rhs = s * pq + eng.inner_product(R, Q);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-11 * rhs.cwiseAbs().maxCoeff());
        }
    }
    SECTION("quadrature agrees with exact moments") {
        const WeightSpec spec{2, {2.0}, {ScalarWeightSpec::laguerre(1.0), ScalarWeightSpec::laguerre(3.0)}};
        InnerProductEngine<Complex> eng(spec);
        InnerProductEngine<Rational> ex(spec);
        std::mt19937 rng(9);
        std::uniform_int_distribution<int> d(-5, 5);
        std::vector<Matrix<Rational>> cq;
        std::vector<Matrix<Complex>> cc;
        for (int k = 0; k <= 6; ++k) {
            Matrix<Rational> m(2, 2);
            for (int i = 0; i < 4; ++i) m.data()[i] = d(rng);
            cq.push_back(m);
            cc.push_back(to_complex<Rational>(m));
        }
        const auto G = eng.inner_product(MatrixPolynomial<Complex>(cc), MatrixPolynomial<Complex>(cc));
        const auto Gx = ex.inner_product(MatrixPolynomial<Rational>(cq), MatrixPolynomial<Rational>(cq));
        // the exact engine reports units of mu_0(w_1) = Gamma(2) = 1
        CHECK((G - to_complex<Rational>(Gx)).cwiseAbs().maxCoeff() <= 1e-12 * G.cwiseAbs().maxCoeff());
    }
    SECTION("mixed supports against direct integration of W") {
        const WeightSpec spec{2, {1.0}, {ScalarWeightSpec::hermite(1.0), ScalarWeightSpec::laguerre(0.5)}};
        InnerProductEngine<Complex> eng(spec);
        std::mt19937 rng(4);
        const auto P = random_poly(rng, 2, 2), Q = random_poly(rng, 2, 2);
        const auto G = eng.inner_product(P, Q);
        // integrand P W Q^* by composite Simpson on the two pieces of the support
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                auto f = [&](double x) {
                    const Matrix<Complex> v = P.evaluate(Complex(x)) * weight_eval(spec, x) * Q.evaluate(Complex(x)).adjoint();
                    return v(i, j);
                };
                auto re = [&](double x) { return f(x).real(); };
                auto im = [&](double x) { return f(x).imag(); };
                // x^{1/2} at 0 limits Simpson accuracy, so the right piece is substituted x = s^2
                auto re2 = [&](double s) { return 2 * s * re(s * s); };
                auto im2 = [&](double s) { return 2 * s * im(s * s); };
                const Complex ref(oracle::simpson(re, -12.0, 0.0, 20000) + oracle::simpson(re2, 0.0, 8.0, 20000),
                                  oracle::simpson(im, -12.0, 0.0, 20000) + oracle::simpson(im2, 0.0, 8.0, 20000));
                CHECK(std::abs(G(i, j) - ref) <= 1e-8 * G.cwiseAbs().maxCoeff());
            }
    }
    SECTION("degree cap") {
        InnerProductEngine<Complex> eng(laguerre_pair(0, 0, 1.0));
        const auto big = MatrixPolynomial<Complex>::monomial(Matrix<Complex>::Identity(2, 2), 1100);
        try {
            eng.inner_product(big, big);
            FAIL("expected DegreeCap");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegreeCap);
        }
    }
}

TEST_CASE("exact engine needs rational moment ratios", "[weight]") {
    CHECK_THROWS_AS(InnerProductEngine<Rational>(laguerre_pair(0, 0.5, 1.0)), Error);
    CHECK_NOTHROW(InnerProductEngine<Rational>(laguerre_pair(0.5, 1.5, 1.0)));
}

TEST_CASE("orthogonality of Q_0 and Q_1", "[weight]") {
    MVOPSequence<Complex> seq(laguerre_pair(0, 0.5, 2.0), 4);
    const auto G = seq.engine().inner_product(seq.build_Q(0), seq.build_Q(1));
    CHECK(G.cwiseAbs().maxCoeff() <= 1e-12 * seq.gram(0, 0).cwiseAbs().maxCoeff());
}
