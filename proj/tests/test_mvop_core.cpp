#include "mvop/mvop_core.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace mvop;
using Catch::Approx;

namespace {

WeightSpec pair_of(ScalarWeightSpec w1, ScalarWeightSpec w2, double a) { return {2, {a}, {w1, w2}}; }

WeightSpec laguerre_chain(double alpha, int N) {
    WeightSpec s{N, std::vector<double>(static_cast<std::size_t>(N - 1), 1.0), {}};
    for (int i = 0; i < N; ++i) s.scalars.push_back(ScalarWeightSpec::laguerre(alpha + i / 2));
    return s;
}

Matrix<Complex> mat2(Complex a, Complex b, Complex c, Complex d) {
    Matrix<Complex> m(2, 2);
    m << a, b, c, d;
    return m;
}

double rel_err(const Matrix<Complex>& got, const Matrix<Complex>& want) {
    return (got - want).norm() / want.norm();
}

}  // namespace

TEST_CASE("P_n is the diagonal of scalar monic polynomials", "[core]") {
    MVOPSequence<Complex> lag(pair_of(ScalarWeightSpec::laguerre(0), ScalarWeightSpec::laguerre(0), 1.0), 4);
    CHECK(lag.build_P(0) == MatrixPolynomial<Complex>::identity(2));
    const auto P1 = lag.build_P(1);
    CHECK(P1.coeff(0) == Matrix<Complex>(-Matrix<Complex>::Identity(2, 2)));
    CHECK(P1.coeff(1) == Matrix<Complex>::Identity(2, 2));
    MVOPSequence<Complex> her(pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::hermite(0), 1.0), 4);
    const auto P2 = her.build_P(2);
    CHECK(P2.coeff(0) == Matrix<Complex>(-0.5 * Matrix<Complex>::Identity(2, 2)));
    CHECK(P2.coeff(1).isZero());
    CHECK_THROWS_AS(her.build_P(7), Error);
}

TEST_CASE("Q_n for small cases", "[core]") {
    SECTION("Laguerre Q_0") {
        const double alpha = 0.5, beta = 1.5, a = 3.0;
        MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::laguerre(alpha), ScalarWeightSpec::laguerre(beta), a), 6);
        const auto Q0 = s.build_Q(0);
        REQUIRE(Q0.degree() == 0);
        CHECK(Q0.coeff(0).isApprox(mat2(1, -a * (beta + 1), 0, 1)));
        MVOPSequence<Rational> ex(pair_of(ScalarWeightSpec::laguerre(alpha), ScalarWeightSpec::laguerre(beta), a), 6);
        Matrix<Rational> q0(2, 2);
        q0 << 1, Rational(-15, 2), 0, 1;
        CHECK(ex.build_Q(0) == MatrixPolynomial<Rational>::constant(q0));
    }
    SECTION("Hermite Q_0 is the identity") {
        MVOPSequence<Rational> ex(pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::hermite(0), 2.0), 4);
        CHECK(ex.build_Q(0) == MatrixPolynomial<Rational>::identity(2));
    }
    SECTION("Laguerre entry (2,1)") {
        const double alpha = 0.5, beta = 2.5, a = 1.5;
        MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::laguerre(alpha), ScalarWeightSpec::laguerre(beta), a), 12);
        const auto lag = recurrence_coefficients(ScalarWeightSpec::laguerre(alpha), 12);
        for (int n = 1; n <= 10; ++n) {
            const auto Q = s.build_Q(n);
            const double f = -a * n * std::exp(std::lgamma(n + beta + 1) - std::lgamma(n + alpha));
            const auto l = monic_polynomial(lag, n - 1);
            for (int k = 0; k <= n; ++k) {
                const double want = f * l.coeff(k);
                CHECK(std::abs(Q.coeff(k)(1, 0) - want) <= 1e-12 * std::abs(f) * l.max_coeff());
            }
        }
    }
}

TEST_CASE("Q_n T identity and the five-term expansion", "[core]") {
    const WeightSpec spec = laguerre_chain(0.5, 5);
    MVOPSequence<Rational> ex(spec, 10);
    for (int n = 0; n <= 9; ++n) {
        const auto Q = ex.build_Q(n);
        CHECK(Q.degree() == n);
        CHECK(Q * ex.engine().factor().t == ex.build_QT(n));
        CHECK(ex.build_Q_five_term(n) == Q);
    }
    MVOPSequence<Complex> fl(spec, 16);
    for (int n = 0; n <= 15; ++n) {
        const auto Q = fl.build_Q(n);
        CHECK(relative_difference(Q * fl.engine().factor().t, fl.build_QT(n)) <= 1e-11);
        CHECK(relative_difference(fl.build_Q_five_term(n), Q) <= 1e-11);
    }
}

TEST_CASE("continuant determinants", "[core]") {
    CHECK(continuant<Rational>({1}) == 2);
    CHECK(continuant<Rational>({1, 1}) == 3);
    CHECK(continuant<Rational>({1, 1, 1}) == 5);
    // brute force tridiagonal with products of off-diagonals equal to -1
    Matrix<Rational> m(3, 3);
    m << 1, 2, 0, Rational(-1, 2), 1, Rational(-1, 3), 0, 3, 1;
    CHECK(determinant<Rational>(m) == 3);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int N = 2; N <= 8; ++N) {
        std::vector<double> a, dn, dm;
        for (int i = 0; i < N; ++i) {
            dn.push_back(u(rng));
            dm.push_back(u(rng));
        }
        for (int i = 0; i < N - 1; ++i) a.push_back(u(rng));
        WeightSpec s{N, a, std::vector<ScalarWeightSpec>(static_cast<std::size_t>(N), ScalarWeightSpec::hermite())};
        const auto A = build_nilpotent<Complex>(s);
        std::vector<Complex> ac(a.begin(), a.end()), dnc(dn.begin(), dn.end()), dmc(dm.begin(), dm.end());
        const Complex brute = determinant<Complex>(leading_det_matrix<Complex>(A, dnc, dmc));
        const Complex cont = continuant(continuant_rho<Complex>(ac, dnc, dmc));
        CHECK(std::abs(brute - cont) <= 1e-12 * std::abs(cont));
    }
}

TEST_CASE("leading coefficients", "[core]") {
    const WeightSpec spec = laguerre_chain(0.5, 5);
    MVOPSequence<Rational> ex(spec, 8);
    for (int n = 1; n <= 8; ++n) {
        const auto lc = ex.leading_coeff_det(n);
        CHECK(lc.det_direct == lc.det_continuant);
        CHECK(lc.det_matrix == lc.det_continuant);
        CHECK(lc.det_direct >= 1);
    }
    MVOPSequence<Complex> fl(spec, 16);
    for (int n = 0; n <= 15; ++n) {
        const auto lc = fl.leading_coeff_det(n);
        CHECK(std::abs(lc.det_direct - lc.det_continuant) <= 1e-10 * std::abs(lc.det_continuant));
        CHECK(std::abs(lc.det_matrix - lc.det_continuant) <= 1e-10 * std::abs(lc.det_continuant));
        CHECK(lc.det_continuant.real() >= 1.0);
    }
}

TEST_CASE("squared norms", "[core]") {
    const double sp = std::sqrt(std::numbers::pi);
    MVOPSequence<Complex> her(pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::hermite(0), 1.0), 6);
    CHECK(rel_err(her.squared_norm_Q(0), mat2(1.5 * sp, 0, 0, sp)) <= 1e-14);
    CHECK(rel_err(her.squared_norm_Q(1), mat2(sp, 0, 0, 0.75 * sp)) <= 1e-14);

    for (const auto& spec : {pair_of(ScalarWeightSpec::laguerre(0), ScalarWeightSpec::laguerre(0.5), 2.0),
                             pair_of(ScalarWeightSpec::hermite(1), ScalarWeightSpec::hermite(0), 1.0),
                             pair_of(ScalarWeightSpec::jacobi(1.5, 1.5), ScalarWeightSpec::jacobi(0.5, 0.5), 1.0),
                             pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::laguerre(0.5), 1.0),
                             laguerre_chain(0.5, 5)}) {
        MVOPSequence<Complex> s(spec, 16);
        for (int n = 0; n <= 15; ++n) CHECK(rel_err(s.gram(n, n), s.squared_norm_Q(n)) <= 1e-9);
    }
    MVOPSequence<Rational> ex(laguerre_chain(0.5, 3), 8);
    for (int n = 0; n <= 7; ++n) CHECK(ex.gram(n, n) == ex.squared_norm_Q(n));
}

TEST_CASE("orthogonality", "[core]") {
    MVOPSequence<Complex> lag(pair_of(ScalarWeightSpec::laguerre(0), ScalarWeightSpec::laguerre(0.5), 2.0), 13);
    const auto rep = lag.verify_orthogonality(12, 1e-9);
    CHECK(rep.pass);
    CHECK(rep.pairs.size() == 78);
    MVOPSequence<Complex> mixed(pair_of(ScalarWeightSpec::hermite(1), ScalarWeightSpec::laguerre(0), 1.0), 11);
    CHECK(mixed.verify_orthogonality(10, 1e-9).pass);

    MVOPSequence<Rational> ex(pair_of(ScalarWeightSpec::jacobi(1, 1), ScalarWeightSpec::jacobi(0, 0), 0.5), 7);
    for (int n = 0; n <= 6; ++n)
        for (int m = 0; m <= 6; ++m)
            if (n != m) CHECK(ex.gram(n, m).isZero());

    // a perturbed sequence must be caught
    const auto rep2 = lag.verify_orthogonality(3, 1e-300);
    CHECK_FALSE(rep2.pass);
}

TEST_CASE("three-term coefficients", "[core]") {
    SECTION("Hermite") {
        MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::hermite(0), 1.0), 6);
        const auto tt = s.three_term_coefficients(1);
        CHECK(rel_err(tt.A, mat2(1, 0, 0, 0.75)) <= 1e-12);
        CHECK(rel_err(tt.B, mat2(0, 1.0 / 3, 0.25, 0)) <= 1e-12);
        // projection oracle (sympy, exact moments): C_1(1,1) = 2/3
        CHECK(rel_err(tt.C, mat2(2.0 / 3, 0, 0, 0.5)) <= 1e-12);
        CHECK(tt.residual <= 1e-12);
        MVOPSequence<Rational> ex(pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::hermite(0), 1.0), 6);
        const auto te = ex.three_term_coefficients(1);
        Matrix<Rational> a(2, 2);
        a << 1, 0, 0, Rational(3, 4);
        CHECK(te.A == a);
        Matrix<Rational> c(2, 2);
        c << Rational(2, 3), 0, 0, Rational(1, 2);
        CHECK(te.C == c);
        CHECK(te.residual == 0.0);
    }
    SECTION("Laguerre") {
        MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::laguerre(0), ScalarWeightSpec::laguerre(0), 1.0), 6);
        CHECK(rel_err(s.three_term_coefficients(1).A, mat2(1, 0.4, 0, 0.4)) <= 1e-12);
    }
    SECTION("residuals stay small") {
        for (const auto& spec : {laguerre_chain(0.5, 5),
                                 pair_of(ScalarWeightSpec::jacobi(1.5, 1.5), ScalarWeightSpec::jacobi(0.5, 0.5), 1.0),
                                 pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::laguerre(0.5), 1.0)}) {
            MVOPSequence<Complex> s(spec, 16);
            for (int n = 1; n <= 14; ++n) CHECK(s.three_term_coefficients(n).residual <= 1e-9);
        }
    }
    MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::hermite(0), ScalarWeightSpec::hermite(0), 1.0), 6);
    CHECK_THROWS_AS(s.three_term_coefficients(0), Error);
}

TEST_CASE("three-term closed forms", "[core]") {
    SECTION("Laguerre pair, every entry") {
        const double al = 0.0, be = 0.5, a = 2.0;
        MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::laguerre(al), ScalarWeightSpec::laguerre(be), a), 10);
        for (int n = 1; n <= 8; ++n) {
            const double g = std::exp(std::lgamma(n + be + 1) - std::lgamma(n + al));
            const double d1 = g * (n + be + 1) * a * a * (n + 1) + al + n, d2 = g * a * a * n + 1;
            const double t = 1 + be + n * (be - al + 2);
            const auto tt = s.three_term_coefficients(n);
            CHECK(rel_err(tt.A, mat2(1, a * (n + al) * (be - al + 2) / d1, 0, (a * a * g * (n + al) * n + al + n) / d1)) <= 1e-10);
            CHECK(rel_err(tt.B, mat2((g * a * a * (n + 1) * (2 * n + be + 3) * (n + be + 1) + (2 * n + al + 1) * (n + al)) / d1,
                                     a * t / d2, g * a * t / d1, (g * a * a * n * (2 * n + al - 1) + be + 2 * n + 1) / d2)) <= 1e-10);
            CHECK(rel_err(tt.C, mat2(n * (g * a * a * (n + 1) * (n + be + 1) + al + n) / d2, 0, g * a * n * (be - al + 2) / d2,
                                     n * (n + be))) <= 1e-10);
        }
    }
    SECTION("Hermite pair C_n(1,1)") {
        const double b = 1.0, c = 0.0, a = 1.0, e = std::exp(c * c - b * b);
        MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::hermite(b), ScalarWeightSpec::hermite(c), a), 10);
        for (int n = 1; n <= 8; ++n) {
            const double want = n * (e * a * a * (n + 1) + 2) / (2 * (e * a * a * n + 2));
            CHECK(std::abs(s.three_term_coefficients(n).C(0, 0).real() - want) <= 1e-10 * want);
        }
    }
    SECTION("Gegenbauer pair at a = 1, B_n(1,2) and C_n(1,1)") {
        const double r = 0.5;
        MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::jacobi(r + 1, r + 1), ScalarWeightSpec::jacobi(r, r), 1.0), 10);
        for (int n = 1; n <= 8; ++n) {
            const auto tt = s.three_term_coefficients(n);
            const double b12 = (n + 2 * r + 1) * (2 * r + 1) / ((2 * n + 2 * r + 1) * (2 * n + 2 * r + 1) * (2 * n + 2 * r + 3));
            const double c11 = n * (n + 2 * r + 1) / ((2 * n + 2 * r + 1) * (2 * n + 2 * r + 1));
            CHECK(std::abs(tt.B(0, 1).real() - b12) <= 1e-10 * b12);
            CHECK(std::abs(tt.C(0, 0).real() - c11) <= 1e-10 * c11);
        }
    }
}

TEST_CASE("degree cap on large norm ratios", "[core]") {
    // Laguerre norms against a heavily shifted partner overflow the ratio guard
    MVOPSequence<Complex> s(pair_of(ScalarWeightSpec::laguerre(0), ScalarWeightSpec::laguerre(400), 1.0), 4);
    try {
        s.build_Q(2);
        FAIL("expected DegreeCap");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegreeCap);
    }
}
