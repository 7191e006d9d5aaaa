#include "mvop/darboux.hpp"

#include <catch_amalgamated.hpp>

using namespace mvop;

namespace {

using PQ = Polynomial<Rational>;
using PD = Polynomial<double>;
using Opq = MatrixDiffOperator<Rational>;
using MPq = MatrixPolynomial<Rational>;

PQ apply1(const PQ& p, const Opq& op) {
    const auto out = op_apply(MPq::diagonal({p}), op);
    std::vector<Rational> c;
    for (const auto& m : out.coeffs()) c.push_back(m(0, 0));
    return PQ(c);
}

Opq scalar_op(std::vector<PQ> F) {
    std::vector<MPq> out;
    for (const auto& f : F) out.push_back(MPq::diagonal({f}));
    return Opq(out);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::CheckError;
}

}  // namespace

TEST_CASE("ladder operators", "[darboux]") {
    const auto up = ladder<Rational>(LadderKind::NUp, 0.0);
    CHECK(apply1(PQ{1}, up.op) == PQ{-1, 1});
    const auto down = ladder<Rational>(LadderKind::NDown, 0.0);
    CHECK(apply1(PQ{-1, 1}, down.op) == PQ{1});
    CHECK(down.factor(Rational(1)) == 1);
    const auto adown = ladder<Rational>(LadderKind::AlphaDown, 1.0);
    CHECK(apply1(PQ{-2, 1}, adown.op) == PQ{-2, 2});
    CHECK(adown.factor(Rational(1)) == 2);
    CHECK(adown.dalpha == -1);

    for (double alpha : {0.0, 0.5, 1.0, 2.75})
        for (auto kind : {LadderKind::AlphaUp, LadderKind::AlphaDown, LadderKind::NUp, LadderKind::NDown,
                          LadderKind::Eigen}) {
            if (kind == LadderKind::AlphaDown && alpha <= 0.0) continue;
            CHECK_NOTHROW(ladder<Rational>(kind, alpha));
            CHECK_NOTHROW(ladder<Complex>(kind, alpha));
        }
    CHECK(code_of([] { ladder<Rational>(LadderKind::AlphaDown, -0.5); }) == ErrorCode::InvalidParam);
    CHECK(code_of([] { ladder<Complex>(LadderKind::NUp, -1.0); }) == ErrorCode::InvalidParam);
    CHECK(to_string(LadderKind::NUp) == "n_up");
}

TEST_CASE("shift synthesis", "[darboux]") {
    const double alpha = 0.5;
    const auto s10 = synthesize_shift<Rational>(alpha, 1, 0, PQ{1}, PQ{1});
    CHECK(s10.tau == ladder<Rational>(LadderKind::AlphaUp, alpha).op);
    CHECK(s10.q == PQ{1});

    const auto s00 = synthesize_shift<Rational>(alpha, 0, 0, PQ{0, 1}, PQ{1});
    const Rational a = to_rational(alpha);
    CHECK(s00.tau == scalar_op({PQ{}, PQ{-(a + 1), 1}, PQ{0, -1}}));
    CHECK(s00.factor == PQ{0, 1});
    CHECK(s00.q == PQ{1});

    const auto s1m = synthesize_shift<Rational>(alpha, 1, -1, PQ{1}, PQ{1});
    CHECK(s1m.tau == scalar_op({PQ{}, PQ{1}}));
    CHECK(s1m.q == PQ{0, 1});

    for (int k = -2; k <= 3; ++k)
        for (int m = -2; m <= 2; ++m) {
            const auto s = synthesize_shift<Rational>(2.0, k, m, PQ{1, 1}, PQ{2, 1});
            CHECK(s.q * PQ{1, 1} == s.factor * PQ{2, 1});
            const auto f = synthesize_shift<Complex>(2.0, k, m, PD{1, 1}, PD{2, 1});
            CHECK(f.tau.order() == s.tau.order());
        }

    CHECK(code_of([] { synthesize_shift<Rational>(0.5, 4, 3, PQ{1}, PQ{1}); }) == ErrorCode::CapExceeded);
    CHECK(code_of([] { synthesize_shift<Rational>(0.5, -2, 0, PQ{1}, PQ{1}); }) == ErrorCode::InvalidParam);
    CHECK(code_of([] { synthesize_shift<Rational>(0.5, 1, 0, PQ{1}, PQ{0}); }) == ErrorCode::InvalidParam);
}

TEST_CASE("five-weight Laguerre factorization", "[darboux]") {
    const double alpha = 0.5;
    const std::vector<double> ones{1, 1, 1, 1};
    const auto b = builtin_n5_laguerre<Rational>(alpha, ones);
    const Rational a = to_rational(alpha);
    auto entry = [&](int i, int j) {
        std::vector<PQ> F;
        for (const auto& f : b.D1_tilde.coeffs()) {
            std::vector<Rational> c;
            for (const auto& m : f.coeffs()) c.push_back(m(i, j));
            F.push_back(PQ(c));
        }
        return F;
    };
    // a_1 (d^2 x + d(alpha + 1 - 2x) + (x - alpha - 1)) and -a_2 d
    CHECK(entry(0, 1) == std::vector<PQ>{PQ{-a - 1, 1}, PQ{a + 1, -2}, PQ{0, 1}});
    CHECK(entry(1, 2) == std::vector<PQ>{PQ{}, PQ{-1}, PQ{}});
    CHECK(b.spec.scalars[2] == ScalarWeightSpec::laguerre(1.5));
    CHECK(b.spec.scalars[4] == ScalarWeightSpec::laguerre(2.5));

    MVOPSequence<Rational> seq(b.spec, 10);
    for (int n = 0; n <= 10; ++n) {
        CHECK(op_apply(seq.build_P(n), b.D1_tilde) == seq.build_QT(n));
        CHECK(op_apply(seq.build_P(n), b.D1) == seq.build_Q(n));
    }
    CHECK(b.D == op_compose(b.D1, b.D2));

    SECTION("floating point with general a") {
        const auto f = builtin_n5_laguerre<Complex>(0.3, {1.5, -0.5, 2.0, 0.75});
        MVOPSequence<Complex> fs(f.spec, 12);
        for (int n = 0; n <= 10; ++n)
            CHECK(relative_difference(op_apply(fs.build_P(n), f.D1_tilde), fs.build_QT(n)) <= 1e-10);
    }
    SECTION("both products have the sequences as eigenfunctions") {
        const auto rp = eigencheck_inferred<Rational>([&](int n) { return seq.build_P(n); }, b.D, 8, 0.0);
        CHECK(rp.worst == 0.0);
        const auto rq = eigencheck_inferred<Rational>([&](int n) { return seq.build_Q(n); }, b.D_swapped, 8, 0.0);
        CHECK(rq.worst == 0.0);
    }
    CHECK(code_of([] { builtin_n5_laguerre<Complex>(-1.5, {1, 1, 1, 1}); }) == ErrorCode::InvalidParam);
    CHECK(code_of([] { builtin_n5_laguerre<Complex>(0.0, {1, 1, 1}); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("A-Hermite factorization", "[darboux]") {
    const WeightSpec two{2, {1.0}, {ScalarWeightSpec::hermite(), ScalarWeightSpec::hermite()}};
    const auto h = hermite_A_factorization<Rational>(two);
    Matrix<Rational> c0(2, 2), c1(2, 2);
    c0 << 0, Rational(-1, 2), Rational(-1, 2), 0;
    c1 << 0, 0, 0, Rational(1, 2);
    CHECK(h.D1 == Opq({MPq::identity(2), MPq(std::vector<Matrix<Rational>>{c0, c1})}));

    for (int N = 2; N <= 6; ++N) {
        std::vector<double> a;
        for (int i = 1; i < N; ++i) a.push_back(i % 2 ? 0.5 * i : -1.25 * i);
        const WeightSpec spec{N, a, std::vector<ScalarWeightSpec>(static_cast<std::size_t>(N), ScalarWeightSpec::hermite())};
        const auto f = hermite_A_factorization<Rational>(spec);
        CHECK(op_compose(f.D1, f.D2) == f.D);
        CHECK(op_compose(f.D2, f.D1) == f.D_swapped);
        MVOPSequence<Rational> seq(spec, 10);
        for (int n = 0; n <= 10; ++n) CHECK(op_apply(seq.build_P(n), f.D1) == seq.build_Q(n));
        CHECK(op_apply(seq.build_P(0), f.D1) == MPq::identity(N));
    }

    SECTION("darboux criterion") {
        const WeightSpec spec{3, {1.5, -0.75}, std::vector<ScalarWeightSpec>(3, ScalarWeightSpec::hermite())};
        const auto f = hermite_A_factorization<Complex>(spec);
        MVOPSequence<Complex> seq(spec, 12);
        const auto r = darboux_verify(seq, f.D1, 10);
        CHECK(r.pass);
        CHECK(r.singular_count == 0);
        for (const auto& e : r.entries) CHECK(e.nonsingular);
    }
    const WeightSpec shifted{2, {1.0}, {ScalarWeightSpec::hermite(0.5), ScalarWeightSpec::hermite()}};
    CHECK(code_of([&] { hermite_A_factorization<Complex>(shifted); }) == ErrorCode::Unsupported);
}

TEST_CASE("darboux verification", "[darboux]") {
    const auto b = builtin_n5_laguerre<Complex>(0.0, {1, 1, 1, 1});
    MVOPSequence<Complex> seq(b.spec, 10);
    const auto r = darboux_verify(seq, b.D1, 8);
    CHECK(r.pass);
    for (const auto& e : r.entries) CHECK((e.A_n - Matrix<Complex>::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-9);

    std::function<MatrixPolynomial<Complex>(int)> P = [&](int n) { return seq.build_P(n); };
    const auto id = darboux_verify<Complex>(P, MatrixDiffOperator<Complex>::identity(5), P, 8);
    CHECK(id.pass);
    CHECK(id.worst == 0.0);
    for (const auto& e : id.entries) CHECK(e.A_n == Matrix<Complex>::Identity(5, 5));

    const auto zero = darboux_verify<Complex>(P, MatrixDiffOperator<Complex>::zero(5), P, 8);
    CHECK_FALSE(zero.pass);
    CHECK(zero.singular_count == 9);
}
