#include "mvop/darboux.hpp"

#include <cmath>
#include <cstdlib>

namespace mvop {

namespace {

template <class R>
R real_param(double v) {
    if constexpr (is_exact_v<R>) {
        return to_rational(v);
    } else {
        return v;
    }
}

/// Scalar operator d^2 F2 + d F1 + F0 as polynomial coefficients.
template <class R>
struct ScalarOp {
    Polynomial<R> F0, F1, F2;

    ScalarOp scaled(const R& c) const { return {c * F0, c * F1, c * F2}; }
};

template <class R>
struct LadderData {
    std::vector<Polynomial<R>> F;
    Polynomial<R> factor;
    int dn;
    int dalpha;
};

template <class R>
LadderData<R> ladder_data(LadderKind kind, const R& a) {
    using P = Polynomial<R>;
    switch (kind) {
        case LadderKind::AlphaUp: return {{P{R(1)}, P{R(-1)}}, P{R(1)}, 0, 1};
        case LadderKind::AlphaDown: return {{P{a}, P{R(0), R(1)}}, P{a, R(1)}, 0, -1};
        case LadderKind::NUp:
            return {{P{-a - 1, R(1)}, P{a + 1, R(-2)}, P{R(0), R(1)}}, P{R(1)}, 1, 0};
        case LadderKind::NDown: return {{P{R(0)}, P{R(1)}}, P{R(0), R(1)}, -1, 1};
        case LadderKind::Eigen: return {{P{R(0)}, P{a + 1, R(-1)}, P{R(0), R(1)}}, P{R(0), R(-1)}, 0, 0};
    }
    fail(ErrorCode::InvalidParam, "unknown ladder kind");
}

template <class T>
MatrixDiffOperator<T> scalar_operator(const std::vector<Polynomial<real_t<T>>>& F) {
    std::vector<MatrixPolynomial<T>> out;
    for (const auto& f : F) out.push_back(MatrixPolynomial<T>::diagonal({f}));
    return MatrixDiffOperator<T>(std::move(out));
}

template <class T, class R = real_t<T>>
Polynomial<R> apply_scalar(const Polynomial<R>& p, const MatrixDiffOperator<T>& op) {
    Polynomial<R> out;
    for (int j = 0; j <= op.order(); ++j) {
        std::vector<R> c;
        for (const auto& m : op.coeff(j).coeffs()) {
            if constexpr (is_exact_v<R>) {
                c.push_back(m(0, 0));
            } else {
                c.push_back(m(0, 0).real());
            }
        }
        out = out + p.derivative(j) * Polynomial<R>(c);
    }
    return out;
}

/// Monic Laguerre polynomials l_0..l_{n_max} of parameter alpha.
template <class R>
std::vector<Polynomial<R>> laguerre_monic(const R& alpha, int n_max) {
    std::vector<Polynomial<R>> out{Polynomial<R>{R(1)}};
    if (n_max >= 1) out.push_back(Polynomial<R>{-(alpha + 1), R(1)});
    for (int n = 1; n < n_max; ++n) {
        // l_{n+1} = (x - (2n + alpha + 1)) l_n - n (n + alpha) l_{n-1}
        const auto& ln = out[static_cast<std::size_t>(n)];
        const auto& lm = out[static_cast<std::size_t>(n - 1)];
        out.push_back(Polynomial<R>{-(R(2 * n + 1) + alpha), R(1)} * ln - (R(n) * (R(n) + alpha)) * lm);
    }
    return out;
}

template <class R>
bool close(const Polynomial<R>& a, const Polynomial<R>& b, double tol) {
    if constexpr (is_exact_v<R>) {
        return a == b;
    } else {
        return relative_difference(a, b) <= tol;
    }
}

/// l_n^(alpha) . op = factor(n) l_{n+dn}^(alpha+dalpha) for n = 0..n_max.
template <class T>
void verify_shift(const MatrixDiffOperator<T>& op, const real_t<T>& alpha, int dn, const real_t<T>& dalpha,
                  const Polynomial<real_t<T>>& factor, int n_max, double tol, const char* what) {
    using R = real_t<T>;
    const auto src = laguerre_monic<R>(alpha, n_max);
    const auto dst = laguerre_monic<R>(alpha + dalpha, n_max + std::max(dn, 0));
    for (int n = 0; n <= n_max; ++n) {
        const auto lhs = apply_scalar<T>(src[static_cast<std::size_t>(n)], op);
        const int target = n + dn;
        const R f = factor(R(n));
        const auto rhs = target < 0 ? Polynomial<R>{} : f * dst[static_cast<std::size_t>(target)];
        if (!close(lhs, rhs, tol))
            fail(ErrorCode::CheckError, std::string(what) + " fails its shift identity at n = " + std::to_string(n));
    }
}

}  // namespace

std::string_view to_string(LadderKind k) {
    switch (k) {
        case LadderKind::AlphaUp: return "alpha_up";
        case LadderKind::AlphaDown: return "alpha_down";
        case LadderKind::NUp: return "n_up";
        case LadderKind::NDown: return "n_down";
        case LadderKind::Eigen: return "eigen";
    }
    return "unknown";
}

template <class T>
LadderOperator<T> ladder(LadderKind kind, double alpha) {
    using R = real_t<T>;
    const auto d = ladder_data<R>(kind, real_param<R>(alpha));
    if (!(alpha > -1.0) || !(alpha + d.dalpha > -1.0))
        fail(ErrorCode::InvalidParam, std::string(to_string(kind)) + " needs alpha and the shifted alpha above -1");

    const auto exact = ladder_data<Rational>(kind, to_rational(alpha));
    verify_shift<Rational>(scalar_operator<Rational>(exact.F), to_rational(alpha), exact.dn, Rational(exact.dalpha),
                           exact.factor, 8, 0.0, "ladder");

    return {kind, alpha, scalar_operator<T>(d.F), d.factor, d.dn, d.dalpha};
}

template <class T>
ShiftOperator<T> synthesize_shift(double alpha, int k, int m, const Polynomial<real_t<T>>& r1,
                                  const Polynomial<real_t<T>>& r2) {
    using R = real_t<T>;
    if (std::abs(k) + std::abs(m) > kMaxShift)
        fail(ErrorCode::CapExceeded, "shift synthesis is capped at |k| + |m| <= " + std::to_string(kMaxShift));
    if (!(alpha > -1.0) || !(alpha + k > -1.0)) fail(ErrorCode::InvalidParam, "alpha and alpha + k must exceed -1");
    if (r2.is_zero()) fail(ErrorCode::InvalidParam, "r2 must be nonzero");

    // r1(-delta_alpha) by Horner on operators
    const auto minus_delta = scalar_operator<T>({Polynomial<R>{}, Polynomial<R>{-(real_param<R>(alpha) + 1), R(1)},
                                                 Polynomial<R>{R(0), R(-1)}});
    auto tau = scalar_operator<T>({Polynomial<R>{r1.leading()}});
    for (int j = r1.degree() - 1; j >= 0; --j)
        tau = op_compose(tau, minus_delta) + scalar_operator<T>({Polynomial<R>{r1.coeff(j)}});

    Polynomial<R> f{R(1)};
    int offset = 0;
    double cur = alpha;
    auto step = [&](LadderKind kind) {
        const auto l = ladder<T>(kind, cur);
        tau = op_compose(tau, l.op);
        f = f * shifted(l.factor, R(offset));
        offset += l.dn;
        cur += l.dalpha;
    };
    for (int i = 0; i < m; ++i) step(LadderKind::NUp);
    for (int i = 0; i < -m; ++i) step(LadderKind::NDown);
    const int remaining = k - std::max(0, -m);
    for (int i = 0; i < remaining; ++i) step(LadderKind::AlphaUp);
    for (int i = 0; i < -remaining; ++i) step(LadderKind::AlphaDown);

    ShiftOperator<T> out{tau, r2 * f, r1 * f};
    verify_shift<T>(out.tau, real_param<R>(alpha), m, R(k), out.factor, 10, 1e-10, "synthesized shift");
    return out;
}

template <class T>
BuiltinN5<T> builtin_n5_laguerre(double alpha, const std::vector<double>& a) {
    using R = real_t<T>;
    using P = Polynomial<R>;
    if (!(alpha > -1.0)) fail(ErrorCode::InvalidParam, "alpha must exceed -1");
    if (a.size() != 4) fail(ErrorCode::SizeMismatch, "the five-weight example takes four a parameters");
    WeightSpec spec{5, a,
                    {ScalarWeightSpec::laguerre(alpha), ScalarWeightSpec::laguerre(alpha),
                     ScalarWeightSpec::laguerre(alpha + 1), ScalarWeightSpec::laguerre(alpha + 1),
                     ScalarWeightSpec::laguerre(alpha + 2)}};
    spec.validate();

    const R al = real_param<R>(alpha);
    std::vector<R> ar;
    for (double v : a) ar.push_back(real_param<R>(v));

    auto n_up = [](const R& b) { return ScalarOp<R>{P{-b - 1, R(1)}, P{b + 1, R(-2)}, P{R(0), R(1)}}; };
    // d^2 x + d(b + 1)
    auto lower_even = [](const R& b) { return ScalarOp<R>{P{}, P{b + 1}, P{R(0), R(1)}}; };
    // d x - (x - b - 1)
    auto lower_odd = [](const R& b) { return ScalarOp<R>{P{b + 1, R(-1)}, P{R(0), R(1)}, P{}}; };
    const ScalarOp<R> d{P{}, P{R(1)}, P{}};
    const ScalarOp<R> one{P{R(1)}, P{}, P{}};

    std::vector<std::vector<ScalarOp<R>>> e(5, std::vector<ScalarOp<R>>(5, ScalarOp<R>{}));
    for (int i = 0; i < 5; ++i) e[i][i] = one;
    e[0][1] = n_up(al).scaled(ar[0]);
    e[1][0] = lower_even(al).scaled(-ar[0]);
    e[1][2] = d.scaled(-ar[1]);
    e[2][1] = lower_odd(al).scaled(-ar[1]);
    e[2][3] = n_up(al + 1).scaled(ar[2]);
    e[3][2] = lower_even(al + 1).scaled(-ar[2]);
    e[3][4] = d.scaled(-ar[3]);
    e[4][3] = lower_odd(al + 1).scaled(-ar[3]);

    std::vector<MatrixPolynomial<T>> F;
    for (auto part : {&ScalarOp<R>::F0, &ScalarOp<R>::F1, &ScalarOp<R>::F2}) {
        std::vector<std::vector<P>> entries(5, std::vector<P>(5));
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) entries[i][j] = e[i][j].*part;
        F.push_back(MatrixPolynomial<T>::from_entries(entries));
    }
    const MatrixDiffOperator<T> D1_tilde(std::move(F));

    const auto t = build_T<T>(spec);
    const auto D1 = op_compose(D1_tilde, MatrixDiffOperator<T>::multiplication(t.t_inv));
    const MatrixDiffOperator<T> two = Matrix<T>(T(2) * Matrix<T>::Identity(5, 5)) * MatrixDiffOperator<T>::identity(5);
    const auto D2 = op_compose(MatrixDiffOperator<T>::multiplication(t.t), two - D1_tilde);
    return {spec, D1_tilde, D1, D2, op_compose(D1, D2), op_compose(D2, D1)};
}

template <class T>
HermiteFactorization<T> hermite_A_factorization(const WeightSpec& spec) {
    spec.validate();
    for (const auto& s : spec.scalars)
        if (!(s == ScalarWeightSpec::hermite()))
            fail(ErrorCode::Unsupported, "the A-Hermite factorization needs every scalar weight equal to e^{-x^2}");
    const int N = spec.N;
    const Matrix<T> A = build_nilpotent<T>(spec);
    const Matrix<T> As = conj_transpose<T>(A);
    const Matrix<T> I = Matrix<T>::Identity(N, N);
    const Matrix<T> Z = Matrix<T>::Zero(N, N);
    const T half = T(1) / T(2);
    const Matrix<T> AAs = A * As, AsA = As * A;
    const Matrix<T> sym = half * (A + As);
    const Matrix<T> S = -(AAs + AsA) / T(4);
    const Matrix<T> F0 = half * AAs + I;

    using MP = MatrixPolynomial<T>;
    auto lin = [](const Matrix<T>& c0, const Matrix<T>& c1) { return MP(std::vector<Matrix<T>>{c0, c1}); };
    HermiteFactorization<T> out;
    out.D1 = MatrixDiffOperator<T>({MP::identity(N), lin(Matrix<T>(-sym), Matrix<T>(half * AsA))});
    out.D2 = MatrixDiffOperator<T>({MP::constant(F0), lin(sym, Matrix<T>(half * AAs))});
    out.D = MatrixDiffOperator<T>({MP::constant(F0), lin(Z, Matrix<T>(T(-2) * S)), MP::constant(S)});
    out.D_swapped = MatrixDiffOperator<T>(
        {MP::constant(F0), lin(Matrix<T>(-half * AAs * A), Matrix<T>(half * (AAs + AsA))), MP::constant(S)});
    return out;
}

template <class T>
DarbouxReport darboux_verify(const std::function<MatrixPolynomial<T>(int)>& P, const MatrixDiffOperator<T>& D1,
                             const std::function<MatrixPolynomial<T>(int)>& Q, int n_max, double tol) {
    DarbouxReport r;
    r.n_max = n_max;
    r.tol = tol;
    const int tail = (n_max + 1) / 2;
    for (int n = 0; n <= n_max; ++n) {
        const auto Pn = P(n), Qn = Q(n);
        if (Pn.size() != D1.size() || Qn.size() != D1.size()) fail(ErrorCode::SizeMismatch, "darboux sizes differ");
        const auto L = op_apply(Pn, D1);
        Matrix<T> inv;
        if (!try_inverse<T>(Qn.coeff(Qn.degree()), inv))
            fail(ErrorCode::SingularLeading, "Q_" + std::to_string(n) + " has a singular leading coefficient");
        const Matrix<T> An = L.coeff(Qn.degree()) * inv;
        const auto rhs = An * Qn;
        const double scale = std::max({L.max_coeff(), rhs.max_coeff(), Qn.max_coeff(), 1e-300});

        DarbouxEntry e;
        e.n = n;
        e.residual = (L - rhs).max_coeff() / scale;
        e.A_n = to_complex<T>(An);
        e.det_abs = magnitude(determinant<T>(An));
        if constexpr (is_exact_v<T>) {
            e.nonsingular = !is_zero(determinant<T>(An));
        } else {
            const auto sv = Eigen::JacobiSVD<Matrix<Complex>>(e.A_n).singularValues();
            e.nonsingular = sv(0) > 0.0 && sv(sv.size() - 1) > 1e-12 * sv(0);
        }
        if (!e.nonsingular) {
            ++r.singular_count;
            if (n >= tail) r.pass = false;
        }
        if (r.worst_n < 0 || e.residual > r.worst || std::isnan(e.residual)) {
            r.worst = e.residual;
            r.worst_n = n;
        }
        if (!(e.residual <= tol)) r.pass = false;
        r.entries.push_back(std::move(e));
    }
    return r;
}

#define MVOP_INSTANTIATE(T)                                                                                      \
    template LadderOperator<T> ladder<T>(LadderKind, double);                                                    \
    template ShiftOperator<T> synthesize_shift<T>(double, int, int, const Polynomial<real_t<T>>&,                \
                                                  const Polynomial<real_t<T>>&);                                 \
    template BuiltinN5<T> builtin_n5_laguerre<T>(double, const std::vector<double>&);                           \
    template HermiteFactorization<T> hermite_A_factorization<T>(const WeightSpec&);                              \
    template DarbouxReport darboux_verify<T>(const std::function<MatrixPolynomial<T>(int)>&,                     \
                                             const MatrixDiffOperator<T>&,                                       \
                                             const std::function<MatrixPolynomial<T>(int)>&, int, double);

MVOP_INSTANTIATE(Complex)
MVOP_INSTANTIATE(Rational)

#undef MVOP_INSTANTIATE

}  // namespace mvop
