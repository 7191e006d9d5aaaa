#include "mvop/diff_operators.hpp"

#include "mvop/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mvop {

namespace {

void check_same_size(int a, int b) {
    if (a != b) fail(ErrorCode::SizeMismatch, "operator sizes differ");
}

long long binomial(int k, int i) {
    long long r = 1;
    for (int t = 1; t <= i; ++t) r = r * (k - i + t) / t;
    return r;
}

template <class R>
bool same_poly(const Polynomial<R>& a, const Polynomial<R>& b) {
    if constexpr (is_exact_v<R>) {
        return a == b;
    } else {
        return relative_difference(a, b) <= 1e-12;
    }
}

template <class R>
R real_param(double v) {
    if constexpr (is_exact_v<R>) {
        return to_rational(v);
    } else {
        return v;
    }
}

std::string poly_text(const Polynomial<double>& p) {
    std::ostringstream os;
    for (int k = p.degree(); k >= 0; --k) {
        os << (k == p.degree() ? "" : " + ") << p.coeff(k);
        if (k > 0) os << "n^" << k;
    }
    return os.str();
}

std::string poly_text(const Polynomial<Rational>& p) {
    std::ostringstream os;
    for (int k = p.degree(); k >= 0; --k) {
        os << (k == p.degree() ? "" : " + ") << p.coeff(k).str();
        if (k > 0) os << "n^" << k;
    }
    return os.str();
}

}  // namespace

template <class T>
MatrixDiffOperator<T>::MatrixDiffOperator(std::vector<MatrixPolynomial<T>> F) : F_(std::move(F)) {
    if (F_.empty()) fail(ErrorCode::SizeMismatch, "operator needs at least one coefficient");
    for (const auto& f : F_) check_same_size(f.size(), F_.front().size());
    double scale = 0.0;
    for (const auto& f : F_) scale = std::max(scale, f.max_coeff());
    while (F_.size() > 1) {
        const auto& top = F_.back();
        const bool drop = is_exact_v<T> ? top.is_zero() : top.max_coeff() <= 1e-13 * scale;
        if (!drop) break;
        F_.pop_back();
    }
}

template <class T>
MatrixDiffOperator<T> MatrixDiffOperator<T>::combine(const MatrixDiffOperator& a, const MatrixDiffOperator& b,
                                                     bool subtract) {
    check_same_size(a.size(), b.size());
    const int m = std::max(a.order(), b.order());
    std::vector<MatrixPolynomial<T>> out;
    for (int j = 0; j <= m; ++j) {
        auto fa = j <= a.order() ? a.coeff(j) : MatrixPolynomial<T>(a.size());
        auto fb = j <= b.order() ? b.coeff(j) : MatrixPolynomial<T>(a.size());
        out.push_back(subtract ? fa - fb : fa + fb);
    }
    return MatrixDiffOperator(std::move(out));
}

template <class T>
MatrixPolynomial<T> op_apply(const MatrixPolynomial<T>& P, const MatrixDiffOperator<T>& D) {
    check_same_size(P.size(), D.size());
    MatrixPolynomial<T> out(P.size());
    for (int j = 0; j <= D.order(); ++j) {
        if (j > P.degree()) break;
        out = out + P.derivative(j) * D.coeff(j);
    }
    return out;
}

template <class T>
MatrixDiffOperator<T> op_compose(const MatrixDiffOperator<T>& D1, const MatrixDiffOperator<T>& D2) {
    check_same_size(D1.size(), D2.size());
    const int n = D1.size();
    std::vector<MatrixPolynomial<T>> H(static_cast<std::size_t>(D1.order() + D2.order()) + 1, MatrixPolynomial<T>(n));
    // d^k (d^j P F_j) G_k = sum_i C(k,i) d^{j+k-i} P d^i(F_j) G_k
    for (int j = 0; j <= D1.order(); ++j)
        for (int k = 0; k <= D2.order(); ++k)
            for (int i = 0; i <= k; ++i) {
                const auto dF = D1.coeff(j).derivative(i);
                if (dF.is_zero()) continue;
                auto term = dF * D2.coeff(k);
                if (const long long c = binomial(k, i); c != 1) term = T(c) * term;
                auto& slot = H[static_cast<std::size_t>(j + k - i)];
                slot = slot + term;
            }
    return MatrixDiffOperator<T>(std::move(H));
}

template <class T>
MatrixDiffOperator<T> conjugate_by_T(const MatrixDiffOperator<T>& D_tilde, const WeightSpec& spec) {
    const auto t = build_T<T>(spec);
    check_same_size(D_tilde.size(), t.t.size());
    const auto product = t.t * t.t_inv;
    const auto id = MatrixPolynomial<T>::identity(spec.N);
    const bool polynomial_inverse = is_exact_v<T> ? product == id : relative_difference(product, id) <= 1e-11;
    if (!polynomial_inverse) fail(ErrorCode::NonPolynomialResult, "T^{-1} = I - Ax does not invert T (A^2 != 0)");
    return op_compose(op_compose(MatrixDiffOperator<T>::multiplication(t.t), D_tilde),
                      MatrixDiffOperator<T>::multiplication(t.t_inv));
}

template <class T>
Matrix<T> EigenvalueMap<T>::at(int n) const {
    const auto N = static_cast<Eigen::Index>(slots.size());
    Matrix<T> out = Matrix<T>::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) out(i, i) = lift(slots[static_cast<std::size_t>(i)](real_t<T>(n)));
    return out;
}

std::string_view to_string(BispectralFamily f) {
    switch (f) {
        case BispectralFamily::Laguerre: return "laguerre";
        case BispectralFamily::Hermite: return "hermite";
        case BispectralFamily::Jacobi: return "jacobi";
        case BispectralFamily::HermiteLaguerre: return "hermite-laguerre";
    }
    return "unknown";
}

BispectralFamily bispectral_family(const WeightSpec& spec) {
    spec.validate();
    for (const auto& s : spec.scalars)
        if (!s.is_classical()) fail(ErrorCode::Unsupported, "no differential operator for a moment-defined weight");
    const auto first = spec.scalars.front().family;
    const bool uniform = std::all_of(spec.scalars.begin(), spec.scalars.end(),
                                     [&](const ScalarWeightSpec& s) { return s.family == first; });
    if (uniform) {
        switch (first) {
            case Family::HermiteShifted: return BispectralFamily::Hermite;
            case Family::Laguerre: return BispectralFamily::Laguerre;
            case Family::Jacobi: return BispectralFamily::Jacobi;
            case Family::CustomMoments: break;
        }
    }
    if (spec.N == 2 && first == Family::HermiteShifted && spec.scalars[1].family == Family::Laguerre)
        return BispectralFamily::HermiteLaguerre;
    fail(ErrorCode::Unsupported, "mixed families other than (hermite, laguerre) with N = 2");
}

template <class T>
Bispectral<T> build_bispectral_operator(const WeightSpec& spec) {
    using R = real_t<T>;
    const auto family = bispectral_family(spec);
    const int N = spec.N;

    std::vector<ScalarDiffOperator<R>> ops;
    for (const auto& s : spec.scalars) ops.push_back(scalar_diff_operator<R>(s));

    auto add_constant = [](ScalarDiffOperator<R>& op, const R& c) {
        op.zeroth = op.zeroth + Polynomial<R>::constant(c);
        op.eigenvalue = op.eigenvalue + Polynomial<R>::constant(c);
    };
    auto scale = [](ScalarDiffOperator<R>& op, const R& c) {
        op.second = c * op.second;
        op.first = c * op.first;
        op.zeroth = c * op.zeroth;
        op.eigenvalue = c * op.eigenvalue;
    };

    switch (family) {
        case BispectralFamily::Laguerre:
            for (int i = 1; i < N; i += 2) add_constant(ops[static_cast<std::size_t>(i)], R(1));
            break;
        case BispectralFamily::Hermite:
            for (int i = 0; i < N; i += 2) add_constant(ops[static_cast<std::size_t>(i)], R(-2));
            break;
        case BispectralFamily::Jacobi: {
            const double s1 = spec.scalars[0].alpha + spec.scalars[0].beta;
            for (int j = 2; j <= N; ++j) {
                const auto& s = spec.scalars[static_cast<std::size_t>(j - 1)];
                const double lhs = s.alpha + s.beta + 1.0 + (j % 2 == 0 ? 1.0 : -1.0);
                if (std::abs(lhs - s1) > 1e-12 * std::max(1.0, std::abs(s1))) {
                    std::ostringstream os;
                    os << "jacobi parameters violate alpha_j + beta_j + 1 + (-1)^j = alpha_1 + beta_1 at j = " << j
                       << " (" << lhs << " vs " << s1 << ")";
                    fail(ErrorCode::ConditionFailed, os.str());
                }
            }
            const R shift = real_param<R>(spec.scalars[0].alpha) + real_param<R>(spec.scalars[0].beta);
            for (int i = 1; i < N; i += 2) add_constant(ops[static_cast<std::size_t>(i)], shift);
            break;
        }
        case BispectralFamily::HermiteLaguerre:
            add_constant(ops[0], R(-2));
            scale(ops[1], R(2));
            break;
    }

    EigenvalueMap<T> Lambda;
    for (const auto& op : ops) Lambda.slots.push_back(op.eigenvalue);

    // A Lambda_{n+1} = Lambda_n A on the support of A
    for (int i = 1; 2 * i <= N; ++i) {
        const auto& odd = Lambda.slots[static_cast<std::size_t>(2 * i - 2)];
        const auto even_next = shifted(Lambda.slots[static_cast<std::size_t>(2 * i - 1)], R(1));
        if (!same_poly(odd, even_next))
            fail(ErrorCode::ConditionFailed, "Lambda_n(delta_" + std::to_string(2 * i - 1) + ") = " + poly_text(odd) +
                                                 " differs from Lambda_{n+1}(delta_" + std::to_string(2 * i) +
                                                 ") = " + poly_text(even_next));
        if (2 * i + 1 <= N) {
            const auto& odd_after = Lambda.slots[static_cast<std::size_t>(2 * i)];
            if (!same_poly(odd_after, even_next))
                fail(ErrorCode::ConditionFailed, "Lambda_n(delta_" + std::to_string(2 * i + 1) + ") = " +
                                                     poly_text(odd_after) + " differs from Lambda_{n+1}(delta_" +
                                                     std::to_string(2 * i) + ") = " + poly_text(even_next));
        }
    }

    std::vector<Polynomial<R>> second, first, zeroth;
    for (const auto& op : ops) {
        second.push_back(op.second);
        first.push_back(op.first);
        zeroth.push_back(op.zeroth);
    }
    MatrixDiffOperator<T> D_tilde({MatrixPolynomial<T>::diagonal(zeroth), MatrixPolynomial<T>::diagonal(first),
                                   MatrixPolynomial<T>::diagonal(second)});
    auto D = conjugate_by_T(D_tilde, spec);
    return {std::move(D), std::move(D_tilde), std::move(Lambda)};
}

namespace {

template <class T>
double eigen_residual(const MatrixPolynomial<T>& Q, const MatrixDiffOperator<T>& D, const Matrix<T>& Lambda) {
    const auto lhs = op_apply(Q, D);
    const auto rhs = Lambda * Q;
    const double scale = std::max({lhs.max_coeff(), rhs.max_coeff(), Q.max_coeff(), 1e-300});
    return (lhs - rhs).max_coeff() / scale;
}

void summarize(EigenReport& r) {
    for (std::size_t n = 0; n < r.residuals.size(); ++n) {
        const double v = r.residuals[n];
        if (r.worst_n < 0 || v > r.worst || std::isnan(v)) {
            r.worst = v;
            r.worst_n = static_cast<int>(n);
        }
        if (!(v <= r.tol)) r.pass = false;
    }
}

}  // namespace

template <class T>
EigenReport eigencheck(const MVOPSequence<T>& seq, const MatrixDiffOperator<T>& D, const EigenvalueMap<T>& Lambda,
                       int n_max, double tol) {
    check_same_size(seq.size(), D.size());
    check_same_size(seq.size(), static_cast<int>(Lambda.slots.size()));
    EigenReport r;
    r.n_max = n_max;
    r.tol = tol;
    r.residuals.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    parallel_for(static_cast<std::size_t>(n_max) + 1, [&](std::size_t n) {
        const int k = static_cast<int>(n);
        r.residuals[n] = eigen_residual(seq.build_Q(k), D, Lambda.at(k));
    });
    summarize(r);
    return r;
}

template <class T>
EigenReport eigencheck_inferred(const std::function<MatrixPolynomial<T>(int)>& family, const MatrixDiffOperator<T>& D,
                                int n_max, double tol, std::vector<Matrix<T>>* lambdas) {
    EigenReport r;
    r.n_max = n_max;
    r.tol = tol;
    if (lambdas) lambdas->clear();
    for (int n = 0; n <= n_max; ++n) {
        const auto F = family(n);
        check_same_size(F.size(), D.size());
        Matrix<T> inv;
        if (!try_inverse<T>(F.coeff(F.degree()), inv))
            fail(ErrorCode::SingularLeading, "leading coefficient of degree " + std::to_string(n) + " is singular");
        const Matrix<T> Lambda = op_apply(F, D).coeff(F.degree()) * inv;
        if (lambdas) lambdas->push_back(Lambda);
        r.residuals.push_back(eigen_residual(F, D, Lambda));
    }
    summarize(r);
    return r;
}

template <class T>
double commutation_residual(const MVOPSequence<T>& seq, const EigenvalueMap<T>& Lambda_tilde, int n) {
    const Matrix<T>& A = seq.nilpotent();
    auto rel = [](const Matrix<T>& a, const Matrix<T>& b) {
        const double scale = std::max({max_abs<T>(a), max_abs<T>(b), 1e-300});
        return max_abs<T>(Matrix<T>(a - b)) / scale;
    };
    const Matrix<T> L0 = Lambda_tilde.at(n), L1 = Lambda_tilde.at(n + 1);
    double worst = rel(A * L1, L0 * A);
    if (n >= 1) {
        const Matrix<T> R = seq.norm_ratio(n);
        const Matrix<T> Lm = Lambda_tilde.at(n - 1);
        worst = std::max(worst, rel(R * Lm, L0 * R));
    }
    return worst;
}

#define MVOP_INSTANTIATE(T)                                                                                        \
    template class MatrixDiffOperator<T>;                                                                          \
    template struct EigenvalueMap<T>;                                                                              \
    template MatrixPolynomial<T> op_apply<T>(const MatrixPolynomial<T>&, const MatrixDiffOperator<T>&);            \
    template MatrixDiffOperator<T> op_compose<T>(const MatrixDiffOperator<T>&, const MatrixDiffOperator<T>&);      \
    template MatrixDiffOperator<T> conjugate_by_T<T>(const MatrixDiffOperator<T>&, const WeightSpec&);             \
    template Bispectral<T> build_bispectral_operator<T>(const WeightSpec&);                                        \
    template EigenReport eigencheck<T>(const MVOPSequence<T>&, const MatrixDiffOperator<T>&,                       \
                                       const EigenvalueMap<T>&, int, double);                                      \
    template EigenReport eigencheck_inferred<T>(const std::function<MatrixPolynomial<T>(int)>&,                    \
                                                const MatrixDiffOperator<T>&, int, double, std::vector<Matrix<T>>*); \
    template double commutation_residual<T>(const MVOPSequence<T>&, const EigenvalueMap<T>&, int);

MVOP_INSTANTIATE(Complex)
MVOP_INSTANTIATE(Rational)

#undef MVOP_INSTANTIATE

}  // namespace mvop
