#include "mvop/weight_model.hpp"

#include <cmath>

namespace mvop {

void WeightSpec::validate() const {
    if (N < 2) fail(ErrorCode::InvalidParam, "weight size N must be at least 2");
    if (static_cast<int>(a_params.size()) != N - 1)
        fail(ErrorCode::SizeMismatch, "expected " + std::to_string(N - 1) + " off-diagonal parameters, got " +
                                          std::to_string(a_params.size()));
    if (static_cast<int>(scalars.size()) != N)
        fail(ErrorCode::SizeMismatch,
             "expected " + std::to_string(N) + " scalar weights, got " + std::to_string(scalars.size()));
    for (std::size_t i = 0; i < a_params.size(); ++i)
        if (a_params[i] == 0.0 || !std::isfinite(a_params[i]))
            fail(ErrorCode::InvalidParam, "a_" + std::to_string(i + 1) + " must be a nonzero real");
    for (const auto& s : scalars) s.validate();
}

bool WeightSpec::all_classical() const {
    for (const auto& s : scalars)
        if (!s.is_classical()) return false;
    return true;
}

template <class T>
Matrix<T> build_nilpotent(const WeightSpec& spec) {
    spec.validate();
    Matrix<T> A = Matrix<T>::Zero(spec.N, spec.N);
    for (int p = 0; p < spec.N - 1; ++p) {
        const T a = from_real<T>(spec.a_params[static_cast<std::size_t>(p)]);
        if (p % 2 == 0) {
            A(p, p + 1) = a;
        } else {
            A(p + 1, p) = a;
        }
    }
    return A;
}

template <class T>
TFactor<T> build_T(const WeightSpec& spec) {
    const Matrix<T> A = build_nilpotent<T>(spec);
    const Matrix<T> I = Matrix<T>::Identity(spec.N, spec.N);
    return {MatrixPolynomial<T>(std::vector<Matrix<T>>{I, A}),
            MatrixPolynomial<T>(std::vector<Matrix<T>>{I, Matrix<T>(-A)})};
}

Matrix<Complex> weight_eval(const WeightSpec& spec, double x) {
    const auto t = build_T<Complex>(spec);
    Matrix<Complex> Tx = t.t.evaluate(Complex(x));
    Matrix<Complex> D = Matrix<Complex>::Zero(spec.N, spec.N);
    for (int k = 0; k < spec.N; ++k) {
        const auto& s = spec.scalars[static_cast<std::size_t>(k)];
        if (s.support().contains(x)) D(k, k) = s.evaluate(x);
    }
    return Tx * D * Tx.adjoint();
}

template <class T>
InnerProductEngine<T>::InnerProductEngine(WeightSpec spec) : spec_(std::move(spec)), t_(build_T<T>(spec_)) {
    if constexpr (is_exact_v<T>) {
        if (!spec_.all_classical()) fail(ErrorCode::Unsupported, "the exact backend needs classical weights");
        moments_.resize(static_cast<std::size_t>(spec_.N));
        for (int k = 0; k < spec_.N; ++k) {
            auto r = exact_moment0_ratio(spec_.scalars[static_cast<std::size_t>(k)], spec_.scalars[0]);
            if (!r)
                fail(ErrorCode::Unsupported, "zeroth moments of " + describe(spec_.scalars[static_cast<std::size_t>(k)]) +
                                                 " and " + describe(spec_.scalars[0]) + " have no rational ratio");
            unit_ratio_.push_back(*r);
        }
    }
}

template <class T>
std::shared_ptr<const GaussRule> InnerProductEngine<T>::rule(int k, int m) const {
    if (m > kMaxGaussNodes)
        fail(ErrorCode::DegreeCap, "inner product needs " + std::to_string(m) + " Gauss nodes (cap " +
                                       std::to_string(kMaxGaussNodes) + ")");
    {
        std::lock_guard lock(mutex_);
        auto it = rules_.find({k, m});
        if (it != rules_.end()) return it->second;
    }
    auto r = std::make_shared<const GaussRule>(gauss_rule(spec_.scalars.at(static_cast<std::size_t>(k)), m));
    std::lock_guard lock(mutex_);
    return rules_.emplace(std::pair{k, m}, std::move(r)).first->second;
}

template <class T>
Matrix<T> InnerProductEngine<T>::inner_product(const MatrixPolynomial<T>& P, const MatrixPolynomial<T>& Q) const {
    if (P.size() != spec_.N || Q.size() != spec_.N)
        fail(ErrorCode::SizeMismatch, "polynomial size does not match the weight");
    return inner_product_tilde(P * t_.t, Q * t_.t);
}

namespace {

// Column k of a matrix polynomial evaluated at real x.
Eigen::VectorXcd column_at(const MatrixPolynomial<Complex>& p, int k, double x) {
    const auto& c = p.coeffs();
    Eigen::VectorXcd acc = c.back().col(k);
    for (auto it = c.rbegin() + 1; it != c.rend(); ++it) acc = acc * x + it->col(k);
    return acc;
}

}  // namespace

template <class T>
Matrix<T> InnerProductEngine<T>::inner_product_tilde(const MatrixPolynomial<T>& PT, const MatrixPolynomial<T>& QT) const {
    const int N = spec_.N;
    if (PT.size() != N || QT.size() != N) fail(ErrorCode::SizeMismatch, "polynomial size does not match the weight");
    Matrix<T> out = Matrix<T>::Zero(N, N);
    const int d = PT.degree() + QT.degree();
    if constexpr (is_exact_v<T>) {
        for (int k = 0; k < N; ++k) {
            std::vector<Rational> mom;
            {
                std::lock_guard lock(mutex_);
                auto& cached = moments_[static_cast<std::size_t>(k)];
                if (static_cast<int>(cached.size()) <= d) {
                    const auto seq = exact_recurrence_coefficients(spec_.scalars[static_cast<std::size_t>(k)], d);
                    cached = exact_relative_moments(seq, d);
                }
                mom.assign(cached.begin(), cached.begin() + d + 1);
            }
            for (auto& m : mom) m *= unit_ratio_[static_cast<std::size_t>(k)];
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) {
                    Rational s(0);
                    for (int p = 0; p <= PT.degree(); ++p) {
                        const Rational& u = PT.coeffs()[static_cast<std::size_t>(p)](i, k);
                        if (u.is_zero()) continue;
                        for (int q = 0; q <= QT.degree(); ++q) {
                            const Rational& v = QT.coeffs()[static_cast<std::size_t>(q)](j, k);
                            if (!v.is_zero()) s += u * v * mom[static_cast<std::size_t>(p + q)];
                        }
                    }
                    out(i, j) += s;
                }
        }
    } else {
        const int m = (d + 1) / 2 + 1;
        for (int k = 0; k < N; ++k) {
            const auto r = rule(k, m);
            for (std::size_t node = 0; node < r->nodes.size(); ++node) {
                const double x = r->nodes[node];
                const Eigen::VectorXcd u = column_at(PT, k, x);
                const Eigen::VectorXcd v = column_at(QT, k, x);
                out.noalias() += r->weights[node] * (u * v.adjoint());
            }
        }
    }
    return out;
}

template Matrix<Complex> build_nilpotent<Complex>(const WeightSpec&);
template Matrix<Rational> build_nilpotent<Rational>(const WeightSpec&);
template TFactor<Complex> build_T<Complex>(const WeightSpec&);
template TFactor<Rational> build_T<Rational>(const WeightSpec&);
template class InnerProductEngine<Complex>;
template class InnerProductEngine<Rational>;

}  // namespace mvop
