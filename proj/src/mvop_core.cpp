#include "mvop/mvop_core.hpp"

#include "mvop/parallel.hpp"

#include <cmath>

namespace mvop {

template <class T>
MVOPSequence<T>::MVOPSequence(WeightSpec spec, int n_cap)
    : engine_(std::move(spec)), A_(build_nilpotent<T>(engine_.weight())), n_cap_(n_cap) {
    if (n_cap < 0) fail(ErrorCode::OutOfRange, "degree cap must be nonnegative");
    const auto& w = engine_.weight();
    if constexpr (is_exact_v<T>) {
        for (const auto& s : w.scalars) {
            exact_seqs_.push_back(exact_recurrence_coefficients(s, n_cap + 1));
            const auto r = exact_moment0_ratio(s, w.scalars[0]);
            if (!r) fail(ErrorCode::Unsupported, "zeroth moments have no rational ratio");
            unit_ratio_.push_back(*r);
        }
    } else {
        for (const auto& s : w.scalars) float_seqs_.push_back(recurrence_coefficients(s, n_cap + 1));
    }
}

template <class T>
void MVOPSequence<T>::check_degree(int n, int extra) const {
    if (n < 0 || n + extra > n_cap_ + 1)
        fail(ErrorCode::OutOfRange, "degree " + std::to_string(n) + " outside the sequence cap " + std::to_string(n_cap_));
}

template <class T>
double MVOPSequence<T>::log_norm(int k, int n) const {
    return squared_norm_log(float_seqs_[static_cast<std::size_t>(k)], n);
}

template <class T>
Polynomial<real_t<T>> MVOPSequence<T>::scalar_poly(int k, int n) const {
    check_degree(n);
    if constexpr (is_exact_v<T>) {
        return monic_polynomial(exact_seqs_.at(static_cast<std::size_t>(k)), n);
    } else {
        return monic_polynomial(float_seqs_.at(static_cast<std::size_t>(k)), n);
    }
}

template <class T>
MatrixPolynomial<T> MVOPSequence<T>::build_P(int n) const {
    check_degree(n);
    std::vector<Polynomial<real_t<T>>> diag;
    for (int k = 0; k < size(); ++k) diag.push_back(scalar_poly(k, n));
    return MatrixPolynomial<T>::diagonal(diag);
}

template <class T>
std::vector<T> MVOPSequence<T>::P_norms(int n) const {
    check_degree(n);
    std::vector<T> out;
    for (int k = 0; k < size(); ++k) {
        if constexpr (is_exact_v<T>) {
            out.push_back(exact_seqs_[static_cast<std::size_t>(k)].rel_norms[static_cast<std::size_t>(n)] *
                          unit_ratio_[static_cast<std::size_t>(k)]);
        } else {
            const double l = log_norm(k, n);
            if (std::abs(l) > 700.0) fail(ErrorCode::DegreeCap, "squared norm of degree " + std::to_string(n) + " overflows");
            out.push_back(T(std::exp(l)));
        }
    }
    return out;
}

template <class T>
Matrix<T> MVOPSequence<T>::norm_ratio(int n) const {
    check_degree(n);
    Matrix<T> R = Matrix<T>::Zero(size(), size());
    if (n == 0) return R;
    for (int i = 0; i < size(); ++i)
        for (int j = 0; j < size(); ++j) {
            if (is_zero(A_(i, j))) continue;
            // R(j, i) = ||p_n^{w_j}||^2 conj(A(i, j)) / ||p_{n-1}^{w_i}||^2
            if constexpr (is_exact_v<T>) {
                R(j, i) = exact_seqs_[static_cast<std::size_t>(j)].rel_norms[static_cast<std::size_t>(n)] *
                          unit_ratio_[static_cast<std::size_t>(j)] * A_(i, j) /
                          (exact_seqs_[static_cast<std::size_t>(i)].rel_norms[static_cast<std::size_t>(n - 1)] *
                           unit_ratio_[static_cast<std::size_t>(i)]);
            } else {
                const double lr = log_norm(j, n) - log_norm(i, n - 1);
                if (std::abs(lr) > kMaxLogRatio)
                    fail(ErrorCode::DegreeCap, "norm ratio at degree " + std::to_string(n) + " exceeds e^600");
                R(j, i) = std::exp(lr) * conj_value(A_(i, j));
            }
        }
    return R;
}

template <class T>
MatrixPolynomial<T> MVOPSequence<T>::build_QT(int n) const {
    check_degree(n, 1);
    {
        std::lock_guard lock(mutex_);
        auto it = qt_cache_.find(n);
        if (it != qt_cache_.end()) return *it->second;
    }
    MatrixPolynomial<T> qt = build_P(n) + A_ * build_P(n + 1);
    if (n > 0) qt = qt - norm_ratio(n) * build_P(n - 1);
    auto ptr = std::make_shared<const MatrixPolynomial<T>>(std::move(qt));
    std::lock_guard lock(mutex_);
    return *qt_cache_.emplace(n, std::move(ptr)).first->second;
}

template <class T>
MatrixPolynomial<T> MVOPSequence<T>::build_Q(int n) const {
    check_degree(n, 1);
    {
        std::lock_guard lock(mutex_);
        auto it = q_cache_.find(n);
        if (it != q_cache_.end()) return *it->second;
    }
    MatrixPolynomial<T> q = build_QT(n) * engine_.factor().t_inv;
    if (q.degree() != n) fail(ErrorCode::SingularLeading, "Q_" + std::to_string(n) + " has degree " + std::to_string(q.degree()));
    Matrix<T> inv;
    if (!try_inverse<T>(q.leading(), inv)) fail(ErrorCode::SingularLeading, "leading coefficient of Q_" + std::to_string(n) + " is singular");
    auto ptr = std::make_shared<const MatrixPolynomial<T>>(std::move(q));
    std::lock_guard lock(mutex_);
    return *q_cache_.emplace(n, std::move(ptr)).first->second;
}

template <class T>
MatrixPolynomial<T> MVOPSequence<T>::build_Q_five_term(int n) const {
    check_degree(n, 1);
    const int N = size();
    const auto x = MatrixPolynomial<T>::monomial(Matrix<T>::Identity(N, N), 1);
    const auto Pn = build_P(n);
    MatrixPolynomial<T> q = Pn + A_ * build_P(n + 1) - Pn * A_ * x;
    if (n > 0) {
        const Matrix<T> R = norm_ratio(n);
        const auto Pm = build_P(n - 1);
        q = q - R * Pm + R * Pm * A_ * x;
    }
    return q;
}

template <class T>
LeadingCoefficient<T> MVOPSequence<T>::leading_coeff_det(int n) const {
    LeadingCoefficient<T> out;
    out.K = build_Q(n).leading();
    out.det_direct = determinant<T>(out.K);
    if (n == 0) {
        out.det_continuant = out.det_direct;
        out.det_matrix = out.det_direct;
        return out;
    }
    const auto Dn = P_norms(n);
    const auto Dm = P_norms(n - 1);
    std::vector<T> a;
    for (double v : weight().a_params) a.push_back(from_real<T>(v));
    if constexpr (is_exact_v<T>) {
        out.rho = continuant_rho<T>(a, Dn, Dm);
    } else {
        // log space: rho_i = a_i^2 exp(log||p_n^{w_up}||^2 - log||p_{n-1}^{w_down}||^2)
        for (std::size_t p = 0; p < a.size(); ++p) {
            const std::size_t i = p + 1;
            const int up = static_cast<int>(2 * ((i + 1) / 2) - 1);
            const int down = static_cast<int>(2 * (i / 2));
            const double lr = log_norm(up, n) - log_norm(down, n - 1);
            if (std::abs(lr) > kMaxLogRatio) fail(ErrorCode::DegreeCap, "norm ratio exceeds e^600");
            out.rho.push_back(a[p] * a[p] * std::exp(lr));
        }
    }
    out.det_continuant = continuant(out.rho);
    out.det_matrix = determinant<T>(leading_det_matrix<T>(A_, Dn, Dm));
    return out;
}

template <class T>
Matrix<T> MVOPSequence<T>::squared_norm_Q(int n) const {
    check_degree(n, 1);
    auto diag = [](const std::vector<T>& v) {
        Matrix<T> D = Matrix<T>::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v[i];
        return D;
    };
    Matrix<T> out = diag(P_norms(n)) + A_ * diag(P_norms(n + 1)) * conj_transpose<T>(A_);
    if (n > 0) {
        const Matrix<T> R = norm_ratio(n);
        out += R * diag(P_norms(n - 1)) * conj_transpose<T>(R);
    }
    return out;
}

template <class T>
Matrix<T> MVOPSequence<T>::gram(int n, int m) const {
    return engine_.inner_product_tilde(build_QT(n), build_QT(m));
}

template <class T>
OrthogonalityReport MVOPSequence<T>::verify_orthogonality(int n_max, double tol) const {
    check_degree(n_max, 1);
    OrthogonalityReport rep;
    rep.n_max = n_max;
    rep.tol = tol;
    // Q_n T for every n first, so the parallel phase only reads the cache.
    for (int n = 0; n <= n_max; ++n) build_QT(n);
    std::vector<double> self(static_cast<std::size_t>(n_max) + 1);
    parallel_for(n_max + 1, [&](int n) { self[static_cast<std::size_t>(n)] = frobenius<T>(gram(n, n)); });

    std::vector<std::pair<int, int>> pairs;
    for (int n = 0; n <= n_max; ++n)
        for (int m = n + 1; m <= n_max; ++m) pairs.emplace_back(n, m);
    rep.pairs.resize(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), [&](int idx) {
        const auto [n, m] = pairs[static_cast<std::size_t>(idx)];
        const double scale = std::sqrt(self[static_cast<std::size_t>(n)] * self[static_cast<std::size_t>(m)]);
        const double r = frobenius<T>(gram(n, m)) / scale;
        rep.pairs[static_cast<std::size_t>(idx)] = {n, m, r, r <= tol};
    });
    for (const auto& p : rep.pairs) {
        if (p.residual >= rep.worst) {
            rep.worst = p.residual;
            rep.worst_n = p.n;
            rep.worst_m = p.m;
        }
        rep.pass = rep.pass && p.pass;
    }
    return rep;
}

template <class T>
ThreeTerm<T> MVOPSequence<T>::three_term_coefficients(int n) const {
    if (n < 1) fail(ErrorCode::OutOfRange, "three-term coefficients need n >= 1");
    check_degree(n + 1, 1);
    const int N = size();
    const auto x = MatrixPolynomial<T>::monomial(Matrix<T>::Identity(N, N), 1);
    const auto xQT = x * build_QT(n);
    auto project = [&](int m) {
        Matrix<T> inv;
        if (!try_inverse<T>(gram(m, m), inv)) fail(ErrorCode::SingularLeading, "singular Gram matrix");
        return Matrix<T>(engine_.inner_product_tilde(xQT, build_QT(m)) * inv);
    };
    ThreeTerm<T> out{project(n + 1), project(n), project(n - 1), 0.0};
    const auto xQ = x * build_Q(n);
    const auto a = out.A * build_Q(n + 1);
    const auto b = out.B * build_Q(n);
    const auto c = out.C * build_Q(n - 1);
    const auto res = ((xQ - a) - b) - c;
    const double scale = std::max({xQ.max_coeff(), a.max_coeff(), b.max_coeff(), c.max_coeff()});
    out.residual = res.max_coeff() / scale;
    return out;
}

template class MVOPSequence<Complex>;
template class MVOPSequence<Rational>;

}  // namespace mvop
