#pragma once

// The sequence Q_n built from diagonal P_n = diag(p_n^{w_1}, ..., p_n^{w_N}):
//
//   Q_n T = P_n + A P_{n+1} - R_n P_{n-1},   R_n = ||P_n||^2 A^* ||P_{n-1}||^{-2},
//
// with R_0 = 0. Squared norms of P_n are diagonal; in the exact backend they
// are stored in units of the zeroth moment of w_1.

#include "mvop/weight_model.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace mvop {

/// Determinant of the unit-diagonal tridiagonal matrix whose off-diagonal
/// products are -rho_i: D_k = D_{k-1} + rho_{k-1} D_{k-2}.
template <class R>
R continuant(const std::vector<R>& rho) {
    R prev(1), cur(1);
    for (const auto& r : rho) {
        R next = cur + r * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// I + diag(norm_n) A^* - diag(norm_nm1)^{-1} A.
template <class T>
Matrix<T> leading_det_matrix(const Matrix<T>& A, const std::vector<T>& norm_n, const std::vector<T>& norm_nm1) {
    const auto n = A.rows();
    Matrix<T> M = Matrix<T>::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (is_zero(A(i, j))) continue;
            M(j, i) += norm_n[static_cast<std::size_t>(j)] * conj_value(A(i, j));
            M(i, j) -= A(i, j) / norm_nm1[static_cast<std::size_t>(i)];
        }
    return M;
}

/// rho_i = a_i^2 ||p_n^{w_{2ceil(i/2)}}||^2 / ||p_{n-1}^{w_{2floor(i/2)+1}}||^2, i = 1..N-1.
template <class T>
std::vector<T> continuant_rho(const std::vector<T>& a, const std::vector<T>& norm_n, const std::vector<T>& norm_nm1) {
    std::vector<T> rho;
    for (std::size_t p = 0; p < a.size(); ++p) {
        const std::size_t i = p + 1;
        const std::size_t up = 2 * ((i + 1) / 2) - 1;  // 0-based index of w_{2ceil(i/2)}
        const std::size_t down = 2 * (i / 2);          // 0-based index of w_{2floor(i/2)+1}
        rho.push_back(a[p] * a[p] * norm_n[up] / norm_nm1[down]);
    }
    return rho;
}

template <class T>
struct LeadingCoefficient {
    Matrix<T> K;
    T det_direct;       // det K_n by elimination
    T det_continuant;   // continuant of the rho list (equals det K_n for n >= 1)
    T det_matrix;       // det(I + ||P_n||^2 A^* - ||P_{n-1}||^{-2} A)
    std::vector<T> rho;
};

struct PairResidual {
    int n = 0;
    int m = 0;
    double residual = 0.0;
    bool pass = true;
};

struct OrthogonalityReport {
    int n_max = 0;
    double tol = 0.0;
    double worst = 0.0;
    int worst_n = -1;
    int worst_m = -1;
    bool pass = true;
    std::vector<PairResidual> pairs;
};

template <class T>
struct ThreeTerm {
    Matrix<T> A;
    Matrix<T> B;
    Matrix<T> C;
    double residual = 0.0;
};

template <class T>
class MVOPSequence {
public:
    /// Scalar sequences are built up to degree n_cap + 1, enough for Q_0..Q_{n_cap}.
    explicit MVOPSequence(WeightSpec spec, int n_cap = 32);

    const WeightSpec& weight() const { return engine_.weight(); }
    const InnerProductEngine<T>& engine() const { return engine_; }
    const Matrix<T>& nilpotent() const { return A_; }
    int n_cap() const { return n_cap_; }
    int size() const { return weight().N; }

    /// p_n of scalar weight k.
    Polynomial<real_t<T>> scalar_poly(int k, int n) const;
    MatrixPolynomial<T> build_P(int n) const;
    /// Diagonal of ||P_n||^2 (float: absolute values; exact: units of mu_0(w_1)).
    std::vector<T> P_norms(int n) const;
    /// R_n = ||P_n||^2 A^* ||P_{n-1}||^{-2}; zero at n = 0.
    Matrix<T> norm_ratio(int n) const;

    MatrixPolynomial<T> build_Q(int n) const;
    /// Q_n T, i.e. P_n + A P_{n+1} - R_n P_{n-1}.
    MatrixPolynomial<T> build_QT(int n) const;
    /// Q_n from the five-term expansion, without going through Q_n T.
    MatrixPolynomial<T> build_Q_five_term(int n) const;

    LeadingCoefficient<T> leading_coeff_det(int n) const;
    /// Closed form ||P_n||^2 + A ||P_{n+1}||^2 A^* + R_n ||P_{n-1}||^2 R_n^*.
    Matrix<T> squared_norm_Q(int n) const;
    /// <Q_n, Q_m> by quadrature (or exact moments).
    Matrix<T> gram(int n, int m) const;

    OrthogonalityReport verify_orthogonality(int n_max, double tol) const;
    ThreeTerm<T> three_term_coefficients(int n) const;

private:
    void check_degree(int n, int extra = 0) const;
    double log_norm(int k, int n) const;

    InnerProductEngine<T> engine_;
    Matrix<T> A_;
    int n_cap_;
    std::vector<MonicScalarSequence> float_seqs_;
    std::vector<ExactScalarSequence> exact_seqs_;
    std::vector<Rational> unit_ratio_;
    mutable std::mutex mutex_;
    mutable std::map<int, std::shared_ptr<const MatrixPolynomial<T>>> qt_cache_;
    mutable std::map<int, std::shared_ptr<const MatrixPolynomial<T>>> q_cache_;
};

extern template class MVOPSequence<Complex>;
extern template class MVOPSequence<Rational>;

/// Maximum norm log-ratio accepted before a computation is refused (DegreeCap).
inline constexpr double kMaxLogRatio = 600.0;

}  // namespace mvop
