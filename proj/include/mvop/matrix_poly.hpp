#pragma once

// Polynomials with square matrix coefficients, Mat_N(C[x]) or Mat_N(Q[x]).

#include "mvop/error.hpp"
#include "mvop/polynomial.hpp"
#include "mvop/scalar.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

namespace mvop {

/// Relative level below which a float coefficient that arose from cancellation
/// is treated as zero when it is the trailing one.
inline constexpr double kDegreeTrimTol = 1e-13;

template <class T>
class MatrixPolynomial {
public:
    MatrixPolynomial() = default;
    explicit MatrixPolynomial(int n) : n_(n), coeffs_{Matrix<T>::Zero(n, n)} {}
    explicit MatrixPolynomial(std::vector<Matrix<T>> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) fail(ErrorCode::SizeMismatch, "matrix polynomial needs at least one coefficient");
        n_ = static_cast<int>(coeffs_.front().rows());
        for (const auto& c : coeffs_)
            if (c.rows() != n_ || c.cols() != n_)
                fail(ErrorCode::SizeMismatch, "coefficient matrices must share one square size");
        trim_exact();
    }

    static MatrixPolynomial constant(const Matrix<T>& c) { return MatrixPolynomial(std::vector<Matrix<T>>{c}); }
    static MatrixPolynomial identity(int n) { return constant(Matrix<T>::Identity(n, n)); }
    /// c x^power
    static MatrixPolynomial monomial(const Matrix<T>& c, int power) {
        std::vector<Matrix<T>> v(static_cast<std::size_t>(power) + 1, Matrix<T>::Zero(c.rows(), c.cols()));
        v.back() = c;
        return MatrixPolynomial(std::move(v));
    }
    /// diag(p_1, ..., p_N) from scalar polynomials.
    static MatrixPolynomial diagonal(const std::vector<Polynomial<real_t<T>>>& entries) {
        const int n = static_cast<int>(entries.size());
        int d = 0;
        for (const auto& p : entries) d = std::max(d, p.degree());
        std::vector<Matrix<T>> v(static_cast<std::size_t>(d) + 1, Matrix<T>::Zero(n, n));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k <= entries[static_cast<std::size_t>(i)].degree(); ++k)
                v[static_cast<std::size_t>(k)](i, i) = lift(entries[static_cast<std::size_t>(i)].coeff(k));
        return MatrixPolynomial(std::move(v));
    }
    /// Entrywise constructor: entries[i][j] is the scalar polynomial at (i, j).
    static MatrixPolynomial from_entries(const std::vector<std::vector<Polynomial<real_t<T>>>>& entries) {
        const int n = static_cast<int>(entries.size());
        int d = 0;
        for (const auto& row : entries)
            for (const auto& p : row) d = std::max(d, p.degree());
        std::vector<Matrix<T>> v(static_cast<std::size_t>(d) + 1, Matrix<T>::Zero(n, n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto& p = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                for (int k = 0; k <= p.degree(); ++k) v[static_cast<std::size_t>(k)](i, j) = lift(p.coeff(k));
            }
        return MatrixPolynomial(std::move(v));
    }

    int size() const { return n_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Matrix<T>>& coeffs() const { return coeffs_; }
    const Matrix<T>& leading() const { return coeffs_.back(); }
    Matrix<T> coeff(int k) const {
        if (k < 0 || k > degree()) return Matrix<T>::Zero(n_, n_);
        return coeffs_[static_cast<std::size_t>(k)];
    }
    bool is_zero() const {
        return coeffs_.size() == 1 && std::all_of(coeffs_[0].data(), coeffs_[0].data() + coeffs_[0].size(),
                                                  [](const T& v) { return mvop::is_zero(v); });
    }
    /// Scalar polynomial at entry (i, j) with coefficients in T.
    std::vector<T> entry(int i, int j) const {
        std::vector<T> out;
        for (const auto& c : coeffs_) out.push_back(c(i, j));
        return out;
    }

    /// Largest coefficient max-norm.
    double max_coeff() const {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, max_abs(c));
        return m;
    }

    template <class X>
    Matrix<X> evaluate(const X& x) const {
        Matrix<X> acc = coeffs_.back().template cast<X>();
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = (acc * x).eval() + it->template cast<X>();
        return acc;
    }

    MatrixPolynomial derivative(int k = 1) const {
        if (k <= 0) return *this;
        if (k > degree()) return MatrixPolynomial(n_);
        std::vector<Matrix<T>> out;
        out.reserve(static_cast<std::size_t>(degree() - k) + 1);
        for (int p = k; p <= degree(); ++p) {
            long long f = 1;
            for (int q = 0; q < k; ++q) f *= p - q;
            out.push_back(coeffs_[static_cast<std::size_t>(p)] * T(f));
        }
        return MatrixPolynomial(std::move(out));
    }

    MatrixPolynomial times_x() const {
        if (is_zero()) return *this;
        std::vector<Matrix<T>> out;
        out.reserve(coeffs_.size() + 1);
        out.push_back(Matrix<T>::Zero(n_, n_));
        out.insert(out.end(), coeffs_.begin(), coeffs_.end());
        return MatrixPolynomial(std::move(out));
    }

    friend MatrixPolynomial operator+(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        return combine(a, b, T(1));
    }
    friend MatrixPolynomial operator-(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        return combine(a, b, T(-1));
    }
    friend MatrixPolynomial operator-(const MatrixPolynomial& a) {
        std::vector<Matrix<T>> out = a.coeffs_;
        for (auto& c : out) c = -c;
        return MatrixPolynomial(std::move(out));
    }

    friend MatrixPolynomial operator*(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        check_sizes(a, b);
        const int d = a.degree() + b.degree();
        std::vector<Matrix<T>> out(static_cast<std::size_t>(d) + 1, Matrix<T>::Zero(a.n_, a.n_));
        std::vector<double> scale(out.size(), 0.0);
        for (int i = 0; i <= a.degree(); ++i) {
            const auto& ai = a.coeffs_[static_cast<std::size_t>(i)];
            const double na = max_abs(ai);
            if (na == 0.0) continue;
            for (int j = 0; j <= b.degree(); ++j) {
                const auto& bj = b.coeffs_[static_cast<std::size_t>(j)];
                out[static_cast<std::size_t>(i + j)] += ai * bj;
                if constexpr (!is_exact_v<T>) scale[static_cast<std::size_t>(i + j)] += na * max_abs(bj) * a.n_;
            }
        }
        return finish(std::move(out), scale);
    }
    friend MatrixPolynomial operator*(const Matrix<T>& m, const MatrixPolynomial& p) {
        std::vector<Matrix<T>> out;
        out.reserve(p.coeffs_.size());
        for (const auto& c : p.coeffs_) out.push_back(m * c);
        return MatrixPolynomial(std::move(out));
    }
    friend MatrixPolynomial operator*(const MatrixPolynomial& p, const Matrix<T>& m) {
        std::vector<Matrix<T>> out;
        out.reserve(p.coeffs_.size());
        for (const auto& c : p.coeffs_) out.push_back(c * m);
        return MatrixPolynomial(std::move(out));
    }
    friend MatrixPolynomial operator*(const T& s, const MatrixPolynomial& p) {
        std::vector<Matrix<T>> out = p.coeffs_;
        for (auto& c : out) c *= s;
        return MatrixPolynomial(std::move(out));
    }

    friend bool operator==(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        return a.n_ == b.n_ && a.coeffs_.size() == b.coeffs_.size() &&
               std::equal(a.coeffs_.begin(), a.coeffs_.end(), b.coeffs_.begin(),
                          [](const Matrix<T>& x, const Matrix<T>& y) { return x == y; });
    }

private:
    static void check_sizes(const MatrixPolynomial& a, const MatrixPolynomial& b) {
        if (a.n_ != b.n_)
            fail(ErrorCode::SizeMismatch,
                 "matrix polynomial sizes " + std::to_string(a.n_) + " and " + std::to_string(b.n_) + " differ");
    }

    static MatrixPolynomial combine(const MatrixPolynomial& a, const MatrixPolynomial& b, const T& sign) {
        check_sizes(a, b);
        std::vector<Matrix<T>> out(static_cast<std::size_t>(std::max(a.degree(), b.degree())) + 1,
                                   Matrix<T>::Zero(a.n_, a.n_));
        std::vector<double> scale(out.size(), 0.0);
        for (int k = 0; k <= a.degree(); ++k) out[static_cast<std::size_t>(k)] += a.coeffs_[static_cast<std::size_t>(k)];
        for (int k = 0; k <= b.degree(); ++k)
            out[static_cast<std::size_t>(k)] += b.coeffs_[static_cast<std::size_t>(k)] * sign;
        if constexpr (!is_exact_v<T>) {
            for (std::size_t k = 0; k < out.size(); ++k)
                scale[k] = std::max(max_abs(a.coeff(static_cast<int>(k))), max_abs(b.coeff(static_cast<int>(k))));
        }
        return finish(std::move(out), scale);
    }

    // Drops trailing coefficients that are exactly zero or, in floating point,
    // that cancelled down to rounding level relative to the terms that formed them.
    static MatrixPolynomial finish(std::vector<Matrix<T>> out, const std::vector<double>& scale) {
        if constexpr (!is_exact_v<T>) {
            while (out.size() > 1) {
                const double s = scale[out.size() - 1];
                if (max_abs(out.back()) > kDegreeTrimTol * s) break;
                out.pop_back();
            }
        }
        return MatrixPolynomial(std::move(out));
    }

    void trim_exact() {
        while (coeffs_.size() > 1) {
            const auto& c = coeffs_.back();
            if (!std::all_of(c.data(), c.data() + c.size(), [](const T& v) { return mvop::is_zero(v); })) break;
            coeffs_.pop_back();
        }
    }

    int n_ = 0;
    std::vector<Matrix<T>> coeffs_;
};

template <class T>
MatrixPolynomial<T> mp_add(const MatrixPolynomial<T>& p, const MatrixPolynomial<T>& q) {
    return p + q;
}

template <class T>
MatrixPolynomial<T> mp_multiply(const MatrixPolynomial<T>& p, const MatrixPolynomial<T>& q) {
    return p * q;
}

template <class T, class X>
Matrix<X> mp_evaluate(const MatrixPolynomial<T>& p, const X& x) {
    return p.evaluate(x);
}

template <class T>
MatrixPolynomial<T> mp_derivative(const MatrixPolynomial<T>& p, int k) {
    return p.derivative(k);
}

/// Max-norm of p - q relative to the larger coefficient of the two.
template <class T>
double relative_difference(const MatrixPolynomial<T>& p, const MatrixPolynomial<T>& q) {
    const double scale = std::max({p.max_coeff(), q.max_coeff(), 1e-300});
    double worst = 0.0;
    for (int k = 0; k <= std::max(p.degree(), q.degree()); ++k)
        worst = std::max(worst, max_abs(Matrix<T>(p.coeff(k) - q.coeff(k))));
    return worst / scale;
}

/// One line per power; entries column-major, comma separated.
template <class T>
std::string to_csv(const MatrixPolynomial<T>& p) {
    std::ostringstream os;
    for (const auto& c : p.coeffs()) {
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            for (Eigen::Index i = 0; i < c.rows(); ++i) {
                if (i != 0 || j != 0) os << ',';
                os << format_scalar(c(i, j));
            }
        os << '\n';
    }
    return os.str();
}

}  // namespace mvop
