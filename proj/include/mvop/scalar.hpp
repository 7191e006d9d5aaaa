#pragma once

// Numeric backends shared by every module.
//
// Two scalar types are supported throughout the library:
//   * Complex  - binary64 complex numbers (the default floating backend);
//   * Rational - exact arbitrary-precision rationals, used as an oracle for
//                classical weights with rational parameters at small degree.
//
// Matrix polynomials, operators and sequences are templates over one of these
// two types. Real-valued quantities attached to a backend (polynomial
// coefficients, recurrence coefficients) use `real_t<T>`.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

// Boost 1.74 probes every candidate constructor argument for a byte-container
// interface; Eigen 3.4 dense expressions expose `const_iterator = void`, which
// turns that probe into a hard error as soon as a rational matrix is multiplied.
namespace boost::multiprecision::detail {
template <class C>
    requires requires {
        typename C::Scalar;
        typename C::StorageKind;
    }
struct is_byte_container<C> : std::false_type {};
}  // namespace boost::multiprecision::detail

namespace mvop {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
struct RealOf {
    using type = T;
};
template <>
struct RealOf<Complex> {
    using type = double;
};
template <class T>
using real_t = typename RealOf<T>::type;

/// Exact conversion of a binary64 value to a rational (dyadic) number.
Rational to_rational(double value);

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const Complex& v) { return std::abs(v); }
inline double magnitude(const Rational& v) { return std::abs(v.convert_to<double>()); }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Complex& v) { return v == Complex{}; }
inline bool is_zero(const Rational& v) { return v.is_zero(); }

inline double conj_value(double v) { return v; }
inline Complex conj_value(const Complex& v) { return std::conj(v); }
inline Rational conj_value(const Rational& v) { return v; }

/// Converts a real parameter (given as binary64) into the backend scalar.
template <class T>
T from_real(double v) {
    if constexpr (is_exact_v<T>) {
        return to_rational(v);
    } else {
        return T(v);
    }
}

/// Lifts a real coefficient into the matrix scalar type of the same backend.
inline Complex lift(double v) { return Complex(v, 0.0); }
inline Rational lift(const Rational& v) { return v; }

/// Largest entry magnitude of a matrix (the max-norm), in binary64.
template <class T>
double max_abs(const Matrix<T>& m) {
    double best = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, magnitude(m(i, j)));
    return best;
}

/// Frobenius norm in binary64 (works for the exact backend too).
template <class T>
double frobenius(const Matrix<T>& m) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double v = magnitude(m(i, j));
            s += v * v;
        }
    return std::sqrt(s);
}

template <class T>
Matrix<Complex> to_complex(const Matrix<T>& m) {
    Matrix<Complex> out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if constexpr (is_exact_v<T>) {
                out(i, j) = Complex(to_double(m(i, j)), 0.0);
            } else {
                out(i, j) = Complex(m(i, j));
            }
        }
    return out;
}

template <class T>
Matrix<T> conj_transpose(const Matrix<T>& m) {
    Matrix<T> out(m.cols(), m.rows());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) out(j, i) = conj_value(m(i, j));
    return out;
}

/// Determinant by Gaussian elimination; exact for Rational, partial pivoting otherwise.
template <class T>
T determinant(Matrix<T> m) {
    const Eigen::Index n = m.rows();
    T det = T(1);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (magnitude(m(i, k)) > magnitude(m(piv, k))) piv = i;
        if (is_zero(m(piv, k))) return T(0);
        if (piv != k) {
            m.row(k).swap(m.row(piv));
            det = -det;
        }
        det *= m(k, k);
        for (Eigen::Index i = k + 1; i < n; ++i) {
            if (is_zero(m(i, k))) continue;
            const T f = m(i, k) / m(k, k);
            for (Eigen::Index j = k; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

/// Inverse by Gauss-Jordan elimination with partial pivoting. Returns false
/// when a zero pivot is met (singular input).
template <class T>
bool try_inverse(Matrix<T> m, Matrix<T>& inv) {
    const Eigen::Index n = m.rows();
    inv = Matrix<T>::Identity(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index piv = k;
        for (Eigen::Index i = k + 1; i < n; ++i)
            if (magnitude(m(i, k)) > magnitude(m(piv, k))) piv = i;
        if (is_zero(m(piv, k))) return false;
        if (piv != k) {
            m.row(k).swap(m.row(piv));
            inv.row(k).swap(inv.row(piv));
        }
        const T p = m(k, k);
        m.row(k) /= p;
        inv.row(k) /= p;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i == k || is_zero(m(i, k))) continue;
            const T f = m(i, k);
            m.row(i) -= f * m.row(k);
            inv.row(i) -= f * inv.row(k);
        }
    }
    return true;
}

std::string format_scalar(double v);
std::string format_scalar(const Complex& v);
std::string format_scalar(const Rational& v);

}  // namespace mvop
