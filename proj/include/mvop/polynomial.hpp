#pragma once

#include "mvop/scalar.hpp"

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace mvop {

/// Dense univariate polynomial with coefficients in R (double or Rational),
/// stored by increasing power. The zero polynomial has a single zero coefficient.
template <class R>
class Polynomial {
public:
    Polynomial() : coeffs_{R(0)} {}
    Polynomial(std::initializer_list<R> c) : coeffs_(c) { trim(); }
    explicit Polynomial(std::vector<R> c) : coeffs_(std::move(c)) { trim(); }

    static Polynomial constant(const R& c) { return Polynomial(std::vector<R>{c}); }
    static Polynomial monomial(int power, const R& c = R(1)) {
        std::vector<R> v(static_cast<std::size_t>(power) + 1, R(0));
        v.back() = c;
        return Polynomial(std::move(v));
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && mvop::is_zero(coeffs_[0]); }
    const std::vector<R>& coeffs() const { return coeffs_; }
    R coeff(int k) const {
        return (k >= 0 && k <= degree()) ? coeffs_[static_cast<std::size_t>(k)] : R(0);
    }
    const R& leading() const { return coeffs_.back(); }

    template <class X>
    X operator()(const X& x) const {
        X acc = X(coeffs_.back());
        for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it) acc = acc * x + X(*it);
        return acc;
    }

    Polynomial derivative(int k = 1) const {
        if (k <= 0) return *this;
        if (k > degree()) return Polynomial();
        std::vector<R> out(static_cast<std::size_t>(degree() - k) + 1);
        for (int p = k; p <= degree(); ++p) {
            R f(1);
            for (int q = 0; q < k; ++q) f *= R(p - q);
            out[static_cast<std::size_t>(p - k)] = f * coeffs_[static_cast<std::size_t>(p)];
        }
        return Polynomial(std::move(out));
    }

    /// Multiplication by x.
    Polynomial times_x() const {
        if (is_zero()) return *this;
        std::vector<R> out(coeffs_.size() + 1, R(0));
        std::copy(coeffs_.begin(), coeffs_.end(), out.begin() + 1);
        return Polynomial(std::move(out));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<R> out(std::max(a.coeffs_.size(), b.coeffs_.size()), R(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
        return Polynomial(std::move(out));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
    friend Polynomial operator-(const Polynomial& a) {
        std::vector<R> out(a.coeffs_);
        for (auto& c : out) c = -c;
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<R> out(a.coeffs_.size() + b.coeffs_.size() - 1, R(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const R& s, const Polynomial& a) {
        std::vector<R> out(a.coeffs_);
        for (auto& c : out) c *= s;
        return Polynomial(std::move(out));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

    /// Largest coefficient magnitude.
    double max_coeff() const {
        double m = 0.0;
        for (const auto& c : coeffs_) m = std::max(m, magnitude(c));
        return m;
    }

private:
    void trim() {
        if (coeffs_.empty()) coeffs_.push_back(R(0));
        while (coeffs_.size() > 1 && mvop::is_zero(coeffs_.back())) coeffs_.pop_back();
    }

    std::vector<R> coeffs_;
};

/// p(x + s) as a polynomial in x.
template <class R>
Polynomial<R> shifted(const Polynomial<R>& p, const R& s) {
    const Polynomial<R> x_plus_s{s, R(1)};
    Polynomial<R> acc = Polynomial<R>::constant(p.leading());
    for (int k = p.degree() - 1; k >= 0; --k) acc = acc * x_plus_s + Polynomial<R>::constant(p.coeff(k));
    return acc;
}

/// Max-norm of a - b relative to the larger coefficient scale of the two.
template <class R>
double relative_difference(const Polynomial<R>& a, const Polynomial<R>& b) {
    const double scale = std::max({a.max_coeff(), b.max_coeff(), 1e-300});
    return (a - b).max_coeff() / scale;
}

}  // namespace mvop
