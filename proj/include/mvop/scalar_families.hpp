#pragma once

// Scalar weights and their monic orthogonal polynomial sequences.
//
// Classical weights (shifted Hermite, Laguerre, Jacobi) use closed-form
// recurrence coefficients; CustomMoments weights go through the Chebyshev
// algorithm on raw moments. Squared norms are kept in log space.

#include "mvop/error.hpp"
#include "mvop/polynomial.hpp"
#include "mvop/scalar.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mvop {

enum class Family { HermiteShifted, Laguerre, Jacobi, CustomMoments };

std::string_view to_string(Family f);

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x > lo && x < hi; }
    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// One scalar weight. `scale` multiplies the standard density, so e.g. the
/// weight a^2 (1-x)^{alpha+1} (1+x)^{beta+1} is Jacobi(alpha+1, beta+1) with scale a^2.
struct ScalarWeightSpec {
    Family family = Family::HermiteShifted;
    double b = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> moments;
    Interval custom_support;
    double scale = 1.0;

    static ScalarWeightSpec hermite(double b = 0.0, double scale = 1.0);
    static ScalarWeightSpec laguerre(double alpha, double scale = 1.0);
    static ScalarWeightSpec jacobi(double alpha, double beta, double scale = 1.0);
    static ScalarWeightSpec custom(std::vector<double> moments, Interval support);

    bool is_classical() const { return family != Family::CustomMoments; }
    Interval support() const;
    /// Throws InvalidParam when parameters are out of range.
    void validate() const;
    /// Density at x; zero outside the open support. Unsupported for CustomMoments.
    double evaluate(double x) const;
    /// log of the zeroth moment (total mass).
    double log_moment0() const;

    friend bool operator==(const ScalarWeightSpec&, const ScalarWeightSpec&) = default;
};

std::string describe(const ScalarWeightSpec& spec);

enum class NormPrefactor { SqrtPiExpB2, GammaAlphaPlus1, JacobiBeta, Moment0 };

/// Recurrence p_{n+1} = (x - b_n) p_n - c_n p_{n-1}; c_coeffs[k-1] holds c_k.
struct MonicScalarSequence {
    ScalarWeightSpec spec;
    std::vector<double> b_coeffs;
    std::vector<double> c_coeffs;
    std::vector<double> log_norms;
    NormPrefactor norm_prefactor = NormPrefactor::Moment0;

    int n_max() const { return static_cast<int>(b_coeffs.size()) - 1; }
    double b(int n) const { return b_coeffs.at(static_cast<std::size_t>(n)); }
    /// c_n for n >= 1.
    double c(int n) const { return c_coeffs.at(static_cast<std::size_t>(n - 1)); }
};

/// Exact counterpart of MonicScalarSequence for classical weights with
/// rational parameters. `rel_norms[n]` is ||p_n||^2 divided by the zeroth moment.
struct ExactScalarSequence {
    ScalarWeightSpec spec;
    std::vector<Rational> b_coeffs;
    std::vector<Rational> c_coeffs;
    std::vector<Rational> rel_norms;

    int n_max() const { return static_cast<int>(b_coeffs.size()) - 1; }
    const Rational& b(int n) const { return b_coeffs.at(static_cast<std::size_t>(n)); }
    const Rational& c(int n) const { return c_coeffs.at(static_cast<std::size_t>(n - 1)); }
};

inline constexpr int kCustomMomentsCap = 20;

MonicScalarSequence recurrence_coefficients(const ScalarWeightSpec& spec, int n_max);
ExactScalarSequence exact_recurrence_coefficients(const ScalarWeightSpec& spec, int n_max);

Polynomial<double> monic_polynomial(const MonicScalarSequence& seq, int n);
Polynomial<Rational> monic_polynomial(const ExactScalarSequence& seq, int n);

double squared_norm_log(const MonicScalarSequence& seq, int n);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_rule(const ScalarWeightSpec& spec, int m);
/// Rule from an existing sequence; requires seq.n_max() >= m - 1.
GaussRule gauss_rule(const MonicScalarSequence& seq, int m);

/// Ratio moment0(num) / moment0(den) when it is a rational number
/// (same family with integer parameter offsets, or equal Hermite |b|).
std::optional<Rational> exact_moment0_ratio(const ScalarWeightSpec& num, const ScalarWeightSpec& den);

/// Moments of the weight divided by its zeroth moment, powers 0..d_max.
/// Requires seq.n_max() >= d_max.
std::vector<Rational> exact_relative_moments(const ExactScalarSequence& seq, int d_max);

/// Second-order operator p -> p''*second + p'*first + p*zeroth with
/// eigenvalue(n) for the monic family members.
template <class R>
struct ScalarDiffOperator {
    Polynomial<R> second;
    Polynomial<R> first;
    Polynomial<R> zeroth;
    Polynomial<R> eigenvalue;  // polynomial in n

    Polynomial<R> apply(const Polynomial<R>& p) const {
        return p.derivative(2) * second + p.derivative(1) * first + p * zeroth;
    }
};

/// delta_b, delta_alpha or delta_{alpha,beta}; Unsupported for CustomMoments.
template <class R>
ScalarDiffOperator<R> scalar_diff_operator(const ScalarWeightSpec& spec);

extern template ScalarDiffOperator<double> scalar_diff_operator<double>(const ScalarWeightSpec&);
extern template ScalarDiffOperator<Rational> scalar_diff_operator<Rational>(const ScalarWeightSpec&);

}  // namespace mvop
