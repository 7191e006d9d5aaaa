#include "mvop/scalar_families.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mvop {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParam: return "InvalidParam";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::DegreeCap: return "DegreeCap";
        case ErrorCode::SingularLeading: return "SingularLeading";
        case ErrorCode::NonPolynomialResult: return "NonPolynomialResult";
        case ErrorCode::ConditionFailed: return "ConditionFailed";
        case ErrorCode::CapExceeded: return "CapExceeded";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::CheckError: return "CheckError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string_view to_string(Family f) {
    switch (f) {
        case Family::HermiteShifted: return "hermite";
        case Family::Laguerre: return "laguerre";
        case Family::Jacobi: return "jacobi";
        case Family::CustomMoments: return "custom";
    }
    return "unknown";
}

ScalarWeightSpec ScalarWeightSpec::hermite(double b, double scale) {
    ScalarWeightSpec s;
    s.family = Family::HermiteShifted;
    s.b = b;
    s.scale = scale;
    return s;
}

ScalarWeightSpec ScalarWeightSpec::laguerre(double alpha, double scale) {
    ScalarWeightSpec s;
    s.family = Family::Laguerre;
    s.alpha = alpha;
    s.scale = scale;
    return s;
}

ScalarWeightSpec ScalarWeightSpec::jacobi(double alpha, double beta, double scale) {
    ScalarWeightSpec s;
    s.family = Family::Jacobi;
    s.alpha = alpha;
    s.beta = beta;
    s.scale = scale;
    return s;
}

ScalarWeightSpec ScalarWeightSpec::custom(std::vector<double> moments, Interval support) {
    ScalarWeightSpec s;
    s.family = Family::CustomMoments;
    s.moments = std::move(moments);
    s.custom_support = support;
    return s;
}

Interval ScalarWeightSpec::support() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (family) {
        case Family::HermiteShifted: return {-inf, inf};
        case Family::Laguerre: return {0.0, inf};
        case Family::Jacobi: return {-1.0, 1.0};
        case Family::CustomMoments: return custom_support;
    }
    return {};
}

void ScalarWeightSpec::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::InvalidParam, "weight scale must be positive");
    switch (family) {
        case Family::HermiteShifted:
            if (!std::isfinite(b)) fail(ErrorCode::InvalidParam, "Hermite shift must be finite");
            break;
        case Family::Laguerre:
            if (!(alpha > -1.0)) fail(ErrorCode::InvalidParam, "Laguerre alpha must exceed -1");
            break;
        case Family::Jacobi:
            if (!(alpha > -1.0) || !(beta > -1.0))
                fail(ErrorCode::InvalidParam, "Jacobi alpha and beta must exceed -1");
            break;
        case Family::CustomMoments:
            if (moments.size() < 2) fail(ErrorCode::InvalidParam, "custom weight needs at least two moments");
            if (!(moments[0] > 0.0)) fail(ErrorCode::InvalidParam, "custom weight moment_0 must be positive");
            if (!(custom_support.lo < custom_support.hi))
                fail(ErrorCode::InvalidParam, "custom weight support is empty");
            break;
    }
}

double ScalarWeightSpec::evaluate(double x) const {
    switch (family) {
        case Family::HermiteShifted: return scale * std::exp(-x * x + 2.0 * b * x);
        case Family::Laguerre:
            if (!(x > 0.0)) return 0.0;
            return scale * std::exp(-x + alpha * std::log(x));
        case Family::Jacobi:
            if (!(x > -1.0 && x < 1.0)) return 0.0;
            return scale * std::pow(1.0 - x, alpha) * std::pow(1.0 + x, beta);
        case Family::CustomMoments: break;
    }
    fail(ErrorCode::Unsupported, "a custom-moment weight has no pointwise density");
}

double ScalarWeightSpec::log_moment0() const {
    const double ls = std::log(scale);
    switch (family) {
        case Family::HermiteShifted: return ls + 0.5 * std::log(std::numbers::pi) + b * b;
        case Family::Laguerre: return ls + std::lgamma(alpha + 1.0);
        case Family::Jacobi:
            return ls + (alpha + beta + 1.0) * std::numbers::ln2 + std::lgamma(alpha + 1.0) +
                   std::lgamma(beta + 1.0) - std::lgamma(alpha + beta + 2.0);
        case Family::CustomMoments: return std::log(moments.at(0));
    }
    return 0.0;
}

std::string describe(const ScalarWeightSpec& spec) {
    std::ostringstream os;
    os << to_string(spec.family);
    switch (spec.family) {
        case Family::HermiteShifted: os << "(b=" << spec.b << ")"; break;
        case Family::Laguerre: os << "(alpha=" << spec.alpha << ")"; break;
        case Family::Jacobi: os << "(alpha=" << spec.alpha << ",beta=" << spec.beta << ")"; break;
        case Family::CustomMoments: os << "(" << spec.moments.size() << " moments)"; break;
    }
    if (spec.scale != 1.0) os << "*" << spec.scale;
    return os.str();
}

namespace {

template <class R>
struct ClassicalCoefficients {
    R b;
    R c;  // meaningful for n >= 1
};

// Closed-form recurrence coefficients; R is double or Rational.
template <class R>
ClassicalCoefficients<R> classical_coefficients(const ScalarWeightSpec& spec, int n) {
    const R rn(n);
    switch (spec.family) {
        case Family::HermiteShifted: return {from_real<R>(spec.b), rn / R(2)};
        case Family::Laguerre: {
            const R a = from_real<R>(spec.alpha);
            return {R(2) * rn + a + R(1), rn * (rn + a)};
        }
        case Family::Jacobi: {
            const R a = from_real<R>(spec.alpha);
            const R bb = from_real<R>(spec.beta);
            const R s = R(2) * rn + a + bb;
            R b_n;
            if (n == 0) {
                b_n = (bb - a) / (a + bb + R(2));
            } else {
                b_n = (bb * bb - a * a) / (s * (s + R(2)));
            }
            R c_n(0);
            if (n == 1) {
                // (2n+a+b-1) cancels against (n+a+b) at n = 1
                c_n = R(4) * (R(1) + a) * (R(1) + bb) / ((R(2) + a + bb) * (R(2) + a + bb) * (R(3) + a + bb));
            } else if (n > 1) {
                c_n = R(4) * rn * (rn + a) * (rn + bb) * (rn + a + bb) / (s * s * (s + R(1)) * (s - R(1)));
            }
            return {b_n, c_n};
        }
        case Family::CustomMoments: break;
    }
    fail(ErrorCode::Unsupported, "closed-form coefficients need a classical weight");
}

using Float50 = boost::multiprecision::cpp_bin_float_50;

// Chebyshev algorithm on raw moments mu_0..mu_{2n-1}; yields a_0..a_{n-1}, b_1..b_{n-1}.
void chebyshev_algorithm(const std::vector<Float50>& mu, int n, std::vector<Float50>& a, std::vector<Float50>& b) {
    const int len = 2 * n;
    std::vector<Float50> prev(static_cast<std::size_t>(len), Float50(0));
    std::vector<Float50> cur(mu.begin(), mu.begin() + len);
    a.assign(static_cast<std::size_t>(n), Float50(0));
    b.assign(static_cast<std::size_t>(n), Float50(0));
    a[0] = mu[1] / mu[0];
    b[0] = mu[0];
    for (int k = 1; k < n; ++k) {
        std::vector<Float50> next(static_cast<std::size_t>(len), Float50(0));
        for (int l = k; l <= len - k - 1; ++l) {
            next[l] = cur[l + 1] - a[k - 1] * cur[l] - b[k - 1] * prev[l];
        }
        a[k] = next[k + 1] / next[k] - cur[k] / cur[k - 1];
        b[k] = next[k] / cur[k - 1];
        prev = std::move(cur);
        cur = std::move(next);
    }
}

MonicScalarSequence custom_sequence(const ScalarWeightSpec& spec, int n_max) {
    if (n_max > kCustomMomentsCap)
        fail(ErrorCode::CapExceeded, "custom-moment sequences are capped at degree " + std::to_string(kCustomMomentsCap));
    const int n = n_max + 1;
    if (static_cast<int>(spec.moments.size()) < 2 * n)
        fail(ErrorCode::InvalidParam, "degree " + std::to_string(n_max) + " needs " + std::to_string(2 * n) +
                                          " moments, got " + std::to_string(spec.moments.size()));
    std::vector<Float50> mu(spec.moments.begin(), spec.moments.begin() + 2 * n);
    std::vector<Float50> a, b;
    chebyshev_algorithm(mu, n, a, b);

    // Conditioning monitor: rerun with moments perturbed at the binary64 rounding level.
    std::vector<Float50> mu_p = mu;
    for (std::size_t i = 0; i < mu_p.size(); ++i) {
        const double sign = ((i * 2654435761u) >> 3) % 2 == 0 ? 1.0 : -1.0;
        mu_p[i] *= Float50(1) + Float50(sign * std::numeric_limits<double>::epsilon());
    }
    std::vector<Float50> a_p, b_p;
    chebyshev_algorithm(mu_p, n, a_p, b_p);

    MonicScalarSequence seq;
    seq.spec = spec;
    seq.norm_prefactor = NormPrefactor::Moment0;
    seq.log_norms.push_back(std::log(spec.moments[0]));
    double a_scale = 1.0;
    for (int k = 0; k < n; ++k) a_scale = std::max(a_scale, std::abs(a[k].convert_to<double>()));
    for (int k = 0; k < n; ++k) {
        const double ak = a[k].convert_to<double>();
        if (!std::isfinite(ak) || abs(a[k] - a_p[k]).convert_to<double>() >= a_scale)
            fail(ErrorCode::IllConditioned, "moment recursion lost all significant digits at degree " + std::to_string(k));
        seq.b_coeffs.push_back(ak);
        if (k >= 1) {
            const double bk = b[k].convert_to<double>();
            if (!(bk > 0.0) || !std::isfinite(bk) || abs((b[k] - b_p[k]) / b[k]).convert_to<double>() >= 1.0)
                fail(ErrorCode::IllConditioned,
                     "moment Hankel matrix is not numerically positive definite at degree " + std::to_string(k));
            seq.c_coeffs.push_back(bk);
            seq.log_norms.push_back(seq.log_norms.back() + std::log(bk));
        }
    }
    return seq;
}

}  // namespace

MonicScalarSequence recurrence_coefficients(const ScalarWeightSpec& spec, int n_max) {
    if (n_max < 0) fail(ErrorCode::OutOfRange, "n_max must be nonnegative");
    spec.validate();
    if (spec.family == Family::CustomMoments) return custom_sequence(spec, n_max);

    MonicScalarSequence seq;
    seq.spec = spec;
    switch (spec.family) {
        case Family::HermiteShifted: seq.norm_prefactor = NormPrefactor::SqrtPiExpB2; break;
        case Family::Laguerre: seq.norm_prefactor = NormPrefactor::GammaAlphaPlus1; break;
        default: seq.norm_prefactor = NormPrefactor::JacobiBeta; break;
    }
    seq.b_coeffs.reserve(static_cast<std::size_t>(n_max) + 1);
    seq.log_norms.push_back(spec.log_moment0());
    for (int n = 0; n <= n_max; ++n) {
        const auto cc = classical_coefficients<double>(spec, n);
        seq.b_coeffs.push_back(cc.b);
        if (n >= 1) {
            seq.c_coeffs.push_back(cc.c);
            seq.log_norms.push_back(seq.log_norms.back() + std::log(cc.c));
        }
    }
    return seq;
}

ExactScalarSequence exact_recurrence_coefficients(const ScalarWeightSpec& spec, int n_max) {
    if (n_max < 0) fail(ErrorCode::OutOfRange, "n_max must be nonnegative");
    spec.validate();
    if (!spec.is_classical()) fail(ErrorCode::Unsupported, "the exact backend needs classical weights");
    ExactScalarSequence seq;
    seq.spec = spec;
    seq.rel_norms.push_back(Rational(1));
    for (int n = 0; n <= n_max; ++n) {
        auto cc = classical_coefficients<Rational>(spec, n);
        seq.b_coeffs.push_back(cc.b);
        if (n >= 1) {
            seq.rel_norms.push_back(seq.rel_norms.back() * cc.c);
            seq.c_coeffs.push_back(std::move(cc.c));
        }
    }
    return seq;
}

namespace {

template <class Seq, class R>
Polynomial<R> monic_from_recurrence(const Seq& seq, int n) {
    if (n < 0 || n > seq.n_max() + 1) fail(ErrorCode::OutOfRange, "degree " + std::to_string(n) + " beyond sequence");
    // p_{n_max+1} is still determined by the stored b_0..b_{n_max}, c_1..c_{n_max}.
    Polynomial<R> prev;  // p_{-1} = 0
    Polynomial<R> cur = Polynomial<R>::constant(R(1));
    for (int k = 0; k < n; ++k) {
        Polynomial<R> next = cur.times_x() - R(seq.b(k)) * cur;
        if (k >= 1) next = next - R(seq.c(k)) * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

Polynomial<double> monic_polynomial(const MonicScalarSequence& seq, int n) {
    return monic_from_recurrence<MonicScalarSequence, double>(seq, n);
}

Polynomial<Rational> monic_polynomial(const ExactScalarSequence& seq, int n) {
    return monic_from_recurrence<ExactScalarSequence, Rational>(seq, n);
}

double squared_norm_log(const MonicScalarSequence& seq, int n) {
    if (n < 0 || n >= static_cast<int>(seq.log_norms.size()))
        fail(ErrorCode::OutOfRange, "norm of degree " + std::to_string(n) + " beyond sequence");
    return seq.log_norms[static_cast<std::size_t>(n)];
}

GaussRule gauss_rule(const ScalarWeightSpec& spec, int m) {
    if (m < 1) fail(ErrorCode::OutOfRange, "a Gauss rule needs at least one node");
    return gauss_rule(recurrence_coefficients(spec, m - 1), m);
}

namespace {

// Orthonormal recurrence at x scaled by mu0^{-1/2}: returns log(sum q_k^2, k < m)
// and q_m / q_m' (Newton correction for the nodes).
struct ChristoffelEval {
    double log_sum;
    double newton_step;
};

ChristoffelEval christoffel(const MonicScalarSequence& seq, int m, double x) {
    double q_prev = 0.0, q = 1.0;
    double d_prev = 0.0, d = 0.0;
    double sum = 1.0;
    double log_scale = 0.0;
    for (int k = 0; k < m; ++k) {
        // The last normalization only rescales q_m and q_m', so it may be absent.
        const double s_next = (k + 1 <= seq.n_max()) ? std::sqrt(seq.c(k + 1)) : 1.0;
        const double s_cur = k >= 1 ? std::sqrt(seq.c(k)) : 0.0;
        const double q_next = ((x - seq.b(k)) * q - s_cur * q_prev) / s_next;
        const double d_next = (q + (x - seq.b(k)) * d - s_cur * d_prev) / s_next;
        q_prev = q;
        q = q_next;
        d_prev = d;
        d = d_next;
        if (k + 1 < m) sum += q * q;
        const double big = std::max({std::abs(q), std::abs(q_prev), std::abs(d), std::abs(d_prev)});
        if (big > 1e100) {
            q /= 1e100;
            q_prev /= 1e100;
            d /= 1e100;
            d_prev /= 1e100;
            sum /= 1e200;
            log_scale += 200.0 * std::numbers::ln10;
        }
    }
    return {std::log(sum) + log_scale, d != 0.0 ? q / d : 0.0};
}

}  // namespace

GaussRule gauss_rule(const MonicScalarSequence& seq, int m) {
    if (m < 1) fail(ErrorCode::OutOfRange, "a Gauss rule needs at least one node");
    if (seq.n_max() < m - 1) fail(ErrorCode::OutOfRange, "sequence too short for the requested rule");

    Eigen::VectorXd diag(m);
    Eigen::VectorXd sub(std::max(m - 1, 0));
    for (int k = 0; k < m; ++k) diag[k] = seq.b(k);
    for (int k = 1; k < m; ++k) sub[k - 1] = std::sqrt(seq.c(k));

    GaussRule rule;
    if (m == 1) {
        rule.nodes = {diag[0]};
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        rule.nodes.assign(ev.data(), ev.data() + m);
        std::sort(rule.nodes.begin(), rule.nodes.end());
    }

    const double log_mu0 = seq.log_norms.front();
    rule.weights.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double& x = rule.nodes[static_cast<std::size_t>(i)];
        for (int it = 0; it < 3; ++it) {
            const double step = christoffel(seq, m, x).newton_step;
            if (!std::isfinite(step) || std::abs(step) > 1e-6 * (1.0 + std::abs(x))) break;
            x -= step;
            if (std::abs(step) <= 1e-17 * (1.0 + std::abs(x))) break;
        }
        const double log_sum = christoffel(seq, m, x).log_sum;
        rule.weights[static_cast<std::size_t>(i)] = std::exp(log_mu0 - log_sum);
    }
    return rule;
}

std::optional<Rational> exact_moment0_ratio(const ScalarWeightSpec& num, const ScalarWeightSpec& den) {
    if (num.family != den.family || !num.is_classical()) return std::nullopt;
    Rational ratio = to_rational(num.scale) / to_rational(den.scale);
    auto integer_offset = [](double x, double y) -> std::optional<long> {
        const Rational d = to_rational(x) - to_rational(y);
        if (denominator(d) != 1) return std::nullopt;
        return numerator(d).convert_to<long>();
    };
    switch (num.family) {
        case Family::HermiteShifted: {
            const Rational bn = to_rational(num.b), bd = to_rational(den.b);
            if (bn * bn != bd * bd) return std::nullopt;
            return ratio;
        }
        case Family::Laguerre: {
            const auto d = integer_offset(num.alpha, den.alpha);
            if (!d) return std::nullopt;
            // Gamma(alpha_num + 1) / Gamma(alpha_den + 1)
            const Rational a_den = to_rational(den.alpha), a_num = to_rational(num.alpha);
            for (long j = 1; j <= *d; ++j) ratio *= a_den + Rational(j);
            for (long j = 1; j <= -*d; ++j) ratio /= a_num + Rational(j);
            return ratio;
        }
        case Family::Jacobi: {
            const auto da = integer_offset(num.alpha, den.alpha);
            const auto db = integer_offset(num.beta, den.beta);
            if (!da || !db) return std::nullopt;
            Rational a = to_rational(den.alpha), b = to_rational(den.beta);
            // mu0(a+1,b)/mu0(a,b) = 2(a+1)/(a+b+2); mu0(a,b+1)/mu0(a,b) = 2(b+1)/(a+b+2)
            for (long j = 0; j < *da; ++j, a += 1) ratio *= Rational(2) * (a + 1) / (a + b + 2);
            for (long j = 0; j < -*da; ++j) {
                a -= 1;
                ratio /= Rational(2) * (a + 1) / (a + b + 2);
            }
            for (long j = 0; j < *db; ++j, b += 1) ratio *= Rational(2) * (b + 1) / (a + b + 2);
            for (long j = 0; j < -*db; ++j) {
                b -= 1;
                ratio /= Rational(2) * (b + 1) / (a + b + 2);
            }
            return ratio;
        }
        case Family::CustomMoments: break;
    }
    return std::nullopt;
}

std::vector<Rational> exact_relative_moments(const ExactScalarSequence& seq, int d_max) {
    if (d_max > seq.n_max()) fail(ErrorCode::OutOfRange, "sequence too short for the requested moments");
    // Coordinates of x^d in the basis p_0, p_1, ...; the functional keeps only p_0.
    std::vector<Rational> moments;
    moments.reserve(static_cast<std::size_t>(d_max) + 1);
    std::vector<Rational> v(static_cast<std::size_t>(d_max) + 2, Rational(0));
    v[0] = 1;
    for (int d = 0; d <= d_max; ++d) {
        moments.push_back(v[0]);
        if (d == d_max) break;
        std::vector<Rational> next(v.size(), Rational(0));
        for (int k = 0; k <= d; ++k) {
            const Rational& vk = v[static_cast<std::size_t>(k)];
            if (vk.is_zero()) continue;
            next[static_cast<std::size_t>(k) + 1] += vk;
            next[static_cast<std::size_t>(k)] += seq.b(k) * vk;
            if (k >= 1) next[static_cast<std::size_t>(k) - 1] += seq.c(k) * vk;
        }
        v = std::move(next);
    }
    return moments;
}

template <class R>
ScalarDiffOperator<R> scalar_diff_operator(const ScalarWeightSpec& spec) {
    spec.validate();
    ScalarDiffOperator<R> op;
    switch (spec.family) {
        case Family::HermiteShifted: {
            const R b = from_real<R>(spec.b);
            op.second = Polynomial<R>::constant(R(1));
            op.first = Polynomial<R>{R(2) * b, R(-2)};
            op.eigenvalue = Polynomial<R>{R(0), R(-2)};
            return op;
        }
        case Family::Laguerre: {
            const R a = from_real<R>(spec.alpha);
            op.second = Polynomial<R>{R(0), R(1)};
            op.first = Polynomial<R>{a + R(1), R(-1)};
            op.eigenvalue = Polynomial<R>{R(0), R(-1)};
            return op;
        }
        case Family::Jacobi: {
            const R a = from_real<R>(spec.alpha);
            const R b = from_real<R>(spec.beta);
            op.second = Polynomial<R>{R(1), R(0), R(-1)};
            op.first = Polynomial<R>{b - a, -(a + b + R(2))};
            // -n(n + a + b + 1)
            op.eigenvalue = Polynomial<R>{R(0), -(a + b + R(1)), R(-1)};
            return op;
        }
        case Family::CustomMoments: break;
    }
    fail(ErrorCode::Unsupported, "no second-order operator is known for a custom-moment weight");
}

template ScalarDiffOperator<double> scalar_diff_operator<double>(const ScalarWeightSpec&);
template ScalarDiffOperator<Rational> scalar_diff_operator<Rational>(const ScalarWeightSpec&);

Rational to_rational(double value) {
    if (!std::isfinite(value)) fail(ErrorCode::InvalidParam, "cannot represent a non-finite value exactly");
    if (value == 0.0) return Rational(0);
    int exp = 0;
    const double mant = std::frexp(value, &exp);  // value = mant * 2^exp, |mant| in [0.5, 1)
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    Rational r(scaled);
    const int shift = exp - 53;
    boost::multiprecision::cpp_int pow2 = 1;
    pow2 <<= std::abs(shift);
    if (shift >= 0) {
        r *= Rational(pow2);
    } else {
        r /= Rational(pow2);
    }
    return r;
}

std::string format_scalar(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string format_scalar(const Complex& v) {
    std::ostringstream os;
    os.precision(17);
    os << v.real() << (v.imag() < 0 || std::signbit(v.imag()) ? "" : "+") << v.imag() << "i";
    return os.str();
}

std::string format_scalar(const Rational& v) { return v.str(); }

}  // namespace mvop
