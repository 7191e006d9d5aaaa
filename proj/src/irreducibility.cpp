#include "mvop/irreducibility.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mvop {

namespace {

constexpr double kNullTol = 1e-10;
constexpr double kVerifyTol = 1e-9;
constexpr double kTailMass = 1e-12;
constexpr double kMapSteepness = 2.0;

/// Interval holding all but kTailMass of the scalar weight's mass.
Interval truncated_support(const ScalarWeightSpec& s) {
    switch (s.family) {
        case Family::HermiteShifted: return {s.b - 6.0, s.b + 6.0};  // erfc(6) ~ 2e-17
        case Family::Laguerre: return {0.0, boost::math::gamma_q_inv(s.alpha + 1.0, kTailMass)};
        case Family::Jacobi: return {-1.0, 1.0};
        case Family::CustomMoments: break;
    }
    fail(ErrorCode::Unsupported, "symmetry sampling needs classical weights (densities)");
}

std::vector<double> chebyshev(double lo, double hi, int n) {
    std::vector<double> x;
    for (int k = 0; k < n; ++k)
        x.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(std::numbers::pi * (k + 0.5) / n));
    std::sort(x.begin(), x.end());
    return x;
}

double stretch(double t) { return std::atanh(t * std::tanh(kMapSteepness)) / kMapSteepness; }

std::vector<double> sample_points(const WeightSpec& spec, int n) {
    Interval cut{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    bool lower_open = false, upper_open = false;
    for (const auto& s : spec.scalars) {
        const auto t = truncated_support(s);
        cut.lo = std::min(cut.lo, t.lo);
        cut.hi = std::max(cut.hi, t.hi);
        lower_open = lower_open || !std::isfinite(s.support().lo);
        upper_open = upper_open || !std::isfinite(s.support().hi);
    }
    if (!lower_open && !upper_open) return chebyshev(cut.lo, cut.hi, n);

    std::vector<double> x;
    for (int k = 0; k < n; ++k) {
        const double t = (k + 0.5) / n;
        if (lower_open && upper_open) {
            x.push_back(0.5 * (cut.lo + cut.hi) + 0.5 * (cut.hi - cut.lo) * stretch(2.0 * t - 1.0));
        } else if (upper_open) {
            x.push_back(cut.lo + (cut.hi - cut.lo) * stretch(t));
        } else {
            x.push_back(cut.hi - (cut.hi - cut.lo) * stretch(1.0 - t));
        }
    }
    return x;
}

/// Region where ratios of the scalar densities are well inside binary64 range.
Interval core_interval(const ScalarWeightSpec& w1, const ScalarWeightSpec& w2) {
    const auto s = w1.support();
    if (s.bounded()) return s;
    if (std::isfinite(s.lo)) return {s.lo + 0.05, s.lo + 8.0};
    const double m = 0.5 * (w1.b + w2.b);
    return {m - 3.0, m + 3.0};
}

double rel_max(const Matrix<Complex>& m, double scale) { return m.cwiseAbs().maxCoeff() / std::max(scale, 1e-300); }

struct RatioFit {
    int degree;
    Eigen::VectorXd coeffs;  // in t = (x - mid) / half
    double mid;
    double half;
    double residual;
};

std::optional<RatioFit> fit_ratio(const ScalarWeightSpec& w1, const ScalarWeightSpec& w2, int max_degree) {
    if (!w1.is_classical() || !w2.is_classical() || !(w1.support() == w2.support())) return std::nullopt;
    const auto core = core_interval(w1, w2);
    const double mid = 0.5 * (core.lo + core.hi), half = 0.5 * (core.hi - core.lo);
    // five fitting nodes, twenty fresh validation nodes
    const auto fit_x = chebyshev(core.lo, core.hi, 5);
    auto check_x = chebyshev(core.lo, core.hi, 20);
    check_x.insert(check_x.end(), fit_x.begin(), fit_x.end());

    auto ratio = [&](double x) { return w1.evaluate(x) / w2.evaluate(x); };
    for (int d = 0; d <= std::min(max_degree, 4); ++d) {
        Eigen::MatrixXd V(5, d + 1);
        Eigen::VectorXd r(5);
        for (int i = 0; i < 5; ++i) {
            const double t = (fit_x[static_cast<std::size_t>(i)] - mid) / half;
            for (int k = 0; k <= d; ++k) V(i, k) = std::pow(t, k);
            r(i) = ratio(fit_x[static_cast<std::size_t>(i)]);
        }
        const Eigen::VectorXd c = V.colPivHouseholderQr().solve(r);
        double worst = 0.0, scale = 0.0;
        for (double x : check_x) {
            const double t = (x - mid) / half;
            double p = 0.0;
            for (int k = d; k >= 0; --k) p = p * t + c(k);
            const double v = ratio(x);
            worst = std::max(worst, std::abs(p - v));
            scale = std::max(scale, std::abs(v));
        }
        if (worst <= 1e-10 * scale) {
            int deg = d;
            while (deg > 0 && std::abs(c(deg)) <= 1e-10 * c.cwiseAbs().maxCoeff()) --deg;
            return RatioFit{deg, c.head(deg + 1), mid, half, worst / scale};
        }
    }
    return std::nullopt;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

std::vector<double> symmetry_sample_points(const WeightSpec& spec, int n_points) {
    spec.validate();
    return sample_points(spec, n_points);
}

SymmetrySpace order_zero_symmetries(const WeightSpec& spec, int n_points) {
    spec.validate();
    const int N = spec.N;
    if (n_points < 2 * N * N + 2)
        fail(ErrorCode::InvalidParam, "need at least 2N^2 + 2 = " + std::to_string(2 * N * N + 2) + " sample points");

    SymmetrySpace out;
    out.sample_points = sample_points(spec, n_points);

    // F W - W F^* is skew-Hermitian, so entries i <= j carry every equation:
    // Im of the diagonal, Re and Im above it. Unknowns: Re F (k,l), then Im F (k,l).
    const int unknowns = 2 * N * N;
    const int per_point = N * N;
    Eigen::MatrixXd sys(static_cast<Eigen::Index>(n_points) * per_point, unknowns);
    sys.setZero();
    Eigen::Index row = 0;
    for (double x : out.sample_points) {
        const Matrix<Complex> W = weight_eval(spec, x);
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j) {
                // coefficient of unknown (k,l): real part d_ik W(l,j) - d_jk W(i,l), imaginary i(d_ik W(l,j) + d_jk W(i,l))
                Eigen::VectorXcd g = Eigen::VectorXcd::Zero(unknowns);
                for (int l = 0; l < N; ++l) {
                    g(i * N + l) += W(l, j);
                    g(j * N + l) -= W(i, l);
                    g(N * N + i * N + l) += Complex(0, 1) * W(l, j);
                    g(N * N + j * N + l) += Complex(0, 1) * W(i, l);
                }
                auto put = [&](const Eigen::VectorXd& v) {
                    const double nrm = v.norm();
                    if (nrm > 0.0) sys.row(row++) = v.transpose() / nrm;
                };
                if (i != j) put(g.real());
                put(g.imag());
            }
    }
    sys.conservativeResize(row, unknowns);

    // QR first so the SVD runs on a square factor
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(sys);
    const Eigen::Index k = std::min<Eigen::Index>(row, unknowns);
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(unknowns, unknowns);
    R.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv(0);
    for (Eigen::Index c = 0; c < unknowns; ++c) {
        if (sv(c) > kNullTol * smax) continue;
        const Eigen::VectorXd v = svd.matrixV().col(c);
        Matrix<Complex> F(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) F(a, b) = Complex(v(a * N + b), v(N * N + a * N + b));
        out.basis.push_back(F);
    }
    out.dimension = static_cast<int>(out.basis.size());

    for (double x : sample_points(spec, 2 * n_points)) {
        const Matrix<Complex> W = weight_eval(spec, x);
        const double wn = W.cwiseAbs().maxCoeff();
        if (wn == 0.0) continue;
        for (const auto& F : out.basis) {
            const Matrix<Complex> res = F * W - W * F.adjoint();
            out.verify_residual = std::max(out.verify_residual, rel_max(res, F.cwiseAbs().maxCoeff() * wn));
        }
    }
    out.verified = out.verify_residual <= kVerifyTol;
    return out;
}

std::optional<int> ratio_polynomial_degree(const ScalarWeightSpec& w1, const ScalarWeightSpec& w2, int max_degree) {
    const auto fit = fit_ratio(w1, w2, max_degree);
    if (!fit) return std::nullopt;
    return fit->degree;
}

std::optional<Reduction2x2> try_reduce_2x2(const WeightSpec& spec) {
    spec.validate();
    if (spec.N != 2) fail(ErrorCode::SizeMismatch, "the 2x2 criterion needs N = 2");
    const auto& w1 = spec.scalars[0];
    const auto& w2 = spec.scalars[1];
    const auto fit = fit_ratio(w1, w2, 2);
    if (!fit || fit->degree != 2) return std::nullopt;

    // w1/w2 = k (x - b)(x - c) with k = -a^2
    const double a = spec.a_params[0];
    const double h = fit->half;
    const double c2 = fit->coeffs(2) / (h * h);
    const double c1 = fit->coeffs(1) / h - 2.0 * c2 * fit->mid;
    const double c0 = fit->coeffs(0) - fit->coeffs(1) * fit->mid / h + c2 * fit->mid * fit->mid;
    if (std::abs(c2 + a * a) > 1e-10 * a * a) return std::nullopt;
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc <= 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    double b = (-c1 + sq) / (2.0 * c2), c = (-c1 - sq) / (2.0 * c2);
    if (b > c) std::swap(b, c);
    const auto sup = w1.support();
    const double slack = 1e-9 * std::max(1.0, c - b);
    if (!(sup.lo >= b - slack && sup.hi <= c + slack)) return std::nullopt;

    Reduction2x2 out;
    out.b = b;
    out.c = c;
    out.ratio_residual = fit->residual;
    out.M.resize(2, 2);
    out.M << 1.0 / (a * (b - c)), -b / (b - c), 1.0, -a * c;
    for (double x : chebyshev(std::max(sup.lo, b), std::min(sup.hi, c), 20)) {
        const Matrix<Complex> D = out.M.cast<Complex>() * weight_eval(spec, x) * out.M.transpose().cast<Complex>();
        const double scale = std::max(std::abs(D(0, 0)), std::abs(D(1, 1)));
        out.diagonal_residual = std::max(out.diagonal_residual, std::abs(D(0, 1)) / std::max(scale, 1e-300));
        out.diagonal_residual = std::max(out.diagonal_residual, std::abs(D(1, 0)) / std::max(scale, 1e-300));
    }
    out.reduced_form = "diag(w2(x)(x - " + fmt(b) + ")/" + fmt(c - b) + ", " + fmt(a * a * (c - b)) + " w2(x)(" +
                       fmt(c) + " - x))";
    return out;
}

Reduction3x3 try_reduce_3x3_w1w3(const WeightSpec& spec) {
    spec.validate();
    if (spec.N != 3 || !(spec.scalars[0] == spec.scalars[2]))
        fail(ErrorCode::Unsupported, "the w1 = w3 reduction needs N = 3 with equal first and third weights");
    const double a1 = spec.a_params[0], a2 = spec.a_params[1];
    const double s = a1 * a1 + a2 * a2;
    Reduction3x3 out;
    out.M.resize(3, 3);
    out.M << 1.0, 0.0, -a1 / a2, 0.0, 1.0, 0.0, a1 * a2 / s, 0.0, a2 * a2 / s;

    const auto& w1 = spec.scalars[0];
    const auto& w2 = spec.scalars[1];
    for (double x : sample_points(spec, 20)) {
        const Matrix<Complex> got = out.M.cast<Complex>() * weight_eval(spec, x) * out.M.transpose().cast<Complex>();
        const double v1 = w1.evaluate(x), v2 = w2.evaluate(x);
        Matrix<Complex> expect = Matrix<Complex>::Zero(3, 3);
        expect(0, 0) = s / (a2 * a2) * v1;
        expect(1, 1) = v2;
        expect(1, 2) = expect(2, 1) = a2 * x * v2;
        expect(2, 2) = a2 * a2 * x * x * v2 + a2 * a2 / s * v1;
        out.residual = std::max(out.residual, rel_max(got - expect, expect.cwiseAbs().maxCoeff()));
    }
    out.reduced_form = "diag(" + fmt(s / (a2 * a2)) + " w1(x), [[w2, " + fmt(a2) + " x w2], [" + fmt(a2) + " x w2, " +
                       fmt(a2 * a2) + " x^2 w2 + " + fmt(a2 * a2 / s) + " w1]])";
    return out;
}

}  // namespace mvop
