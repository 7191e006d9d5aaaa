#pragma once

// W(x) = T(x) diag(w_1, ..., w_N) T(x)^*, with T = I + Ax and A the nilpotent
// matrix carrying a_1..a_{N-1} at (2j-1, 2j) and (2j+1, 2j) (1-based).

#include "mvop/matrix_poly.hpp"
#include "mvop/scalar_families.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace mvop {

struct WeightSpec {
    int N = 2;
    std::vector<double> a_params;
    std::vector<ScalarWeightSpec> scalars;

    /// Throws InvalidParam (or SizeMismatch for inconsistent lengths).
    void validate() const;
    bool all_classical() const;

    friend bool operator==(const WeightSpec&, const WeightSpec&) = default;
};

template <class T>
Matrix<T> build_nilpotent(const WeightSpec& spec);

template <class T>
struct TFactor {
    MatrixPolynomial<T> t;
    MatrixPolynomial<T> t_inv;
};

template <class T>
TFactor<T> build_T(const WeightSpec& spec);

/// Hermitian N x N weight at x; each scalar weight is zero off its own support.
Matrix<Complex> weight_eval(const WeightSpec& spec, double x);

inline constexpr int kMaxGaussNodes = 512;

/// Matrix inner product <P, Q> = int P W Q^*, evaluated as <PT, QT> against
/// diag(w_k) so that every integral is a polynomial against one scalar weight.
///
/// Complex backend: Gauss rules per scalar weight, cached by node count.
/// Rational backend: exact moments; results are expressed in units of the
/// zeroth moment of the first scalar weight (Unsupported when the ratio of
/// zeroth moments is not rational).
template <class T>
class InnerProductEngine {
public:
    explicit InnerProductEngine(WeightSpec spec);

    const WeightSpec& weight() const { return spec_; }
    const TFactor<T>& factor() const { return t_; }

    Matrix<T> inner_product(const MatrixPolynomial<T>& P, const MatrixPolynomial<T>& Q) const;
    /// Same, with PT = P*T and QT = Q*T already formed.
    Matrix<T> inner_product_tilde(const MatrixPolynomial<T>& PT, const MatrixPolynomial<T>& QT) const;

    /// Gauss rule of the k-th scalar weight with m nodes (Complex backend).
    std::shared_ptr<const GaussRule> rule(int k, int m) const;

private:
    WeightSpec spec_;
    TFactor<T> t_;
    mutable std::mutex mutex_;
    mutable std::map<std::pair<int, int>, std::shared_ptr<const GaussRule>> rules_;
    mutable std::vector<std::vector<Rational>> moments_;  // exact backend: relative moments per scalar
    std::vector<Rational> unit_ratio_;                    // exact backend: mu0(w_k) / mu0(w_1)
};

extern template Matrix<Complex> build_nilpotent<Complex>(const WeightSpec&);
extern template Matrix<Rational> build_nilpotent<Rational>(const WeightSpec&);
extern template TFactor<Complex> build_T<Complex>(const WeightSpec&);
extern template TFactor<Rational> build_T<Rational>(const WeightSpec&);
extern template class InnerProductEngine<Complex>;
extern template class InnerProductEngine<Rational>;

}  // namespace mvop
