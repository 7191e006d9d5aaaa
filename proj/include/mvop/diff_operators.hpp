#pragma once

// Right-acting operators D = sum_j d^j F_j(x):  P . D = sum_j (d^j P) F_j.

#include "mvop/mvop_core.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mvop {

template <class T>
class MatrixDiffOperator {
public:
    MatrixDiffOperator() = default;
    /// F[j] multiplies the j-th derivative; trailing zero coefficients are dropped.
    explicit MatrixDiffOperator(std::vector<MatrixPolynomial<T>> F);

    static MatrixDiffOperator zero(int n) { return MatrixDiffOperator({MatrixPolynomial<T>(n)}); }
    static MatrixDiffOperator identity(int n) { return MatrixDiffOperator({MatrixPolynomial<T>::identity(n)}); }
    /// Order-zero operator P -> P M.
    static MatrixDiffOperator multiplication(const MatrixPolynomial<T>& M) { return MatrixDiffOperator({M}); }

    int order() const { return static_cast<int>(F_.size()) - 1; }
    int size() const { return F_.front().size(); }
    const std::vector<MatrixPolynomial<T>>& coeffs() const { return F_; }
    const MatrixPolynomial<T>& coeff(int j) const { return F_.at(static_cast<std::size_t>(j)); }
    bool is_zero() const { return F_.size() == 1 && F_.front().is_zero(); }

    friend MatrixDiffOperator operator+(const MatrixDiffOperator& a, const MatrixDiffOperator& b) {
        return combine(a, b, false);
    }
    friend MatrixDiffOperator operator-(const MatrixDiffOperator& a, const MatrixDiffOperator& b) {
        return combine(a, b, true);
    }
    /// Left multiplication of every coefficient by a constant matrix: M D.
    friend MatrixDiffOperator operator*(const Matrix<T>& m, const MatrixDiffOperator& d) {
        std::vector<MatrixPolynomial<T>> out;
        for (const auto& f : d.F_) out.push_back(m * f);
        return MatrixDiffOperator(std::move(out));
    }
    friend bool operator==(const MatrixDiffOperator& a, const MatrixDiffOperator& b) { return a.F_ == b.F_; }

    /// Max over j of relative_difference of the coefficients.
    friend double relative_difference(const MatrixDiffOperator& a, const MatrixDiffOperator& b) {
        double worst = 0.0;
        const int n = a.size();
        for (int j = 0; j <= std::max(a.order(), b.order()); ++j) {
            const auto fa = j <= a.order() ? a.coeff(j) : MatrixPolynomial<T>(n);
            const auto fb = j <= b.order() ? b.coeff(j) : MatrixPolynomial<T>(n);
            worst = std::max(worst, mvop::relative_difference(fa, fb));
        }
        return worst;
    }

private:
    static MatrixDiffOperator combine(const MatrixDiffOperator& a, const MatrixDiffOperator& b, bool subtract);

    std::vector<MatrixPolynomial<T>> F_;
};

template <class T>
MatrixPolynomial<T> op_apply(const MatrixPolynomial<T>& P, const MatrixDiffOperator<T>& D);

/// Composition with P . (D1 o D2) = (P . D1) . D2.
template <class T>
MatrixDiffOperator<T> op_compose(const MatrixDiffOperator<T>& D1, const MatrixDiffOperator<T>& D2);

/// T D~ T^{-1}: P . D = ((P T) . D~) T^{-1}, with T = I + Ax.
template <class T>
MatrixDiffOperator<T> conjugate_by_T(const MatrixDiffOperator<T>& D_tilde, const WeightSpec& spec);

/// Diagonal eigenvalue map n -> diag(lambda_1(n), ..., lambda_N(n)), each a polynomial in n.
template <class T>
struct EigenvalueMap {
    std::vector<Polynomial<real_t<T>>> slots;

    Matrix<T> at(int n) const;
};

template <class T>
struct Bispectral {
    MatrixDiffOperator<T> D;
    MatrixDiffOperator<T> D_tilde;
    EigenvalueMap<T> Lambda;        // eigenvalues of Q_n under D
};

enum class BispectralFamily { Laguerre, Hermite, Jacobi, HermiteLaguerre };

std::string_view to_string(BispectralFamily f);

/// Family of a weight for the bispectral construction; Unsupported otherwise.
BispectralFamily bispectral_family(const WeightSpec& spec);

/// Shifted diagonal operator and conjugated D with its eigenvalue map.
/// Throws ConditionFailed when the eigenvalue interlacing fails.
template <class T>
Bispectral<T> build_bispectral_operator(const WeightSpec& spec);

struct EigenReport {
    int n_max = 0;
    double tol = 0.0;
    double worst = 0.0;
    int worst_n = -1;
    bool pass = true;
    std::vector<double> residuals;
};

/// Residual of Q_n . D - Lambda_n Q_n for n = 0..n_max, scaled by the largest coefficient.
template <class T>
EigenReport eigencheck(const MVOPSequence<T>& seq, const MatrixDiffOperator<T>& D, const EigenvalueMap<T>& Lambda,
                       int n_max, double tol = 1e-9);

/// Same for a generic sequence of matrix polynomials; Lambda_n is read off
/// the leading coefficients, Lambda_n = lead(F_n . D) lead(F_n)^{-1}.
template <class T>
EigenReport eigencheck_inferred(const std::function<MatrixPolynomial<T>(int)>& family, const MatrixDiffOperator<T>& D,
                                int n_max, double tol = 1e-9, std::vector<Matrix<T>>* lambdas = nullptr);

/// Max-norm residuals of A Lambda_{n+1} - Lambda_n A and R_n Lambda_{n-1} - Lambda_n R_n,
/// relative to the larger side; Lambda here is the eigenvalue map of D~.
template <class T>
double commutation_residual(const MVOPSequence<T>& seq, const EigenvalueMap<T>& Lambda_tilde, int n);

extern template class MatrixDiffOperator<Complex>;
extern template class MatrixDiffOperator<Rational>;

}  // namespace mvop
