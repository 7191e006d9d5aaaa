#pragma once

// Laguerre ladder operators, shift synthesis and Darboux factorizations.
//
// Ladders act on the monic Laguerre polynomials l_n^(alpha):
//   l_n^(alpha) . op = factor(n) l_{n+dn}^(alpha+dalpha).

#include "mvop/diff_operators.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace mvop {

enum class LadderKind { AlphaUp, AlphaDown, NUp, NDown, Eigen };

std::string_view to_string(LadderKind k);

template <class T>
struct LadderOperator {
    LadderKind kind;
    double alpha;
    MatrixDiffOperator<T> op;              // size 1
    Polynomial<real_t<T>> factor;          // in n
    int dn = 0;
    int dalpha = 0;
};

/// Throws InvalidParam unless alpha and alpha + dalpha exceed -1.
template <class T>
LadderOperator<T> ladder(LadderKind kind, double alpha);

template <class T>
struct ShiftOperator {
    MatrixDiffOperator<T> tau;             // size 1
    Polynomial<real_t<T>> q;               // l_n . tau = q(n) r1(n)/r2(n) l_{n+m}^(alpha+k)
    Polynomial<real_t<T>> factor;          // q r1 / r2, the full scalar in front of l_{n+m}
};

inline constexpr int kMaxShift = 6;

/// tau = r1(-delta_alpha) o (ladders); CapExceeded when |k| + |m| > kMaxShift.
template <class T>
ShiftOperator<T> synthesize_shift(double alpha, int k, int m, const Polynomial<real_t<T>>& r1,
                                  const Polynomial<real_t<T>>& r2);

template <class T>
struct BuiltinN5 {
    WeightSpec spec;
    MatrixDiffOperator<T> D1_tilde;
    MatrixDiffOperator<T> D1;              // D1_tilde T^{-1}
    MatrixDiffOperator<T> D2;              // T (2I - D1_tilde)
    MatrixDiffOperator<T> D;               // D1 o D2, acting on P_n
    MatrixDiffOperator<T> D_swapped;       // D2 o D1, acting on Q_n
};

/// Five Laguerre weights (alpha, alpha, alpha+1, alpha+1, alpha+2) and the factorization with P_n . D1 = Q_n.
template <class T>
BuiltinN5<T> builtin_n5_laguerre(double alpha, const std::vector<double>& a);

template <class T>
struct HermiteFactorization {
    MatrixDiffOperator<T> D;
    MatrixDiffOperator<T> D1;
    MatrixDiffOperator<T> D2;
    MatrixDiffOperator<T> D_swapped;
};

/// Closed forms for equal weights e^{-x^2}; Unsupported for any other scalar.
template <class T>
HermiteFactorization<T> hermite_A_factorization(const WeightSpec& spec);

struct DarbouxEntry {
    int n = 0;
    double residual = 0.0;
    bool nonsingular = true;
    double det_abs = 0.0;
    Matrix<Complex> A_n;
};

struct DarbouxReport {
    int n_max = 0;
    double tol = 0.0;
    double worst = 0.0;
    int worst_n = -1;
    int singular_count = 0;
    bool pass = true;
    std::vector<DarbouxEntry> entries;
};

/// P_n . D1 = A_n Q_n with A_n read from the leading coefficients. Passes when every residual is within
/// tol and A_n is nonsingular for all n in the upper half of 0..n_max.
template <class T>
DarbouxReport darboux_verify(const std::function<MatrixPolynomial<T>(int)>& P, const MatrixDiffOperator<T>& D1,
                             const std::function<MatrixPolynomial<T>(int)>& Q, int n_max, double tol = 1e-9);

template <class T>
DarbouxReport darboux_verify(const MVOPSequence<T>& seq, const MatrixDiffOperator<T>& D1, int n_max,
                             double tol = 1e-9) {
    return darboux_verify<T>([&](int n) { return seq.build_P(n); }, D1, [&](int n) { return seq.build_Q(n); }, n_max,
                             tol);
}

}  // namespace mvop
