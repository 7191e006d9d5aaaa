#pragma once

// Order-zero symmetries F W(x) = W(x) F^* and explicit reductions of 2x2 and 3x3 weights.

#include "mvop/weight_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mvop {

struct SymmetrySpace {
    std::vector<Matrix<Complex>> basis;     // orthonormal in the Frobenius inner product
    int dimension = 0;
    std::vector<double> sample_points;
    std::vector<double> singular_values;    // descending
    double verify_residual = 0.0;           // worst relative residual at the fresh points
    bool verified = true;

    /// Only multiples of the identity commute with W in this sense.
    bool only_scalar() const { return dimension == 1; }
};

/// Sample points covering the support of W: Chebyshev nodes on bounded supports, a tanh-mapped grid
/// on the truncated support otherwise (the cut keeps weight mass >= 1 - 1e-12).
std::vector<double> symmetry_sample_points(const WeightSpec& spec, int n_points);

/// Null space of F -> F W - W F^* over real parameters. Needs n_points >= 2N^2 + 2.
SymmetrySpace order_zero_symmetries(const WeightSpec& spec, int n_points);

/// Smallest degree d <= max_degree with w1/w2 a polynomial of degree d on the common support;
/// nullopt when no such polynomial fits (or the supports differ).
std::optional<int> ratio_polynomial_degree(const ScalarWeightSpec& w1, const ScalarWeightSpec& w2, int max_degree = 4);

struct Reduction2x2 {
    double b = 0.0;
    double c = 0.0;
    Matrix<double> M;                       // M W M^* is diagonal
    double ratio_residual = 0.0;
    double diagonal_residual = 0.0;
    std::string reduced_form;
};

/// Reduction when w1 = -a^2 w2 (b - x)(c - x) with the support inside [b, c].
std::optional<Reduction2x2> try_reduce_2x2(const WeightSpec& spec);

struct Reduction3x3 {
    Matrix<double> M;
    double residual = 0.0;
    std::string reduced_form;
};

/// w1 = w3: M W M^* = diag((a1^2 + a2^2)/a2^2 w1, 2x2 block). Unsupported unless N = 3 and w1 = w3.
Reduction3x3 try_reduce_3x3_w1w3(const WeightSpec& spec);

}  // namespace mvop
