#pragma once

#include <functional>
#include <vector>

#include "ctrf/tensor.hpp"

namespace ctrf {

/// A linear map on matrices of a fixed shape. cg_solve assumes it is symmetric
/// and positive semidefinite under the Frobenius inner product.
struct LinearOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<Matrix(const Matrix&)> apply;

    Matrix operator()(const Matrix& x) const { return apply(x); }
};

struct CGConfig {
    double tol = 1e-8;  ///< stop when ‖op(x) − rhs‖_F ≤ tol · ‖rhs‖_F
    int max_iter = 300;
};

struct CGResult {
    Matrix x;
    double residual = 0.0;  ///< final relative residual
    int iterations = 0;
    bool converged = false;
    /// Relative residual after each iteration, starting with the initial guess.
    std::vector<double> residual_history;
    /// ½⟨x, op(x)⟩ − ⟨rhs, x⟩ after each iteration; CG never increases it.
    std::vector<double> energy_history;
};

/// Conjugate gradients on matrix-shaped unknowns, warm-started at x0.
/// Throws NumericalError on non-finite iterates.
CGResult cg_solve(const LinearOperator& op, const Matrix& rhs, const Matrix& x0, const CGConfig& cfg = {});

double frobenius_inner(const Matrix& a, const Matrix& b);

struct Svd {
    Matrix u;  ///< rows × k, orthonormal columns
    Vector s;  ///< k singular values, descending
    Matrix v;  ///< cols × k, orthonormal columns
};

/// Thin SVD, k = min(rows, cols).
Svd svd_thin(const Matrix& m);

/// Singular value thresholding U · diag(max(s − tau, 0)) · Vᵀ, the proximal
/// map of tau‖·‖_*.
Matrix svt(const Matrix& m, double tau);

/// Number of singular values above rel_tol × the largest; 0 for a zero matrix.
Index numeric_rank(const Matrix& m, double rel_tol = 1e-9);

double nuclear_norm(const Matrix& m);

}  // namespace ctrf
