#pragma once

#include <vector>

#include "sinlab/matrix.hpp"

namespace sinlab {

/// Full (square-factor) singular value decomposition a = u * diag(s) * v^T.
/// u is rows x rows orthogonal, v is cols x cols orthogonal, s holds the
/// min(rows, cols) singular values sorted non-increasing.
struct SvdResult {
    Matrix u;
    std::vector<double> s;
    Matrix v;
};

/// One-sided Jacobi SVD. Deterministic: fixed cyclic sweep order, and the
/// largest-magnitude entry of each left-singular column is made
/// non-negative (v flipped to match). Throws NumericError if the sweeps
/// do not converge.
SvdResult svd_full(const Matrix& a);

/// Moore-Penrose pseudo-inverse via svd_full. Singular values at or below
/// max(rows, cols) * eps relative to the largest are treated as zero.
Matrix pinv(const Matrix& a);

/// Nearest matrix with all unit singular values: u_thin * v_thin^T from
/// the SVD of a. Same shape as a.
Matrix orthogonal_factor(const Matrix& a);

}  // namespace sinlab
