#pragma once

#include <vector>

#include <Eigen/Dense>

namespace scoredec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Greedy left-to-right column selection: a column is kept when its residual
/// after projection on the already kept columns exceeds `rel_tol` times its
/// own norm. Earlier columns always win, so a constant forecast duplicating
/// the intercept is the one dropped.
std::vector<int> independent_columns(const Matrix& W, double rel_tol = 1e-9);

/// Copy of the selected columns.
Matrix select_columns(const Matrix& W, const std::vector<int>& cols);

/// Symmetric square root with negative eigenvalues clipped to zero.
Matrix psd_sqrt(const Matrix& A);

/// 0.5 (A + A').
Matrix symmetrize(const Matrix& A);

/// Design (1, x, extra...). `extra` may have zero columns.
Matrix make_design(const Vector& x, const Matrix& extra = Matrix());

}  // namespace scoredec
