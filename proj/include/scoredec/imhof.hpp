#pragma once

#include <vector>

namespace scoredec {

/// P(sum_j lambda_j Z_j^2 > q) for iid standard normal Z_j, by numerical
/// inversion of the characteristic function. Weights with
/// |lambda| < 1e-12 * max|lambda| are dropped; if none remain the result is
/// 1{q <= 0}. Absolute accuracy is about 1e-8; the result is clipped to [0, 1].
double imhof_pvalue(double q, const std::vector<double>& lambdas);

}  // namespace scoredec
