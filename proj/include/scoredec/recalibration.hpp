#pragma once

#include <vector>

#include "scoredec/linalg.hpp"
#include "scoredec/scoring.hpp"

namespace scoredec {

/// Result of the linear recalibration M-estimation.
///
/// `theta_hat` always has one entry per column of the design; coefficients of
/// columns dropped for collinearity are zero and `rank_deficient` is set.
struct FitResult {
    Vector theta_hat;
    Vector fitted;
    double objective = 0.0;  // mean score at the optimum
    bool converged = false;
    int iterations = 0;
    bool rank_deficient = false;
    std::vector<int> kept_columns;
};

/// Minimizes the mean score of W*theta against y.
///
/// SE uses a rank-revealing QR solve, QLIKE a damped Newton method that keeps
/// every fitted value strictly positive, and the check loss a smoothed IRLS
/// warm start followed by an exact vertex (simplex) polish.
FitResult fit_linear(const ScoringSpec& spec, const Matrix& W, const Vector& y);

/// Best constant forecast: the sample mean for the mean functional, the lower
/// empirical alpha-quantile (left-continuous inverse of the ECDF) otherwise.
double fit_reference(const ScoringSpec& spec, const Vector& y);

/// Lower empirical alpha-quantile, element ceil(alpha*T) of the sorted sample.
double lower_quantile(const Vector& v, double alpha);

double mean_score(const ScoringSpec& spec, const Vector& x, const Vector& y);

/// Subgradient optimality certificate for a check-loss fit: there must be
/// u_t in [alpha-1, alpha] on the zero-residual rows so that
/// sum_{r_t != 0} psi_t W_t + sum_{r_t = 0} u_t W_t = 0, psi_t = alpha - 1{r_t < 0}.
struct QuantileCertificate {
    bool holds = false;
    double residual = 0.0;  // norm of the best achievable balance, relative to T
    int zero_rows = 0;
};

QuantileCertificate quantile_certificate(const Matrix& W, const Vector& y, const Vector& theta,
                                         double alpha, double tol = 1e-8);

}  // namespace scoredec
