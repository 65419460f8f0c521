#pragma once

#include <vector>

#include "scoredec/decomposition.hpp"

namespace scoredec {

enum class Kernel { QuadraticSpectral, Bartlett };

struct HacOptions {
    Kernel kernel = Kernel::QuadraticSpectral;
    /// Negative selects the Andrews (1991) AR(1) plug-in bandwidth.
    double bandwidth = -1.0;

    [[nodiscard]] bool automatic() const { return bandwidth < 0.0; }
};

/// Kernel-weighted long-run covariance of a (centered) multivariate series.
struct LongRunCov {
    Matrix matrix;
    double bandwidth = 0.0;
    Kernel kernel = Kernel::QuadraticSpectral;
    bool prewhitened = false;              // never set: no prewhitening is done
    std::vector<int> degenerate_columns;  // zero-variance columns, zeroed out
    bool singular = false;                // smallest eigenvalue below 1e-10 * trace

    [[nodiscard]] bool degenerate() const { return !degenerate_columns.empty() || singular; }
};

double kernel_weight(Kernel k, double x);

/// Andrews AR(1) plug-in bandwidth with equal column weights. Zero-variance
/// columns are ignored; returns 0 when nothing informative remains.
double andrews_bandwidth(const Matrix& u, Kernel k);

/// HAC estimate Gamma_0 + sum_j k(j/S)(Gamma_j + Gamma_j'), Gamma_j = (1/T) sum u_t u_{t-j}'.
/// The caller centers the columns.
LongRunCov hac_cov(const Matrix& series, const HacOptions& opt = {});

/// Demeaned per-observation score vector (a1, c1, a2, c2, e): original score,
/// recalibrated score (per forecaster) and reference score.
Matrix score_vector_series(const Decomposition& d1, const Decomposition& d2);

/// Demeaned (a, c, e) for a single forecaster.
Matrix score_vector_series(const Decomposition& d);

LongRunCov omega_hat(const Decomposition& d1, const Decomposition& d2, const HacOptions& opt = {});

/// Nuisance matrices of the quadratic-form limits for smooth losses.
struct QuadFormNuisance {
    Matrix upsilon;    // mean S''(W'theta, y) W W'
    Matrix h_inverse;  // (mean S''(r, y) W W')^-1 - diag(1 / mean S''(r, y), 0, ...)
    Matrix pi;         // long-run covariance of S'(W'theta, y) W
    double pi_bandwidth = 0.0;
    std::vector<int> kept_columns;
};

/// `W` is the full design; collinear columns are removed before the matrices
/// are formed. Throws UnsupportedOperation for the check loss and
/// EstimationError if the curvature matrix is singular.
QuadFormNuisance quadform_nuisance(const ScoringSpec& spec, const Matrix& W, const Vector& y, const Vector& theta,
                                   double r_hat, const HacOptions& opt = {});

}  // namespace scoredec
