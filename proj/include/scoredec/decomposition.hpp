#pragma once

#include <string>
#include <vector>

#include "scoredec/recalibration.hpp"

namespace scoredec {

/// Empirical score decomposition S = MCB - DSC + UNC.
struct Decomposition {
    double s_bar = 0.0;
    double mcb = 0.0;
    double dsc = 0.0;
    double unc = 0.0;
    Vector theta_hat;
    double r_hat = 0.0;
    /// T x 3: score of the original, recalibrated and reference forecasts.
    Matrix per_obs;
    FitResult fit;
    Matrix design;  // (1, x, extra...)
    std::vector<std::string> notes;

    [[nodiscard]] Eigen::Index size() const { return per_obs.rows(); }
};

/// Decomposes the mean score of `x` against `y`. `extra` holds optional
/// further recalibration covariates (zero columns for none).
Decomposition decompose(const ScoringSpec& spec, const Vector& x, const Vector& y, const Matrix& extra = Matrix());

/// Unconditional / conditional miscalibration split.
struct McbSplit {
    double umcb = 0.0;
    double cmcb = 0.0;
    double shift = 0.0;  // c with x + c unconditionally calibrated
    std::vector<std::string> notes;
};

McbSplit split_mcb(const ScoringSpec& spec, const Vector& x, const Vector& y);
McbSplit split_mcb(const ScoringSpec& spec, const Vector& x, const Vector& y, const Decomposition& d);

}  // namespace scoredec
