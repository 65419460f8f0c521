#pragma once

#include <optional>
#include <string>

#include "scoredec/inference.hpp"

namespace scoredec {

/// Quantile identification series v_t = 1{y_t <= x_t} - alpha.
struct HitSeries {
    Vector v;
    double alpha = 0.0;
    int n_hits = 0;

    [[nodiscard]] double hit_frequency() const { return static_cast<double>(n_hits) / static_cast<double>(v.size()); }
};

HitSeries make_hits(const Vector& x, const Vector& y, double alpha);

enum class RegressionBacktest { UC, CC, DQ, DQX };

std::string to_string(RegressionBacktest b);

/// Covariance of the backtest regression coefficients. NullBernoulli uses
/// alpha(1-alpha)(G'G)^-1, exact for iid hits under the null; HC0 is the
/// White sandwich, which over-rejects badly when hits are rare because lag
/// cells without a hit have zero residual variance.
enum class BacktestCovariance { NullBernoulli, HC0 };

/// Least-squares regression of v_t on G_t with a Wald test of all
/// coefficients being zero.
///   UC: G = 1;  CC: G = (1, v_{t-1});  DQ: G = (1, v_{t-1}, ..., v_{t-lags});
///   DQX: DQ plus the forecast x_t.
/// The first max-lag rows are dropped. Constant or collinear lag columns are
/// removed and flagged.
TestReport regression_backtest(const HitSeries& hits, RegressionBacktest which,
                               const std::optional<Vector>& x = std::nullopt, int lags = 4,
                               BacktestCovariance cov = BacktestCovariance::NullBernoulli);

enum class BaselZone { Green, Yellow, Red };

std::string to_string(BaselZone z);

struct BaselResult {
    BaselZone zone = BaselZone::Green;
    double p_value = 1.0;     // P(Bin(T, alpha) >= n_hits)
    double cumulative = 0.0;  // P(Bin(T, alpha) <= n_hits), drives the zone
};

/// Zones from the cumulative probability: Green below 0.95, Yellow below
/// 0.9999, Red otherwise. At T = 250, alpha = 0.01 this is the classic table
/// (Green 0-4, Yellow 5-9, Red 10+).
BaselResult basel_traffic_light(int T, double alpha, int n_hits);

/// One-sided tests of E[G_t v_t] <= 0 for G_t = (1, x_t) with HAC standard
/// errors, combined by Bonferroni: p = min(1, 2 min(p_1, p_2)).
TestReport nz_test(const HitSeries& hits, const Vector& x, const HacOptions& hac = {});

/// Quantile Mincer-Zarnowitz backtest, theta = (0, 1) in the quantile regression.
TestReport vqr_backtest(const Vector& x, const Vector& y, double alpha, const HacOptions& hac = {});

}  // namespace scoredec
