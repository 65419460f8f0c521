#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scoredec/imhof.hpp"
#include "scoredec/longrun.hpp"

namespace scoredec {

enum class TestMethod { Gaussian, Imhof, VQRWald, Combined, Binomial, Normal, Wald };

std::string to_string(TestMethod m);

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    std::map<std::string, double> components;  // p_plus, p0_1, p0_2 for combined tests
    TestMethod method = TestMethod::Gaussian;
    std::vector<double> weights;  // Imhof eigenvalues
    double df = 0.0;              // chi-squared degrees of freedom
    std::vector<std::string> notes;
    bool degenerate = false;
    std::map<std::string, Matrix> nuisance;
};

/// Selection vectors: equal MCB, equal DSC and the DM special case.
inline const Eigen::Vector4d kSelectMcb{1.0, 0.0, -1.0, 0.0};
inline const Eigen::Vector4d kSelectDsc{0.0, 1.0, 0.0, -1.0};
inline const Eigen::Vector4d kSelectDm{1.0, -1.0, -1.0, 1.0};

/// Maps the score 5-vector (a1, c1, a2, c2, e) to (MCB1, DSC1, MCB2, DSC2).
Matrix xi_matrix();

/// sqrt(T) w'(MCB1, DSC1, MCB2, DSC2) / sqrt(w' Xi Omega Xi' w), two-sided
/// normal p-value. A non-positive variance yields statistic 0, p = 1 and the
/// degenerate flag.
TestReport gaussian_component_test(const Decomposition& d1, const Decomposition& d2, const Eigen::Vector4d& omega_sel,
                                   const LongRunCov& omega);

/// Chooses the branch of the boundary tests: Imhof for smooth losses, VQR Wald
/// for the check loss.
TestReport test_mcb_zero(const ScoringSpec& spec, const Vector& x, const Vector& y, const Matrix& extra = Matrix(),
                         const HacOptions& hac = {});
TestReport test_dsc_zero(const ScoringSpec& spec, const Vector& x, const Vector& y, const Matrix& extra = Matrix(),
                         const HacOptions& hac = {});
/// Same, reusing an existing decomposition of the forecast.
TestReport test_mcb_zero(const ScoringSpec& spec, const Decomposition& d, const Vector& y, const HacOptions& hac = {});
TestReport test_dsc_zero(const ScoringSpec& spec, const Decomposition& d, const Vector& y, const HacOptions& hac = {});

/// max(p_plus, min(1, 2 min(p0_1, p0_2))).
double combine_pvalues(double p_plus, double p0_1, double p0_2);

TestReport test_equal_mcb(const ScoringSpec& spec, const Vector& x1, const Vector& x2, const Vector& y,
                          const Matrix& extra1 = Matrix(), const Matrix& extra2 = Matrix(), const HacOptions& hac = {});
TestReport test_equal_dsc(const ScoringSpec& spec, const Vector& x1, const Vector& x2, const Vector& y,
                          const Matrix& extra1 = Matrix(), const Matrix& extra2 = Matrix(), const HacOptions& hac = {});
/// Diebold-Mariano test as the (1, -1, -1, 1) selection.
TestReport test_dm(const ScoringSpec& spec, const Vector& x1, const Vector& x2, const Vector& y,
                   const HacOptions& hac = {});

/// Variants on precomputed decompositions (used by the Monte Carlo lab).
TestReport test_equal_mcb(const ScoringSpec& spec, const Decomposition& d1, const Decomposition& d2, const Vector& y,
                          const LongRunCov& omega, const HacOptions& hac = {});
TestReport test_equal_dsc(const ScoringSpec& spec, const Decomposition& d1, const Decomposition& d2, const Vector& y,
                          const LongRunCov& omega, const HacOptions& hac = {});

enum class VqrNull { InterceptAndSlope, SlopeOnly };

/// Wald test in the alpha-quantile regression of y on W = (1, x, ...):
/// InterceptAndSlope tests theta = (0, 1, 0, ...), SlopeOnly tests that all
/// non-intercept coefficients vanish. Powell kernel sandwich with
/// Hall-Sheather bandwidth and a HAC middle matrix.
TestReport vqr_test(const Matrix& W, const Vector& y, double alpha, VqrNull null, const HacOptions& hac = {});
TestReport vqr_test(const Vector& x, const Vector& y, double alpha, VqrNull null, const HacOptions& hac = {});

/// Hall-Sheather bandwidth on the probability scale.
double hall_sheather_bandwidth(Eigen::Index T, double alpha, double conf = 0.05);

enum class Component { MCB, DSC, MCBdiff, DSCdiff };

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    double estimate = 0.0;
};

/// Gaussian-inversion confidence interval. `x2` is required for the
/// difference components; single-forecast lower endpoints are truncated at 0.
Interval component_ci(const ScoringSpec& spec, const Vector& x, const Vector& y, Component which, double level,
                      const std::optional<Vector>& x2 = std::nullopt, const HacOptions& hac = {});

}  // namespace scoredec
