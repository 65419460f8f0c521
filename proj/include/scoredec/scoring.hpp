#pragma once

#include <string>

namespace scoredec {

enum class Functional { Mean, Quantile };
enum class LossFamily { SquaredError, QLike, CheckLoss };

/// Target functional plus the strictly consistent loss used to evaluate it.
///
/// SquaredError and QLike elicit the mean (both are Bregman losses); CheckLoss
/// elicits the `level`-quantile. QLike arguments must exceed `domain_floor`;
/// values below it are rejected, never clamped.
struct ScoringSpec {
    Functional functional = Functional::Mean;
    LossFamily family = LossFamily::SquaredError;
    double level = 0.5;  // quantile level, only meaningful for CheckLoss
    double domain_floor = 1e-12;

    static ScoringSpec squared_error();
    static ScoringSpec qlike(double domain_floor = 1e-12);
    static ScoringSpec check_loss(double alpha);

    /// Throws InputError if the functional/family/level combination is invalid.
    void validate() const;

    [[nodiscard]] bool smooth() const { return family != LossFamily::CheckLoss; }
    [[nodiscard]] std::string name() const;
};

/// S(x, y); non-negative for every built-in family.
double score(const ScoringSpec& spec, double x, double y);

/// dS/dx. Throws UnsupportedOperation for the check loss.
double score_d1(const ScoringSpec& spec, double x, double y);

/// d^2S/dx^2. Throws UnsupportedOperation for the check loss.
double score_d2(const ScoringSpec& spec, double x, double y);

/// Canonical identification function: 2(x - y) for the mean, 1{y <= x} - alpha
/// for the quantile.
double identification(const ScoringSpec& spec, double x, double y);

/// Generic Bregman score phi(y) - phi(x) - phi'(x)(y - x). Extension point for
/// further mean-consistent losses; the built-in families use closed forms.
template <class Phi, class DPhi>
double bregman_score(Phi phi, DPhi dphi, double x, double y) {
    return phi(y) - phi(x) - dphi(x) * (y - x);
}

/// Generic GPL score (1{y <= x} - alpha)(g(x) - g(y)) for non-decreasing g.
template <class G>
double gpl_score(G g, double alpha, double x, double y) {
    return ((y <= x ? 1.0 : 0.0) - alpha) * (g(x) - g(y));
}

}  // namespace scoredec
