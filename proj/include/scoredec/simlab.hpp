#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scoredec/inference.hpp"

namespace scoredec {

/// Simulation design: AR(1) predictors V_t = (K, L, M, N), realizations
/// Y = V'gamma + eps, forecasts X1 = delta0 + V'delta and X2 = xi0 + V'xi, plus
/// the normal alpha-quantile for quantile designs.
struct SimScenario {
    Eigen::Vector4d gamma = Eigen::Vector4d::Zero();
    double delta0 = 0.0;
    Eigen::Vector4d delta = Eigen::Vector4d::Zero();
    double xi0 = 0.0;
    Eigen::Vector4d xi = Eigen::Vector4d::Zero();
    double beta = 0.25;
    std::optional<double> alpha;  // set for quantile designs
    double k = 0.0;
    std::string table_id;

    [[nodiscard]] double varsigma() const { return 1.0 / (1.0 - beta * beta); }
    /// Throws InputError when beta is outside (-1, 1), delta uses L or xi uses K.
    void validate() const;
};

/// Mean designs; row 1-6, variant 'a' (first row of the block) or 'b'.
SimScenario table3(int row, char variant, double k, double beta = 0.25);

/// Quantile designs; rows 1, 2, 4, 5. Row 5 solves for xi0(k, alpha).
SimScenario table4(int row, double k, double alpha, double beta = 0.25);

struct SimPaths {
    Vector y;
    Vector x1;
    Vector x2;
    Matrix predictors;  // T x 4
};

/// Seeds one Mersenne Twister per (seed, stream) via splitmix64, so each
/// replication has its own reproducible substream.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

SimPaths gen_paths(const SimScenario& s, int T, std::uint64_t seed, std::uint64_t stream = 0);

struct PopulationOracle {
    double mcb1 = 0.0;
    double dsc1 = 0.0;
    double mcb2 = 0.0;
    double dsc2 = 0.0;
    double unc = 0.0;
    std::vector<std::string> notes;
};

/// Closed-form squared-error decomposition of both forecasters.
PopulationOracle population_se(const SimScenario& s);

/// Closed-form check-loss decomposition of both forecasters.
PopulationOracle population_check(const SimScenario& s);

/// Intercept of forecaster 2 in quantile row 5 that equalizes the two
/// population miscalibrations; bracketing root search on the branch that
/// passes through xi0 = delta0 = 1/2 at k = 0.
double solve_xi0(double k, double alpha, double beta = 0.25);

enum class StudyTest { EqualMcb, EqualDsc, DM };

std::string to_string(StudyTest t);

struct StudyConfig {
    std::vector<SimScenario> scenarios;
    int T = 500;
    int reps = 1000;
    double level = 0.1;
    std::vector<StudyTest> tests{StudyTest::EqualMcb, StudyTest::EqualDsc, StudyTest::DM};
    std::uint64_t seed = 20240501;
    int threads = 0;  // 0: hardware concurrency
    HacOptions hac;
};

struct StudyRow {
    std::string scenario;
    double k = 0.0;
    std::optional<double> alpha;
    std::string test;
    int T = 0;
    int reps = 0;  // valid replications
    double rate = 0.0;
    double mc_se = 0.0;
    int failures = 0;
};

/// Rejection frequencies per (scenario, test). Replication r of scenario i
/// always uses substream (i, r), so the output does not depend on the thread
/// count. Replications that throw are counted; more than 1% aborts.
std::vector<StudyRow> run_rejection_study(const StudyConfig& cfg);

/// CSV with columns scenario,k,alpha,test,T,reps,rate,mc_se.
std::string study_csv(const std::vector<StudyRow>& rows);

}  // namespace scoredec
