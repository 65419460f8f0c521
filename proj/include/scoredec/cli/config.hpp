#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scoredec/backtests.hpp"
#include "scoredec/simlab.hpp"

namespace scoredec::cli {

enum class Format { Text, Csv, JsonLines };

struct RunConfig {
    std::string command;
    std::string input;
    std::string y_col;
    std::vector<std::string> x_cols;
    std::vector<std::string> extra_cols;
    std::string loss = "se";
    double alpha = 0.05;
    std::string hac_kernel = "qs";
    std::string hac_bandwidth = "andrews";
    double level = 0.1;
    std::uint64_t seed = 20240501;
    int reps = 1000;
    int T = 500;
    int threads = 0;
    int lags = 4;
    std::string backtest_cov = "null";
    std::vector<std::string> scenarios;
    std::vector<double> k_grid{0.0};
    std::string out;  // output directory; empty writes to stdout
    std::string plot;
    Format format = Format::Text;
    bool strict = false;
};

ScoringSpec make_spec(const RunConfig& cfg);
HacOptions make_hac(const std::string& kernel, const std::string& bandwidth);
Format parse_format(const std::string& s);
BacktestCovariance parse_backtest_cov(const std::string& s);

/// "3.2a" selects a mean design, "4.5" a quantile design (at `alpha`).
SimScenario parse_scenario(const std::string& id, double k, double alpha);

/// Rejects inconsistent combinations before any data is read.
void validate(const RunConfig& cfg);

}  // namespace scoredec::cli
