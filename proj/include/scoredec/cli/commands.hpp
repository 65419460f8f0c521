#pragma once

#include <ostream>

#include "scoredec/cli/config.hpp"
#include "scoredec/cli/csv.hpp"
#include "scoredec/cli/report.hpp"

namespace scoredec::cli {

enum ExitCode { kOk = 0, kInputError = 2, kEstimationError = 3, kDegenerate = 4 };

Report cmd_decompose(const RunConfig& cfg, const CsvTable& data);
Report cmd_compare(const RunConfig& cfg, const CsvTable& data);
Report cmd_backtest(const RunConfig& cfg, const CsvTable& data);
Report cmd_diagnose(const RunConfig& cfg, const CsvTable& data);
Report cmd_simulate(const RunConfig& cfg);
Report cmd_oracle(const RunConfig& cfg);

/// Runs one command, writes the report (to `out` or into cfg.out) and maps
/// failures to exit codes. Diagnostics go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace scoredec::cli
