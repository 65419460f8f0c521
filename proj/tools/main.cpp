#include <iostream>

#include <CLI11.hpp>

#include "scoredec/cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace scoredec::cli;
    RunConfig cfg;
    std::string format = "text";

    CLI::App app{"Score decompositions, forecast comparison tests and VaR backtests"};
    app.add_option("command,--command", cfg.command, "decompose | compare | backtest | diagnose | simulate | oracle")
        ->required();
    app.add_option("--input", cfg.input, "CSV file with a header row");
    app.add_option("--y-col", cfg.y_col, "realization column");
    app.add_option("--x-cols", cfg.x_cols, "forecast columns (comma separated)")->delimiter(',');
    app.add_option("--extra-cols", cfg.extra_cols, "additional recalibration covariates")->delimiter(',');
    app.add_option("--loss", cfg.loss, "se | qlike | check")->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "quantile level")->capture_default_str();
    app.add_option("--hac-kernel", cfg.hac_kernel, "qs | bartlett")->capture_default_str();
    app.add_option("--hac-bandwidth", cfg.hac_bandwidth, "andrews | fixed:<value>")->capture_default_str();
    app.add_option("--level", cfg.level, "significance level for simulate")->capture_default_str();
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--reps", cfg.reps, "Monte Carlo replications")->capture_default_str();
    app.add_option("--T", cfg.T, "simulated sample size")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--lags", cfg.lags, "hit lags in DQ / DQX")->capture_default_str();
    app.add_option("--backtest-cov", cfg.backtest_cov, "null | hc0")->capture_default_str();
    app.add_option("--scenarios", cfg.scenarios, "design ids, e.g. 3.2a,4.5")->delimiter(',');
    app.add_option("--k-grid", cfg.k_grid, "misspecification values")->delimiter(',');
    app.add_option("--out", cfg.out, "output directory (default: stdout)");
    app.add_option("--plot", cfg.plot, "write the MCB-DSC plot (decompose) to this SVG file");
    app.add_option("--format", format, "text | csv | json-lines")->capture_default_str();
    app.add_flag("--strict", cfg.strict, "exit 4 when any inference is degenerate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }
    try {
        cfg.format = parse_format(format);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    }
    return run(cfg, std::cout, std::cerr);
}
