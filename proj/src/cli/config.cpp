#include "scoredec/cli/config.hpp"

#include <algorithm>

#include "scoredec/cli/csv.hpp"
#include "scoredec/errors.hpp"

namespace scoredec::cli {

ScoringSpec make_spec(const RunConfig& cfg) {
    if (cfg.loss == "se") return ScoringSpec::squared_error();
    if (cfg.loss == "qlike") return ScoringSpec::qlike();
    if (cfg.loss == "check") return ScoringSpec::check_loss(cfg.alpha);
    throw InputError("unknown loss '" + cfg.loss + "' (expected se, qlike or check)");
}

HacOptions make_hac(const std::string& kernel, const std::string& bandwidth) {
    HacOptions h;
    if (kernel == "qs") {
        h.kernel = Kernel::QuadraticSpectral;
    } else if (kernel == "bartlett") {
        h.kernel = Kernel::Bartlett;
    } else {
        throw InputError("unknown HAC kernel '" + kernel + "' (expected qs or bartlett)");
    }
    if (bandwidth == "andrews") {
        h.bandwidth = -1.0;
    } else if (bandwidth.rfind("fixed:", 0) == 0) {
        double b = 0.0;
        if (!parse_double(bandwidth.substr(6), b) || b < 0.0)
            throw InputError("fixed HAC bandwidth must be a non-negative number");
        h.bandwidth = b;
    } else {
        throw InputError("HAC bandwidth must be 'andrews' or 'fixed:<value>'");
    }
    return h;
}

Format parse_format(const std::string& s) {
    if (s == "text") return Format::Text;
    if (s == "csv") return Format::Csv;
    if (s == "json-lines" || s == "jsonl") return Format::JsonLines;
    throw InputError("unknown format '" + s + "' (expected text, csv or json-lines)");
}

BacktestCovariance parse_backtest_cov(const std::string& s) {
    if (s == "null") return BacktestCovariance::NullBernoulli;
    if (s == "hc0") return BacktestCovariance::HC0;
    throw InputError("backtest covariance must be 'null' or 'hc0'");
}

SimScenario parse_scenario(const std::string& id, double k, double alpha) {
    // 3.<row><a|b> or 4.<row>
    if (id.size() >= 3 && id[0] == '3' && id[1] == '.') {
        const char v = id.back();
        const std::string row = id.substr(2, id.size() - 3);
        if ((v == 'a' || v == 'b') && row.size() == 1 && row[0] >= '1' && row[0] <= '6')
            return table3(row[0] - '0', v, k);
    } else if (id.size() == 3 && id[0] == '4' && id[1] == '.' && id[2] >= '1' && id[2] <= '9') {
        return table4(id[2] - '0', k, alpha);
    }
    throw InputError("unknown scenario '" + id + "' (expected 3.<1-6><a|b> or 4.<1|2|4|5>)");
}

void validate(const RunConfig& cfg) {
    static const char* kCommands[] = {"decompose", "compare", "backtest", "simulate", "oracle", "diagnose"};
    if (std::none_of(std::begin(kCommands), std::end(kCommands), [&](const char* c) { return cfg.command == c; }))
        throw InputError("unknown command '" + cfg.command + "'");
    make_spec(cfg);
    make_hac(cfg.hac_kernel, cfg.hac_bandwidth);
    parse_backtest_cov(cfg.backtest_cov);
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw InputError("--level must lie in (0, 1)");
    const bool data_cmd = cfg.command != "simulate" && cfg.command != "oracle";
    if (data_cmd) {
        if (cfg.input.empty()) throw InputError("--input is required for " + cfg.command);
        if (cfg.y_col.empty()) throw InputError("--y-col is required for " + cfg.command);
        if (cfg.x_cols.empty()) throw InputError("--x-cols needs at least one forecast column");
    }
    if (cfg.command == "compare" && cfg.x_cols.size() < 2) throw InputError("compare needs at least two --x-cols");
    if (cfg.command == "backtest" && cfg.loss != "check") throw InputError("backtest needs --loss check");
    if (!data_cmd && cfg.scenarios.empty()) throw InputError("--scenarios is required for " + cfg.command);
    if (cfg.command == "simulate" && cfg.reps < 100) throw InputError("--reps must be at least 100");
    if (cfg.lags < 1) throw InputError("--lags must be positive");
}

}  // namespace scoredec::cli
