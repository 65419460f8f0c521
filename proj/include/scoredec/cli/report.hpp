#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "scoredec/cli/config.hpp"
#include "scoredec/cli/svg_plot.hpp"

namespace scoredec::cli {

inline constexpr const char* kSchema = "scoredec.v1";

using Value = std::variant<double, long long, std::string, bool>;

/// One output row: ordered (field, value) pairs.
struct Record {
    std::vector<std::pair<std::string, Value>> fields;

    Record& add(const std::string& key, Value v) {
        fields.emplace_back(key, std::move(v));
        return *this;
    }
};

struct Report {
    std::string command;
    std::vector<Record> records;
    std::vector<std::string> warnings;
    bool degenerate = false;  // some inference fell back to a degenerate rule
    std::vector<PlotPoint> plot;  // decompose only
    double unc = 0.0;
};

/// "", "*", "**" or "***" for p below 0.1, 0.05, 0.01.
std::string stars(double p);

/// Text: aligned table; CSV: header from the first record, doubles at full
/// precision; json-lines: one object per record with "schema" and "command".
void render(const Report& r, Format f, std::ostream& os);

std::string extension(Format f);

}  // namespace scoredec::cli
