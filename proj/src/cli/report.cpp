#include "scoredec/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace scoredec::cli {

namespace {

std::string fmt_double(double v, int digits) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string to_text(const Value& v, int digits) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                return fmt_double(x, digits);
            } else if constexpr (std::is_same_v<T, long long>) {
                return std::to_string(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else {
                return x;
            }
        },
        v);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

std::string extension(Format f) {
    switch (f) {
        case Format::Text: return "txt";
        case Format::Csv: return "csv";
        case Format::JsonLines: return "jsonl";
    }
    return "txt";
}

void render(const Report& r, Format f, std::ostream& os) {
    if (f == Format::JsonLines) {
        for (const auto& rec : r.records) {
            nlohmann::ordered_json j;
            j["schema"] = kSchema;
            j["command"] = r.command;
            for (const auto& [k, v] : rec.fields) {
                std::visit(
                    [&](const auto& x) {
                        using T = std::decay_t<decltype(x)>;
                        if constexpr (std::is_same_v<T, double>) {
                            if (std::isfinite(x)) {
                                j[k] = x;
                            } else {
                                j[k] = nullptr;
                            }
                        } else {
                            j[k] = x;
                        }
                    },
                    v);
            }
            os << j.dump() << '\n';
        }
        return;
    }
    if (r.records.empty()) return;
    std::vector<std::string> keys;
    for (const auto& kv : r.records.front().fields) keys.push_back(kv.first);

    if (f == Format::Csv) {
        for (size_t i = 0; i < keys.size(); ++i) os << (i ? "," : "") << csv_escape(keys[i]);
        os << '\n';
        for (const auto& rec : r.records) {
            for (size_t i = 0; i < rec.fields.size(); ++i)
                os << (i ? "," : "") << csv_escape(to_text(rec.fields[i].second, 17));
            os << '\n';
        }
        return;
    }

    std::vector<std::vector<std::string>> cells;
    std::vector<size_t> width(keys.size());
    for (size_t i = 0; i < keys.size(); ++i) width[i] = keys[i].size();
    for (const auto& rec : r.records) {
        std::vector<std::string> row;
        for (size_t i = 0; i < rec.fields.size() && i < keys.size(); ++i) {
            row.push_back(to_text(rec.fields[i].second, 6));
            width[i] = std::max(width[i], row.back().size());
        }
        cells.push_back(std::move(row));
    }
    auto line = [&](const std::vector<std::string>& row) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) os << "  ";
            os << row[i];
            if (i + 1 < row.size()) os << std::string(width[i] - row[i].size(), ' ');
        }
        os << '\n';
    };
    line(keys);
    for (const auto& row : cells) line(row);
    for (const auto& w : r.warnings) os << "# warning: " << w << '\n';
}

}  // namespace scoredec::cli
