#include "scoredec/cli/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "scoredec/errors.hpp"

namespace scoredec::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line, const std::string& where) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw InputError(where + ": unterminated quote");
    out.push_back(trim(cur));
    return out;
}

}  // namespace

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* b = cell.data();
    const char* e = b + cell.size();
    if (*b == '+' && cell.size() > 1 && b[1] != '-') ++b;
    const auto r = std::from_chars(b, e, out);
    return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

CsvTable CsvTable::parse(std::istream& in, const std::string& source) {
    CsvTable t;
    t.source_ = source;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (t.header_.empty()) {
            t.header_ = split_line(line, source + ":" + std::to_string(lineno));
            for (size_t i = 0; i < t.header_.size(); ++i) {
                if (t.header_[i].empty()) throw InputError(source + ": empty column name in header");
                for (size_t j = 0; j < i; ++j)
                    if (t.header_[j] == t.header_[i]) throw InputError(source + ": duplicate column '" + t.header_[i] + "'");
            }
            continue;
        }
        auto cells = split_line(line, source + ":" + std::to_string(lineno));
        if (cells.size() != t.header_.size())
            throw InputError(source + ": data row " + std::to_string(t.cells_.size() + 1) + " has " +
                             std::to_string(cells.size()) + " fields, header has " + std::to_string(t.header_.size()));
        t.cells_.push_back(std::move(cells));
    }
    if (t.header_.empty()) throw InputError(source + ": no header row");
    return t;
}

CsvTable CsvTable::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path + "'");
    return parse(in, path);
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header_.begin(), header_.end(), name) != header_.end();
}

size_t CsvTable::index_of(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) throw InputError(source_ + ": no column named '" + name + "'");
    return static_cast<size_t>(it - header_.begin());
}

Vector CsvTable::column(const std::string& name) const {
    const size_t j = index_of(name);
    Vector v(rows());
    for (Eigen::Index r = 0; r < rows(); ++r) {
        const std::string& cell = cells_[static_cast<size_t>(r)][j];
        double d = 0.0;
        if (!parse_double(cell, d))
            throw InputError(source_ + ": column '" + name + "', data row " + std::to_string(r + 1) +
                             ": not a finite number ('" + cell + "')");
        v(r) = d;
    }
    return v;
}

Matrix CsvTable::columns(const std::vector<std::string>& names) const {
    Matrix m(rows(), static_cast<Eigen::Index>(names.size()));
    for (size_t j = 0; j < names.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = column(names[j]);
    return m;
}

}  // namespace scoredec::cli
