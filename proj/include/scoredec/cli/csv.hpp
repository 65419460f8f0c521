#pragma once

#include <istream>
#include <string>
#include <vector>

#include "scoredec/linalg.hpp"

namespace scoredec::cli {

/// Raw CSV contents. Cells stay strings until a column is requested, so
/// files may carry dates or labels next to the numeric series.
class CsvTable {
public:
    /// Parses comma-separated text with a header row. Quoted fields with
    /// embedded commas or doubled quotes are accepted; ragged rows are not.
    static CsvTable parse(std::istream& in, const std::string& source = "<input>");
    static CsvTable read_file(const std::string& path);

    [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
    [[nodiscard]] Eigen::Index rows() const { return static_cast<Eigen::Index>(cells_.size()); }
    [[nodiscard]] bool has_column(const std::string& name) const;

    /// Numeric column by header name. Throws InputError naming the data row
    /// (1-based, header excluded) on empty, non-numeric, NaN or infinite cells.
    [[nodiscard]] Vector column(const std::string& name) const;
    [[nodiscard]] Matrix columns(const std::vector<std::string>& names) const;

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> cells_;

    [[nodiscard]] size_t index_of(const std::string& name) const;
};

/// Strict decimal parse of one cell; rejects nan/inf spellings and trailing junk.
bool parse_double(const std::string& cell, double& out);

}  // namespace scoredec::cli
