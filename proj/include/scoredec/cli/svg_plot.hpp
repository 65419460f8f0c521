#pragma once

#include <string>
#include <vector>

namespace scoredec::cli {

struct PlotPoint {
    std::string name;
    double mcb = 0.0;
    double dsc = 0.0;
    double score = 0.0;
};

/// MCB-DSC scatter with iso-score lines DSC = MCB + (UNC - S): one line per
/// model plus a few evenly spaced guides. Output is byte-stable.
std::string mcb_dsc_svg(const std::vector<PlotPoint>& points, double unc);

}  // namespace scoredec::cli
