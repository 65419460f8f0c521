#include "scoredec/cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace scoredec::cli {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Round the axis maximum up to 1, 2 or 5 times a power of ten.
double nice_max(double v) {
    if (!(v > 0.0)) return 1.0;
    const double p = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * p >= v) return m * p;
    return 10.0 * p;
}

}  // namespace

std::string mcb_dsc_svg(const std::vector<PlotPoint>& points, double unc) {
    double mx = 0.0, dx = 0.0;
    for (const auto& p : points) {
        mx = std::max(mx, p.mcb);
        dx = std::max(dx, p.dsc);
    }
    const double xmax = nice_max(1.1 * mx);
    const double ymax = nice_max(1.1 * dx);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto X = [&](double m) { return kLeft + pw * m / xmax; };
    auto Y = [&](double d) { return kTop + ph * (1.0 - d / ymax); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
       << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight) << "\" fill=\"white\"/>\n";
    os << "<defs><clipPath id=\"plot\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
       << "\" height=\"" << num(ph) << "\"/></clipPath></defs>\n";

    // iso-score lines DSC = MCB + (UNC - S); a line with offset c runs from (0, c) with slope one
    auto iso = [&](double offset, const char* style) {
        const double x0 = std::max(0.0, -offset);
        const double x1 = xmax;
        os << "<line x1=\"" << num(X(x0)) << "\" y1=\"" << num(Y(x0 + offset)) << "\" x2=\"" << num(X(x1))
           << "\" y2=\"" << num(Y(x1 + offset)) << "\" " << style << " clip-path=\"url(#plot)\"/>\n";
    };
    const double step = nice_max(std::max(xmax, ymax) / 5.0);
    for (int i = -5; i <= 5; ++i) {
        const double off = i * step;
        if (-off >= xmax || off >= ymax) continue;  // misses the plot area
        iso(off, "stroke=\"#dddddd\" stroke-width=\"1\"");
    }
    for (const auto& p : points) iso(unc - p.score, "stroke=\"#999999\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");

    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
       << num(kTop + ph) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
       << num(kTop + ph) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double mv = xmax * i / 4.0;
        const double dv = ymax * i / 4.0;
        char lab[32];
        std::snprintf(lab, sizeof lab, "%.3g", mv);
        os << "<text x=\"" << num(X(mv)) << "\" y=\"" << num(kTop + ph + 16) << "\" font-size=\"11\" text-anchor=\"middle\">"
           << lab << "</text>\n";
        std::snprintf(lab, sizeof lab, "%.3g", dv);
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(Y(dv) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
           << lab << "</text>\n";
    }
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10)
       << "\" font-size=\"13\" text-anchor=\"middle\">MCB</text>\n";
    os << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num(kTop + ph / 2) << ")\">DSC</text>\n";

    for (const auto& p : points) {
        os << "<circle cx=\"" << num(X(p.mcb)) << "\" cy=\"" << num(Y(p.dsc)) << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
        os << "<text x=\"" << num(X(p.mcb) + 6) << "\" y=\"" << num(Y(p.dsc) - 6) << "\" font-size=\"11\">" << esc(p.name)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace scoredec::cli
