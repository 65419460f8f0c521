#include "scoredec/imhof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace scoredec {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

constexpr int kMaxPanels = 400;
constexpr int kEulerTerms = 24;

struct Integrand {
    const std::vector<double>& lam;
    double q;

    double theta(double u) const {
        double s = 0.0;
        for (double l : lam) s += std::atan(l * u);
        return 0.5 * s - 0.5 * q * u;
    }

    double operator()(double u) const {
        if (u == 0.0) {
            double s = 0.0;
            for (double l : lam) s += l;
            return 0.5 * (s - q);
        }
        double th = 0.0;
        double logrho = 0.0;
        for (double l : lam) {
            th += std::atan(l * u);
            logrho += 0.25 * std::log1p(l * l * u * u);
        }
        th = 0.5 * th - 0.5 * q * u;
        return std::sin(th) / (u * std::exp(logrho));
    }
};

// Relative tolerance per piece; asking for much less stalls on roundoff in the small tail panels.
double integrate(const Integrand& f, double a, double b, unsigned depth = 10) {
    double err = 0.0;
    return GK::integrate(f, a, b, depth, 1e-11, &err);
}

// Repeated averaging of the last m alternating partial sums.
double euler_average(const std::vector<double>& partial) {
    const size_t m = std::min<size_t>(partial.size(), kEulerTerms);
    std::vector<double> s(partial.end() - static_cast<long>(m), partial.end());
    for (size_t level = 1; level < m; ++level)
        for (size_t i = 0; i + level < m; ++i) s[i] = 0.5 * (s[i] + s[i + 1]);
    return s[0];
}

// Smallest u >= lo with theta(u) = target, assuming theta decreasing on [lo, inf).
double next_zero(const Integrand& f, double lo, double target, double step) {
    double hi = lo + step;
    while (f.theta(hi) > target) {
        lo = hi;
        hi += step;
    }
    boost::uintmax_t iters = 200;
    auto g = [&](double u) { return f.theta(u) - target; };
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

double imhof_pvalue(double q, const std::vector<double>& lambdas) {
    double lmax = 0.0;
    for (double l : lambdas) lmax = std::max(lmax, std::abs(l));
    std::vector<double> lam;
    for (double l : lambdas)
        if (std::abs(l) >= 1e-12 * lmax && l != 0.0) lam.push_back(l);
    if (lam.empty()) return q <= 0.0 ? 1.0 : 0.0;

    const bool all_pos = std::all_of(lam.begin(), lam.end(), [](double l) { return l > 0.0; });
    const bool all_neg = std::all_of(lam.begin(), lam.end(), [](double l) { return l < 0.0; });
    if (all_pos && q <= 0.0) return 1.0;
    if (all_neg && q >= 0.0) return 0.0;

    if (q < 0.0) {
        // mixed signs: flip to a positive threshold so the phase stays monotone in the tail
        std::vector<double> neg(lam.size());
        std::transform(lam.begin(), lam.end(), neg.begin(), [](double l) { return -l; });
        return std::clamp(1.0 - imhof_pvalue(-q, neg), 0.0, 1.0);
    }

    const Integrand f{lam, q};
    double integral = 0.0;
    if (q == 0.0) {
        // no linear phase: the integrand decays without oscillating indefinitely
        integral = integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15);
    } else {
        // beyond u0 the phase is strictly decreasing
        double inv = 0.0;
        for (double l : lam)
            if (l > 0.0) inv += 1.0 / l;
        const double u0 = std::sqrt(inv / q);
        const double step = std::numbers::pi / q;  // about half a period
        double j = std::floor(f.theta(u0) / std::numbers::pi);
        double a = next_zero(f, u0, j * std::numbers::pi, step);
        const double head = integrate(f, 0.0, a, 15);

        std::vector<double> partial;
        partial.reserve(kMaxPanels);
        double sum = head;
        double prev = std::numeric_limits<double>::quiet_NaN();
        integral = head;
        for (int n = 0; n < kMaxPanels; ++n) {
            j -= 1.0;
            const double b = next_zero(f, a, j * std::numbers::pi, step);
            sum += integrate(f, a, b);
            partial.push_back(sum);
            a = b;
            if (partial.size() >= static_cast<size_t>(kEulerTerms) && partial.size() % 8 == 0) {
                integral = euler_average(partial);
                if (std::abs(integral - prev) < 1e-13) break;
                prev = integral;
            }
        }
        integral = euler_average(partial);
    }
    const double p = 0.5 + integral / std::numbers::pi;
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace scoredec
