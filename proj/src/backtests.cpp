#include "scoredec/backtests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "scoredec/errors.hpp"

namespace scoredec {

namespace {

double chi2_sf(double stat, double df) {
    if (std::isnan(stat) || stat <= 0.0) return 1.0;
    if (std::isinf(stat)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

double upper_normal(double z) {
    if (std::isnan(z)) return 1.0;
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

}  // namespace

HitSeries make_hits(const Vector& x, const Vector& y, double alpha) {
    if (x.size() != y.size()) throw InputError("forecasts and realizations differ in length");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("quantile level must lie in (0, 1)");
    HitSeries h;
    h.alpha = alpha;
    h.v.resize(x.size());
    for (Eigen::Index t = 0; t < x.size(); ++t) {
        const bool hit = y(t) <= x(t);
        h.v(t) = hit ? 1.0 - alpha : -alpha;
        h.n_hits += hit ? 1 : 0;
    }
    return h;
}

std::string to_string(RegressionBacktest b) {
    switch (b) {
        case RegressionBacktest::UC: return "UC";
        case RegressionBacktest::CC: return "CC";
        case RegressionBacktest::DQ: return "DQ";
        case RegressionBacktest::DQX: return "DQX";
    }
    return "?";
}

std::string to_string(BaselZone z) {
    switch (z) {
        case BaselZone::Green: return "green";
        case BaselZone::Yellow: return "yellow";
        case BaselZone::Red: return "red";
    }
    return "?";
}

TestReport regression_backtest(const HitSeries& hits, RegressionBacktest which, const std::optional<Vector>& x,
                               int lags, BacktestCovariance cov) {
    const Eigen::Index T = hits.v.size();
    int L = 0;
    switch (which) {
        case RegressionBacktest::UC: L = 0; break;
        case RegressionBacktest::CC: L = 1; break;
        case RegressionBacktest::DQ:
        case RegressionBacktest::DQX: L = lags; break;
    }
    if (L < 0) throw InputError("lag count must be non-negative");
    const bool with_x = which == RegressionBacktest::DQX;
    if (with_x && (!x || x->size() != T)) throw InputError("DQX needs forecasts aligned with the hit series");
    const Eigen::Index ncov = 1 + L + (with_x ? 1 : 0);
    if (T <= L + ncov + 5) throw InputError("hit series too short for the requested backtest");

    const Eigen::Index n = T - L;
    Matrix G(n, ncov);
    Vector v = hits.v.tail(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        G(t, 0) = 1.0;
        for (int l = 1; l <= L; ++l) G(t, l) = hits.v(t + L - l);
        if (with_x) G(t, ncov - 1) = (*x)(t + L);
    }

    TestReport rep;
    rep.name = to_string(which);
    rep.method = TestMethod::Wald;

    // drop constant / collinear columns (beyond the intercept)
    const std::vector<int> kept = independent_columns(G, 1e-9);
    if (static_cast<Eigen::Index>(kept.size()) < ncov) {
        rep.degenerate = true;
        rep.notes.emplace_back("constant or collinear covariate columns dropped");
    }
    const Matrix Gr = select_columns(G, kept);
    const Eigen::Index k = Gr.cols();

    const Matrix GtG = Gr.transpose() * Gr;
    Eigen::LDLT<Matrix> ldlt(GtG);
    const Vector beta = ldlt.solve(Gr.transpose() * v);
    const Vector e = v - Gr * beta;
    const Matrix bread = ldlt.solve(Matrix::Identity(k, k));
    const double vscale = hits.alpha * (1.0 - hits.alpha);
    Matrix V;
    if (cov == BacktestCovariance::NullBernoulli) {
        V = symmetrize(vscale * bread);
    } else {
        Matrix meat = Matrix::Zero(k, k);
        for (Eigen::Index t = 0; t < n; ++t) meat.noalias() += e(t) * e(t) * Gr.row(t).transpose() * Gr.row(t);
        V = symmetrize(bread * meat * bread);
        if (!(V.diagonal().maxCoeff() > 1e-14 * vscale / static_cast<double>(n))) {
            if (k == 1) {
                // no residual variation: fall back to the null (Bernoulli) variance
                V(0, 0) = vscale / static_cast<double>(n);
                rep.notes.emplace_back("zero residual variance: null variance alpha(1-alpha) used");
                rep.degenerate = true;
            } else {
                rep.degenerate = true;
                rep.notes.emplace_back("zero residual variance");
                rep.statistic = beta.isZero(1e-14) ? 0.0 : std::numeric_limits<double>::infinity();
                rep.df = static_cast<double>(k);
                rep.p_value = chi2_sf(rep.statistic, rep.df);
                return rep;
            }
        }
    }
    Eigen::LDLT<Matrix> vl(V);
    rep.statistic = beta.dot(vl.solve(beta));
    rep.df = static_cast<double>(k);
    rep.p_value = chi2_sf(rep.statistic, rep.df);
    rep.nuisance["beta"] = beta;
    rep.nuisance["cov"] = V;
    return rep;
}

BaselResult basel_traffic_light(int T, double alpha, int n_hits) {
    if (T <= 0 || n_hits < 0 || n_hits > T) throw InputError("need 0 <= n_hits <= T");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("quantile level must lie in (0, 1)");
    const boost::math::binomial bin(T, alpha);
    BaselResult r;
    r.p_value = n_hits == 0 ? 1.0 : boost::math::cdf(boost::math::complement(bin, n_hits - 1));
    r.cumulative = boost::math::cdf(bin, n_hits);
    if (r.cumulative < 0.95) {
        r.zone = BaselZone::Green;
    } else if (r.cumulative < 0.9999) {
        r.zone = BaselZone::Yellow;
    } else {
        r.zone = BaselZone::Red;
    }
    return r;
}

TestReport nz_test(const HitSeries& hits, const Vector& x, const HacOptions& hac) {
    const Eigen::Index T = hits.v.size();
    if (x.size() != T) throw InputError("forecasts and hit series differ in length");
    Matrix g(T, 2);
    g.col(0) = hits.v;
    g.col(1) = hits.v.cwiseProduct(x);
    const Eigen::RowVector2d m = g.colwise().mean();
    Matrix gc = g;
    gc.rowwise() -= m;
    const LongRunCov om = hac_cov(gc, hac);

    TestReport rep;
    rep.name = "NZ";
    rep.method = TestMethod::Normal;
    double p[2];
    double zmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < 2; ++j) {
        const double var = om.matrix(j, j);
        double z;
        if (!(var > 0.0)) {
            rep.degenerate = true;
            z = m(j) > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        } else {
            z = m(j) / std::sqrt(var / static_cast<double>(T));
        }
        p[j] = upper_normal(z);
        zmax = std::max(zmax, z);
    }
    if (rep.degenerate) rep.notes.emplace_back("zero HAC variance for a moment");
    if (x.mean() < 0.0)
        rep.notes.emplace_back("mean forecast negative: the x-moment points the other way for loss-sign VaR");
    rep.statistic = zmax;
    rep.components["p_const"] = p[0];
    rep.components["p_x"] = p[1];
    rep.p_value = std::min(1.0, 2.0 * std::min(p[0], p[1]));
    return rep;
}

TestReport vqr_backtest(const Vector& x, const Vector& y, double alpha, const HacOptions& hac) {
    return vqr_test(x, y, alpha, VqrNull::InterceptAndSlope, hac);
}

}  // namespace scoredec
