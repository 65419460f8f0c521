#include "scoredec/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "scoredec/errors.hpp"

namespace scoredec {

namespace {

const boost::math::normal kStdNormal;

double two_sided_normal_p(double z) {
    if (!std::isfinite(z)) return std::isnan(z) ? 1.0 : 0.0;
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

double chi2_sf(double stat, double df) {
    if (std::isnan(stat)) return 1.0;
    if (stat == std::numeric_limits<double>::infinity()) return 0.0;
    if (stat <= 0.0) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

// Eigenvalues of 0.5 P^{1/2} A P^{1/2}. Small negative dust is clipped; a
// clearly indefinite form is reported as an estimation failure.
std::vector<double> quadform_weights(const Matrix& pi, const Matrix& A) {
    const Matrix P = psd_sqrt(pi);
    const Matrix Q = symmetrize(0.5 * P * A * P);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
    const Vector ev = es.eigenvalues();
    const double maxabs = ev.cwiseAbs().maxCoeff();
    std::vector<double> w;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double l = ev(i);
        if (l < 0.0) {
            if (l < -1e-8 * maxabs) {
                std::ostringstream msg;
                msg << "indefinite quadratic form in boundary test; eigenvalues:";
                for (Eigen::Index j = 0; j < ev.size(); ++j) msg << ' ' << ev(j);
                throw EstimationError(msg.str());
            }
            l = 0.0;
        }
        w.push_back(l);
    }
    return w;
}

TestReport boundary_test(const ScoringSpec& spec, const Decomposition& d, const Vector& y, const HacOptions& hac,
                         bool mcb) {
    TestReport rep;
    rep.name = mcb ? "MCB=0" : "DSC=0";
    if (!spec.smooth()) {
        rep = vqr_test(d.design, y, spec.level, mcb ? VqrNull::InterceptAndSlope : VqrNull::SlopeOnly, hac);
        rep.name = mcb ? "MCB=0" : "DSC=0";
        return rep;
    }
    const QuadFormNuisance nu = quadform_nuisance(spec, d.design, y, d.theta_hat, d.r_hat, hac);
    const double T = static_cast<double>(d.size());
    rep.statistic = T * (mcb ? d.mcb : d.dsc);
    const Matrix A = mcb ? Matrix(nu.upsilon.inverse()) : nu.h_inverse;
    rep.weights = quadform_weights(nu.pi, A);
    rep.p_value = imhof_pvalue(rep.statistic, rep.weights);
    rep.method = TestMethod::Imhof;
    rep.nuisance["upsilon"] = nu.upsilon;
    rep.nuisance["h_inverse"] = nu.h_inverse;
    rep.nuisance["pi"] = nu.pi;
    if (std::all_of(rep.weights.begin(), rep.weights.end(), [](double w) { return w == 0.0; })) {
        rep.degenerate = true;
        rep.notes.emplace_back("all quadratic-form weights vanish");
    }
    if (d.fit.rank_deficient) rep.notes.emplace_back("collinear recalibration design: columns dropped");
    return rep;
}

TestReport combined_test(const ScoringSpec& spec, const Decomposition& d1, const Decomposition& d2, const Vector& y,
                         const LongRunCov& omega, const HacOptions& hac, bool mcb) {
    const TestReport plus = gaussian_component_test(d1, d2, mcb ? kSelectMcb : kSelectDsc, omega);
    const TestReport z1 = boundary_test(spec, d1, y, hac, mcb);
    const TestReport z2 = boundary_test(spec, d2, y, hac, mcb);
    TestReport rep;
    rep.name = mcb ? "equal MCB" : "equal DSC";
    rep.method = TestMethod::Combined;
    rep.statistic = plus.statistic;
    rep.components["p_plus"] = plus.p_value;
    rep.components["p0_1"] = z1.p_value;
    rep.components["p0_2"] = z2.p_value;
    rep.p_value = combine_pvalues(plus.p_value, z1.p_value, z2.p_value);
    rep.degenerate = plus.degenerate;
    if (plus.degenerate) rep.notes.emplace_back("Gaussian variance degenerate: p_plus set to 1");
    for (const auto* r : {&z1, &z2})
        for (const auto& n : r->notes) rep.notes.push_back(n);
    rep.nuisance["omega"] = omega.matrix;
    return rep;
}

}  // namespace

std::string to_string(TestMethod m) {
    switch (m) {
        case TestMethod::Gaussian: return "gaussian";
        case TestMethod::Imhof: return "imhof";
        case TestMethod::VQRWald: return "vqr";
        case TestMethod::Combined: return "combined";
        case TestMethod::Binomial: return "binomial";
        case TestMethod::Normal: return "normal";
        case TestMethod::Wald: return "wald";
    }
    return "unknown";
}

Matrix xi_matrix() {
    Matrix xi(4, 5);
    xi << 1, -1, 0, 0, 0,  //
        0, -1, 0, 0, 1,    //
        0, 0, 1, -1, 0,    //
        0, 0, 0, -1, 1;
    return xi;
}

TestReport gaussian_component_test(const Decomposition& d1, const Decomposition& d2, const Eigen::Vector4d& omega_sel,
                                   const LongRunCov& omega) {
    if (d1.size() != d2.size()) throw InputError("decompositions are based on different sample sizes");
    if (omega.matrix.rows() != 5 || omega.matrix.cols() != 5) throw InputError("Omega must be 5 x 5");
    TestReport rep;
    rep.name = "gaussian";
    rep.method = TestMethod::Gaussian;
    const Eigen::Vector4d comp{d1.mcb, d1.dsc, d2.mcb, d2.dsc};
    const Vector a = xi_matrix().transpose() * omega_sel;
    const double var = a.dot(omega.matrix * a);
    const double scale = omega.matrix.diagonal().cwiseAbs().maxCoeff() * a.squaredNorm();
    const double T = static_cast<double>(d1.size());
    rep.nuisance["omega"] = omega.matrix;
    if (!(var > 1e-12 * scale) || !(var > 0.0)) {
        rep.statistic = 0.0;
        rep.p_value = 1.0;
        rep.degenerate = true;
        rep.notes.emplace_back("non-positive variance of the selected contrast");
        return rep;
    }
    rep.statistic = std::sqrt(T) * omega_sel.dot(comp) / std::sqrt(var);
    rep.p_value = two_sided_normal_p(rep.statistic);
    return rep;
}

TestReport test_mcb_zero(const ScoringSpec& spec, const Decomposition& d, const Vector& y, const HacOptions& hac) {
    return boundary_test(spec, d, y, hac, true);
}

TestReport test_dsc_zero(const ScoringSpec& spec, const Decomposition& d, const Vector& y, const HacOptions& hac) {
    return boundary_test(spec, d, y, hac, false);
}

TestReport test_mcb_zero(const ScoringSpec& spec, const Vector& x, const Vector& y, const Matrix& extra,
                         const HacOptions& hac) {
    return boundary_test(spec, decompose(spec, x, y, extra), y, hac, true);
}

TestReport test_dsc_zero(const ScoringSpec& spec, const Vector& x, const Vector& y, const Matrix& extra,
                         const HacOptions& hac) {
    return boundary_test(spec, decompose(spec, x, y, extra), y, hac, false);
}

double combine_pvalues(double p_plus, double p0_1, double p0_2) {
    for (double p : {p_plus, p0_1, p0_2})
        if (!(p >= 0.0 && p <= 1.0)) throw InputError("p-values must lie in [0, 1]");
    return std::max(p_plus, std::min(1.0, 2.0 * std::min(p0_1, p0_2)));
}

TestReport test_equal_mcb(const ScoringSpec& spec, const Decomposition& d1, const Decomposition& d2, const Vector& y,
                          const LongRunCov& omega, const HacOptions& hac) {
    return combined_test(spec, d1, d2, y, omega, hac, true);
}

TestReport test_equal_dsc(const ScoringSpec& spec, const Decomposition& d1, const Decomposition& d2, const Vector& y,
                          const LongRunCov& omega, const HacOptions& hac) {
    return combined_test(spec, d1, d2, y, omega, hac, false);
}

TestReport test_equal_mcb(const ScoringSpec& spec, const Vector& x1, const Vector& x2, const Vector& y,
                          const Matrix& extra1, const Matrix& extra2, const HacOptions& hac) {
    const Decomposition d1 = decompose(spec, x1, y, extra1);
    const Decomposition d2 = decompose(spec, x2, y, extra2);
    return combined_test(spec, d1, d2, y, omega_hat(d1, d2, hac), hac, true);
}

TestReport test_equal_dsc(const ScoringSpec& spec, const Vector& x1, const Vector& x2, const Vector& y,
                          const Matrix& extra1, const Matrix& extra2, const HacOptions& hac) {
    const Decomposition d1 = decompose(spec, x1, y, extra1);
    const Decomposition d2 = decompose(spec, x2, y, extra2);
    return combined_test(spec, d1, d2, y, omega_hat(d1, d2, hac), hac, false);
}

TestReport test_dm(const ScoringSpec& spec, const Vector& x1, const Vector& x2, const Vector& y, const HacOptions& hac) {
    const Decomposition d1 = decompose(spec, x1, y);
    const Decomposition d2 = decompose(spec, x2, y);
    TestReport rep = gaussian_component_test(d1, d2, kSelectDm, omega_hat(d1, d2, hac));
    rep.name = "DM";
    return rep;
}

double hall_sheather_bandwidth(Eigen::Index T, double alpha, double conf) {
    const double x0 = boost::math::quantile(kStdNormal, alpha);
    const double f0 = boost::math::pdf(kStdNormal, x0);
    const double zc = boost::math::quantile(kStdNormal, 1.0 - conf / 2.0);
    return std::pow(static_cast<double>(T), -1.0 / 3.0) * std::pow(zc, 2.0 / 3.0) *
           std::pow(1.5 * f0 * f0 / (2.0 * x0 * x0 + 1.0), 1.0 / 3.0);
}

TestReport vqr_test(const Matrix& W, const Vector& y, double alpha, VqrNull null, const HacOptions& hac) {
    const ScoringSpec spec = ScoringSpec::check_loss(alpha);
    const Eigen::Index T = y.size();
    TestReport rep;
    rep.name = null == VqrNull::InterceptAndSlope ? "VQR" : "VQR slope";
    rep.method = TestMethod::VQRWald;
    if (T < 50) rep.notes.emplace_back("fewer than 50 observations: VQR asymptotics unreliable");

    const FitResult fit = fit_linear(spec, W, y);
    if (fit.rank_deficient) throw EstimationError("VQR test: rank-deficient design, coefficients unidentified");
    const Eigen::Index k = W.cols();
    const Vector r = y - fit.fitted;

    // Hall-Sheather bandwidth, mapped from probability to residual units
    const double hp = hall_sheather_bandwidth(T, alpha);
    const double lo = std::max(alpha - hp, 1e-10);
    const double hi = std::min(alpha + hp, 1.0 - 1e-10);
    const double spread = boost::math::quantile(kStdNormal, hi) - boost::math::quantile(kStdNormal, lo);
    const double mean_r = r.mean();
    const double sd = std::sqrt((r.array() - mean_r).square().sum() / static_cast<double>(std::max<Eigen::Index>(T - 1, 1)));
    const double iqr = lower_quantile(r, 0.75) - lower_quantile(r, 0.25);
    double s = std::min(sd, iqr / 1.34);
    if (!(s > 0.0)) s = sd;
    const double h = spread * s;

    Matrix D = Matrix::Zero(k, k);
    for (Eigen::Index t = 0; t < T; ++t)
        if (std::abs(r(t)) <= h) D.noalias() += W.row(t).transpose() * W.row(t);
    D /= 2.0 * static_cast<double>(T) * h;
    if (!(h > 0.0) || !(D(0, 0) >= 1e-10)) throw EstimationError("VQR test: conditional density estimate below 1e-10");
    Eigen::FullPivLU<Matrix> Dlu(D);
    if (!Dlu.isInvertible()) throw EstimationError("VQR test: singular density matrix");
    const Matrix Dinv = Dlu.inverse();

    Matrix g(T, k);
    for (Eigen::Index t = 0; t < T; ++t) g.row(t) = ((r(t) <= 0.0 ? 1.0 : 0.0) - alpha) * W.row(t);
    g.rowwise() -= g.colwise().mean();
    const LongRunCov om = hac_cov(g, hac);
    const Matrix V = symmetrize(Dinv * om.matrix * Dinv) / static_cast<double>(T);

    Vector diff;
    Matrix VR;
    if (null == VqrNull::InterceptAndSlope) {
        Vector target = Vector::Zero(k);
        target(1) = 1.0;
        diff = fit.theta_hat - target;
        VR = V;
    } else {
        diff = fit.theta_hat.tail(k - 1);
        VR = V.bottomRightCorner(k - 1, k - 1);
    }
    rep.df = static_cast<double>(diff.size());
    Eigen::LDLT<Matrix> ldlt(VR);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
        rep.degenerate = true;
        rep.notes.emplace_back("VQR covariance not positive definite");
        rep.statistic = diff.isZero(0.0) ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        rep.statistic = diff.dot(ldlt.solve(diff));
    }
    rep.p_value = chi2_sf(rep.statistic, rep.df);
    rep.nuisance["density"] = D;
    rep.nuisance["omega"] = om.matrix;
    rep.nuisance["theta"] = fit.theta_hat;
    rep.notes.emplace_back("Powell sandwich, uniform kernel, Hall-Sheather bandwidth");
    return rep;
}

TestReport vqr_test(const Vector& x, const Vector& y, double alpha, VqrNull null, const HacOptions& hac) {
    return vqr_test(make_design(x), y, alpha, null, hac);
}

Interval component_ci(const ScoringSpec& spec, const Vector& x, const Vector& y, Component which, double level,
                      const std::optional<Vector>& x2, const HacOptions& hac) {
    if (!(level >= 0.0 && level < 1.0)) throw InputError("confidence level must lie in [0, 1)");
    const double z = level == 0.0 ? 0.0 : boost::math::quantile(kStdNormal, 0.5 + level / 2.0);
    const Decomposition d1 = decompose(spec, x, y);
    Interval ci;
    double var = 0.0;
    bool truncate = false;
    if (which == Component::MCB || which == Component::DSC) {
        const LongRunCov om = hac_cov(score_vector_series(d1), hac);
        const Eigen::Vector3d a = which == Component::MCB ? Eigen::Vector3d{1, -1, 0} : Eigen::Vector3d{0, -1, 1};
        var = a.dot(om.matrix * a);
        ci.estimate = which == Component::MCB ? d1.mcb : d1.dsc;
        truncate = true;
    } else {
        if (!x2) throw InputError("difference intervals need a second forecast");
        const Decomposition d2 = decompose(spec, *x2, y);
        const LongRunCov om = omega_hat(d1, d2, hac);
        const Eigen::Vector4d sel = which == Component::MCBdiff ? kSelectMcb : kSelectDsc;
        const Vector a = xi_matrix().transpose() * sel;
        var = a.dot(om.matrix * a);
        ci.estimate = which == Component::MCBdiff ? d1.mcb - d2.mcb : d1.dsc - d2.dsc;
    }
    const double half = z * std::sqrt(std::max(var, 0.0) / static_cast<double>(y.size()));
    ci.lower = ci.estimate - half;
    ci.upper = ci.estimate + half;
    if (truncate) {
        ci.lower = std::max(ci.lower, 0.0);
        ci.upper = std::max(ci.upper, ci.lower);
    }
    return ci;
}

}  // namespace scoredec
