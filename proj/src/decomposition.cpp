#include "scoredec/decomposition.hpp"

#include "scoredec/errors.hpp"

namespace scoredec {

Decomposition decompose(const ScoringSpec& spec, const Vector& x, const Vector& y, const Matrix& extra) {
    spec.validate();
    if (x.size() != y.size()) throw InputError("forecasts and realizations differ in length");
    const Matrix W = make_design(x, extra);
    if (y.size() < W.cols() + 2) throw InputError("sample too short for the recalibration design");

    Decomposition d;
    d.design = W;
    d.r_hat = fit_reference(spec, y);
    d.fit = fit_linear(spec, W, y);
    d.theta_hat = d.fit.theta_hat;

    const Eigen::Index T = y.size();
    d.per_obs.resize(T, 3);
    for (Eigen::Index t = 0; t < T; ++t) {
        d.per_obs(t, 0) = score(spec, x(t), y(t));
        d.per_obs(t, 1) = score(spec, d.fit.fitted(t), y(t));
        d.per_obs(t, 2) = score(spec, d.r_hat, y(t));
    }
    const Eigen::Vector3d m = d.per_obs.colwise().mean();
    d.s_bar = m(0);
    d.unc = m(2);
    d.mcb = m(0) - m(1);
    d.dsc = m(2) - m(1);

    if (d.fit.rank_deficient) d.notes.emplace_back("collinear recalibration design: columns dropped");
    if (!d.fit.converged) d.notes.emplace_back("recalibration fit did not reach its convergence tolerance");
    if (spec.functional == Functional::Quantile)
        d.notes.emplace_back("reference value uses the lower empirical quantile convention");
    return d;
}

McbSplit split_mcb(const ScoringSpec& spec, const Vector& x, const Vector& y, const Decomposition& d) {
    McbSplit s;
    if (spec.functional == Functional::Mean) {
        s.shift = y.mean() - x.mean();
    } else {
        s.shift = lower_quantile(y - x, spec.level);
        s.notes.emplace_back("quantile shift uses the lower empirical quantile convention");
    }
    const Vector shifted = x.array() + s.shift;
    if (spec.family == LossFamily::QLike && !(shifted.minCoeff() > spec.domain_floor))
        throw InputError("mean-shifted forecast leaves the QLIKE domain");
    s.umcb = d.s_bar - mean_score(spec, shifted, y);
    s.cmcb = d.mcb - s.umcb;
    if (spec.family == LossFamily::QLike && s.umcb < 0.0)
        s.notes.emplace_back("mean shift is not score-optimal under QLIKE; uMCB negative");
    return s;
}

McbSplit split_mcb(const ScoringSpec& spec, const Vector& x, const Vector& y) {
    return split_mcb(spec, x, y, decompose(spec, x, y));
}

}  // namespace scoredec
