#include "scoredec/recalibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scoredec/errors.hpp"

namespace scoredec {

namespace {

constexpr int kNewtonMaxIter = 200;
constexpr double kNewtonGradTol = 1e-10;

void check_dims(const Matrix& W, const Vector& y) {
    if (W.rows() != y.size()) throw InputError("design and realizations differ in length");
    if (W.rows() == 0) throw InputError("empty sample");
    if (W.cols() == 0) throw InputError("design has no columns");
    if (W.rows() <= W.cols()) throw InputError("need more observations than design columns");
    if (!W.allFinite() || !y.allFinite()) throw InputError("non-finite value in design or realizations");
}

double sample_sd(const Vector& v) {
    if (v.size() < 2) return 0.0;
    const double m = v.mean();
    return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size() - 1));
}

// Least-squares coefficients of `target` on the full-rank design.
Vector ls_solve(const Matrix& W, const Vector& target) {
    return W.colPivHouseholderQr().solve(target);
}

// ---------------------------------------------------------------- QLIKE ----

struct QlikeProblem {
    const ScoringSpec& spec;
    const Matrix& W;
    const Vector& y;

    bool feasible(const Vector& f) const { return f.minCoeff() > spec.domain_floor; }

    double objective(const Vector& f) const {
        const Eigen::ArrayXd r = y.array() / f.array();
        return (r - r.log() - 1.0).mean();
    }
};

FitResult fit_qlike(const ScoringSpec& spec, const Matrix& W, const Vector& y, double r_hat, const Vector& x) {
    const auto T = static_cast<double>(y.size());
    const Eigen::Index p = W.cols();
    QlikeProblem prob{spec, W, y};

    // Candidate starts; the two probes are feasible whenever x and y are.
    std::vector<Vector> starts;
    Vector base = Vector::Zero(p);
    base(0) = r_hat;
    starts.push_back(base);
    starts.push_back(ls_solve(W, x));  // recovers (0, 1, 0, ...) in the original coordinates
    Vector se = ls_solve(W, y);
    for (int h = 0; h < 40; ++h) {
        const double lam = std::ldexp(1.0, -h);
        Vector cand = lam * se + (1.0 - lam) * base;
        if (prob.feasible(W * cand)) {
            starts.push_back(cand);
            break;
        }
    }

    Vector theta;
    double obj = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        Vector f = W * s;
        if (!prob.feasible(f)) continue;
        const double o = prob.objective(f);
        if (o < obj) {
            obj = o;
            theta = s;
        }
    }
    if (theta.size() == 0) throw EstimationError("QLIKE fit: no feasible starting point with positive fitted values");

    FitResult res;
    Vector f = W * theta;
    bool converged = false;
    int it = 0;
    for (; it < kNewtonMaxIter; ++it) {
        const Eigen::ArrayXd fa = f.array();
        const Eigen::ArrayXd ya = y.array();
        const Vector s1 = ((fa - ya) / fa.square()).matrix();
        const Vector g = W.transpose() * s1 / T;
        if (g.norm() <= kNewtonGradTol * (1.0 + std::abs(obj))) {
            converged = true;
            break;
        }
        const Vector s2 = ((2.0 * ya - fa) / fa.cube()).matrix();
        Matrix H = W.transpose() * s2.asDiagonal() * W / T;
        Vector d;
        Eigen::LLT<Matrix> llt(H);
        if (llt.info() == Eigen::Success) {
            d = -llt.solve(g);
        } else {
            const Vector fw = (1.0 / fa.square()).matrix();
            Matrix F = W.transpose() * fw.asDiagonal() * W / T;
            d = -F.ldlt().solve(g);
        }
        double slope = g.dot(d);
        if (!(slope < 0.0) || !d.allFinite()) {
            d = -g;
            slope = -g.squaredNorm();
        }
        // Newton decrement small enough: nothing left to gain
        if (-slope < 1e-24 * (1.0 + std::abs(obj))) {
            converged = true;
            break;
        }
        bool accepted = false;
        double t = 1.0;
        for (int h = 0; h < 60; ++h, t *= 0.5) {
            Vector th = theta + t * d;
            Vector fn = W * th;
            if (!prob.feasible(fn)) continue;
            const double on = prob.objective(fn);
            bool ok = on <= obj + 1e-4 * t * slope;
            if (!ok && h == 0 && on <= obj + 1e-13 * (1.0 + std::abs(obj))) {
                // objective changes are below rounding: judge the full step by the gradient
                const Eigen::ArrayXd fna = fn.array();
                const Vector gn = W.transpose() * ((fna - ya) / fna.square()).matrix() / T;
                ok = gn.norm() < 0.5 * g.norm();
            }
            if (ok) {
                theta = th;
                f = fn;
                obj = on;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // line search stalled at rounding level
            converged = g.norm() <= 1e-8 * (1.0 + std::abs(obj));
            break;
        }
    }
    res.theta_hat = theta;
    res.fitted = f;
    res.objective = obj;
    res.converged = converged;
    res.iterations = it;
    return res;
}

// ----------------------------------------------------------- check loss ----

double check_objective(const Vector& r, double alpha) {
    double s = 0.0;
    for (Eigen::Index t = 0; t < r.size(); ++t) s += r(t) * (r(t) < 0.0 ? alpha - 1.0 : alpha);
    return s;
}

// Contribution of a zero-residual row when its residual moves by `delta`.
inline double kink_rate(double delta, double alpha) { return delta > 0.0 ? alpha * delta : (alpha - 1.0) * delta; }

Vector irls_start(const Matrix& W, const Vector& y, double alpha) {
    const Eigen::Index p = W.cols();
    double scale = sample_sd(y);
    if (!(scale > 0.0)) scale = 1.0;
    Vector theta = ls_solve(W, y);
    Vector w(y.size());
    for (double eps = 1e-2; eps >= 1e-8 * 0.999; eps /= 10.0) {
        const double e = eps * scale;
        for (int it = 0; it < 50; ++it) {
            const Vector r = y - W * theta;
            for (Eigen::Index t = 0; t < r.size(); ++t)
                w(t) = (r(t) > 0.0 ? alpha : 1.0 - alpha) / std::max(std::abs(r(t)), e);
            const Matrix A = W.transpose() * w.asDiagonal() * W;
            const Vector b = W.transpose() * w.cwiseProduct(y);
            Vector next = A.ldlt().solve(b);
            if (!next.allFinite() || next.size() != p) break;
            const double step = (next - theta).lpNorm<Eigen::Infinity>();
            theta = next;
            if (step <= 1e-12 * (1.0 + theta.lpNorm<Eigen::Infinity>())) break;
        }
    }
    return theta;
}

// p linearly independent rows, preferring small absolute residuals.
std::vector<Eigen::Index> pick_basis(const Matrix& W, const Vector& r) {
    const Eigen::Index T = W.rows();
    const Eigen::Index p = W.cols();
    std::vector<Eigen::Index> order(static_cast<size_t>(T));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(r(a)) < std::abs(r(b)); });
    std::vector<Eigen::Index> basis;
    std::vector<Vector> q;
    for (Eigen::Index t : order) {
        Vector v = W.row(t).transpose();
        const double n0 = v.norm();
        if (!(n0 > 0.0)) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : q) v -= b.dot(v) * b;
        const double n = v.norm();
        if (n > 1e-8 * n0) {
            basis.push_back(t);
            q.push_back(v / n);
            if (static_cast<Eigen::Index>(basis.size()) == p) break;
        }
    }
    if (static_cast<Eigen::Index>(basis.size()) != p) throw EstimationError("quantile fit: no nonsingular basis");
    return basis;
}

Matrix basis_rows(const Matrix& W, const std::vector<Eigen::Index>& B) {
    Matrix WB(static_cast<Eigen::Index>(B.size()), W.cols());
    for (size_t i = 0; i < B.size(); ++i) WB.row(static_cast<Eigen::Index>(i)) = W.row(B[i]);
    return WB;
}

Vector basis_solve(const Matrix& W, const Vector& y, const std::vector<Eigen::Index>& B) {
    Vector yB(static_cast<Eigen::Index>(B.size()));
    for (size_t i = 0; i < B.size(); ++i) yB(static_cast<Eigen::Index>(i)) = y(B[i]);
    return basis_rows(W, B).partialPivLu().solve(yB);
}

FitResult fit_check(const Matrix& W, const Vector& y, double alpha) {
    const Eigen::Index T = W.rows();
    const Eigen::Index p = W.cols();
    const double ymax = y.lpNorm<Eigen::Infinity>();

    Vector theta = irls_start(W, y, alpha);
    std::vector<Eigen::Index> B = pick_basis(W, y - W * theta);
    theta = basis_solve(W, y, B);

    std::vector<char> in_basis(static_cast<size_t>(T), 0);
    for (auto b : B) in_basis[static_cast<size_t>(b)] = 1;

    const int max_iter = 50 * static_cast<int>(T) + 100;
    bool optimal = false;
    int it = 0;
    Vector r;
    for (; it < max_iter; ++it) {
        r = y - W * theta;
        const double rtol = 1e-11 * (1.0 + ymax);
        const Matrix WB = basis_rows(W, B);
        Eigen::PartialPivLU<Matrix> lu(WB);
        const Matrix WBinv = lu.inverse();

        Vector a = Vector::Zero(p);
        std::vector<Eigen::Index> zero_rows;
        for (Eigen::Index t = 0; t < T; ++t) {
            if (in_basis[static_cast<size_t>(t)]) continue;
            if (std::abs(r(t)) <= rtol) {
                zero_rows.push_back(t);
                continue;
            }
            const double psi = r(t) < 0.0 ? alpha - 1.0 : alpha;
            a.noalias() += psi * W.row(t).transpose();
        }
        const Vector u = -WBinv.transpose() * a;

        // edge directions: W_B d = s e_j frees basis row j
        double best = 0.0;
        Eigen::Index best_j = -1;
        double best_s = 0.0;
        double scale = 1.0 + a.lpNorm<1>();
        for (Eigen::Index j = 0; j < p; ++j) {
            for (double s : {1.0, -1.0}) {
                double D = s * u(j) + (s > 0.0 ? 1.0 - alpha : alpha);
                if (!zero_rows.empty()) {
                    const Vector d = s * WBinv.col(j);
                    for (auto t : zero_rows) D += kink_rate(-W.row(t).dot(d), alpha);
                }
                if (D < best) {
                    best = D;
                    best_j = j;
                    best_s = s;
                }
            }
        }
        if (best_j < 0 || best > -1e-12 * scale) {
            optimal = true;
            break;
        }

        const Vector d = best_s * WBinv.col(best_j);
        const Vector ad = W * d;
        std::vector<std::pair<double, Eigen::Index>> kinks;
        for (Eigen::Index t = 0; t < T; ++t) {
            if (in_basis[static_cast<size_t>(t)] || std::abs(r(t)) <= rtol || ad(t) == 0.0) continue;
            const double tau = r(t) / ad(t);
            if (tau > 0.0) kinks.emplace_back(tau, t);
        }
        std::sort(kinks.begin(), kinks.end());
        double slope = best;
        Eigen::Index enter = -1;
        for (const auto& [tau, t] : kinks) {
            slope += std::abs(ad(t));
            if (slope >= 0.0) {
                enter = t;
                break;
            }
        }
        if (enter < 0) break;  // cannot happen for a bounded objective
        in_basis[static_cast<size_t>(B[static_cast<size_t>(best_j)])] = 0;
        B[static_cast<size_t>(best_j)] = enter;
        in_basis[static_cast<size_t>(enter)] = 1;
        theta = basis_solve(W, y, B);
    }

    FitResult res;
    res.theta_hat = theta;
    res.fitted = W * theta;
    res.objective = check_objective(y - res.fitted, alpha) / static_cast<double>(T);
    res.converged = optimal;
    res.iterations = it;
    return res;
}

}  // namespace

double lower_quantile(const Vector& v, double alpha) {
    if (v.size() == 0) throw InputError("empty sample");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("quantile level must lie in (0, 1)");
    std::vector<double> s(v.data(), v.data() + v.size());
    auto idx = static_cast<long>(std::ceil(alpha * static_cast<double>(s.size()))) - 1;
    idx = std::clamp<long>(idx, 0, static_cast<long>(s.size()) - 1);
    std::nth_element(s.begin(), s.begin() + idx, s.end());
    return s[static_cast<size_t>(idx)];
}

double fit_reference(const ScoringSpec& spec, const Vector& y) {
    spec.validate();
    if (y.size() == 0) throw InputError("empty sample");
    if (spec.family == LossFamily::QLike && !(y.minCoeff() > spec.domain_floor))
        throw InputError("QLIKE requires strictly positive realizations");
    if (spec.functional == Functional::Mean) return y.mean();
    return lower_quantile(y, spec.level);
}

double mean_score(const ScoringSpec& spec, const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw InputError("forecasts and realizations differ in length");
    double s = 0.0;
    for (Eigen::Index t = 0; t < x.size(); ++t) s += score(spec, x(t), y(t));
    return s / static_cast<double>(x.size());
}

FitResult fit_linear(const ScoringSpec& spec, const Matrix& W, const Vector& y) {
    spec.validate();
    check_dims(W, y);
    const double r_hat = fit_reference(spec, y);

    const std::vector<int> kept = independent_columns(W);
    if (kept.empty() || kept.front() != 0) throw InputError("design column 0 must be the (nonzero) intercept");
    const Matrix Wr = select_columns(W, kept);

    FitResult res;
    if (Wr.cols() == 1) {
        // intercept only: the reference value is optimal by definition
        res.theta_hat = Vector::Constant(1, r_hat / W(0, 0));
        res.fitted = Wr * res.theta_hat;
        res.objective = mean_score(spec, res.fitted, y);
        res.converged = true;
    } else {
        switch (spec.family) {
            case LossFamily::SquaredError: {
                res.theta_hat = ls_solve(Wr, y);
                res.fitted = Wr * res.theta_hat;
                res.objective = mean_score(spec, res.fitted, y);
                res.converged = true;
                res.iterations = 1;
                break;
            }
            case LossFamily::QLike: res = fit_qlike(spec, Wr, y, r_hat, W.col(1)); break;
            case LossFamily::CheckLoss: res = fit_check(Wr, y, spec.level); break;
        }
    }

    Vector full = Vector::Zero(W.cols());
    for (size_t j = 0; j < kept.size(); ++j) full(kept[j]) = res.theta_hat(static_cast<Eigen::Index>(j));
    res.theta_hat = full;
    res.rank_deficient = static_cast<Eigen::Index>(kept.size()) < W.cols();
    res.kept_columns = kept;
    return res;
}

QuantileCertificate quantile_certificate(const Matrix& W, const Vector& y, const Vector& theta, double alpha,
                                         double tol) {
    const Eigen::Index T = W.rows();
    const Vector r = y - W * theta;
    const double rtol = 1e-9 * (1.0 + y.lpNorm<Eigen::Infinity>());
    Vector a = Vector::Zero(W.cols());
    std::vector<Eigen::Index> Z;
    for (Eigen::Index t = 0; t < T; ++t) {
        if (std::abs(r(t)) <= rtol) {
            Z.push_back(t);
        } else {
            a.noalias() += (r(t) < 0.0 ? alpha - 1.0 : alpha) * W.row(t).transpose();
        }
    }
    // box-constrained least squares by cyclic coordinate descent
    const auto nz = static_cast<Eigen::Index>(Z.size());
    Vector u = Vector::Zero(nz);
    Vector resid = a;
    if (nz > 0) {
        Matrix WZ(nz, W.cols());
        for (Eigen::Index i = 0; i < nz; ++i) WZ.row(i) = W.row(Z[static_cast<size_t>(i)]);
        // unconstrained start, then clip into the box
        u = (-WZ.transpose()).completeOrthogonalDecomposition().solve(a);
        u = u.cwiseMax(alpha - 1.0).cwiseMin(alpha);
        resid = a + WZ.transpose() * u;
        for (int sweep = 0; sweep < 5000; ++sweep) {
            double change = 0.0;
            for (Eigen::Index i = 0; i < nz; ++i) {
                const double nn = WZ.row(i).squaredNorm();
                if (!(nn > 0.0)) continue;
                const double ui = std::clamp(u(i) - WZ.row(i).dot(resid) / nn, alpha - 1.0, alpha);
                const double du = ui - u(i);
                if (du != 0.0) {
                    resid.noalias() += du * WZ.row(i).transpose();
                    u(i) = ui;
                    change = std::max(change, std::abs(du));
                }
            }
            if (change < 1e-15) break;
        }
    }
    QuantileCertificate c;
    c.zero_rows = static_cast<int>(nz);
    const double scale = static_cast<double>(T) * (1.0 + W.lpNorm<Eigen::Infinity>());
    c.residual = resid.norm() / scale;
    c.holds = c.residual <= tol;
    return c;
}

}  // namespace scoredec
