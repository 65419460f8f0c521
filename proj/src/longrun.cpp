#include "scoredec/longrun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "scoredec/errors.hpp"

namespace scoredec {

namespace {

// Direct lag sums beat the FFT route for short kernels.
constexpr Eigen::Index kDirectLagLimit = 256;

void accumulate_direct(const Matrix& u, Eigen::Index max_lag, Kernel k, double bw, Matrix& omega) {
    const Eigen::Index T = u.rows();
    const double Td = static_cast<double>(T);
    for (Eigen::Index j = 1; j <= max_lag; ++j) {
        const double w = kernel_weight(k, static_cast<double>(j) / bw);
        if (w == 0.0) continue;
        const Matrix G = u.bottomRows(T - j).transpose() * u.topRows(T - j) / Td;
        omega += w * (G + G.transpose());
    }
}

void accumulate_fft(const Matrix& u, Eigen::Index max_lag, Kernel k, double bw, Matrix& omega) {
    const Eigen::Index T = u.rows();
    const Eigen::Index m = u.cols();
    const double Td = static_cast<double>(T);
    size_t n = 1;
    while (n < static_cast<size_t>(2 * T)) n <<= 1;

    Eigen::FFT<double> fft;
    std::vector<std::vector<std::complex<double>>> spec(static_cast<size_t>(m));
    std::vector<double> buf(n, 0.0);
    for (Eigen::Index a = 0; a < m; ++a) {
        std::fill(buf.begin(), buf.end(), 0.0);
        for (Eigen::Index t = 0; t < T; ++t) buf[static_cast<size_t>(t)] = u(t, a);
        fft.fwd(spec[static_cast<size_t>(a)], buf);
    }
    std::vector<double> w(static_cast<size_t>(max_lag + 1), 0.0);
    for (Eigen::Index j = 1; j <= max_lag; ++j) w[static_cast<size_t>(j)] = kernel_weight(k, static_cast<double>(j) / bw);

    std::vector<std::complex<double>> prod(n);
    std::vector<double> corr;
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = a; b < m; ++b) {
            const auto& A = spec[static_cast<size_t>(a)];
            const auto& B = spec[static_cast<size_t>(b)];
            for (size_t i = 0; i < n; ++i) prod[i] = A[i] * std::conj(B[i]);
            fft.inv(corr, prod);
            // corr[j] = T Gamma_j(a, b), corr[n - j] = T Gamma_j(b, a)
            double s = 0.0;
            for (Eigen::Index j = 1; j <= max_lag; ++j) {
                const double wj = w[static_cast<size_t>(j)];
                if (wj == 0.0) continue;
                s += wj * (corr[static_cast<size_t>(j)] + corr[n - static_cast<size_t>(j)]);
            }
            omega(a, b) += s / Td;
            if (b != a) omega(b, a) += s / Td;
        }
    }
}

}  // namespace

double kernel_weight(Kernel k, double x) {
    x = std::abs(x);
    switch (k) {
        case Kernel::Bartlett: return std::max(0.0, 1.0 - x);
        case Kernel::QuadraticSpectral: {
            if (x == 0.0) return 1.0;
            const double z = 6.0 * std::numbers::pi * x / 5.0;
            if (z < 1e-2) {
                // series of sin(z)/z - cos(z) avoids cancellation
                const double z2 = z * z;
                return 1.0 - z2 / 10.0 + z2 * z2 / 280.0;
            }
            return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * x * x) * (std::sin(z) / z - std::cos(z));
        }
    }
    return 0.0;
}

double andrews_bandwidth(const Matrix& u, Kernel k) {
    const Eigen::Index T = u.rows();
    if (T < 3) return 0.0;
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
        const auto col = u.col(c);
        const double sxx = col.head(T - 1).squaredNorm();
        if (!(sxx > 0.0)) continue;
        double rho = col.tail(T - 1).dot(col.head(T - 1)) / sxx;
        rho = std::clamp(rho, -0.99, 0.99);
        const double s2 = (col.tail(T - 1) - rho * col.head(T - 1)).squaredNorm() / static_cast<double>(T - 1);
        if (!(s2 > 0.0)) continue;
        const double s4 = s2 * s2;
        const double om = 1.0 - rho;
        if (k == Kernel::QuadraticSpectral) {
            num += 4.0 * rho * rho * s4 / std::pow(om, 8);
        } else {
            num += 4.0 * rho * rho * s4 / (std::pow(om, 6) * (1.0 + rho) * (1.0 + rho));
        }
        den += s4 / std::pow(om, 4);
    }
    if (!(den > 0.0)) return 0.0;
    const double a = num / den;
    const double Td = static_cast<double>(T);
    if (k == Kernel::QuadraticSpectral) return 1.3221 * std::pow(a * Td, 0.2);
    return 1.1447 * std::pow(a * Td, 1.0 / 3.0);
}

LongRunCov hac_cov(const Matrix& series, const HacOptions& opt) {
    const Eigen::Index T = series.rows();
    const Eigen::Index m = series.cols();
    if (T < 10) throw InputError("HAC estimation needs at least 10 observations");
    if (!series.allFinite()) throw InputError("non-finite value in HAC input series");

    LongRunCov out;
    out.kernel = opt.kernel;
    Matrix u = series;
    const Eigen::VectorXd var = u.colwise().squaredNorm().transpose() / static_cast<double>(T);
    const double vmax = m > 0 ? var.maxCoeff() : 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
        if (!(var(c) > 1e-26 * vmax) || var(c) == 0.0) {
            u.col(c).setZero();
            out.degenerate_columns.push_back(static_cast<int>(c));
        }
    }

    const double bw = opt.automatic() ? andrews_bandwidth(u, opt.kernel) : opt.bandwidth;
    out.bandwidth = bw;
    Matrix omega = u.transpose() * u / static_cast<double>(T);

    Eigen::Index max_lag = 0;
    if (bw > 0.0) {
        if (opt.kernel == Kernel::Bartlett) {
            max_lag = std::min<Eigen::Index>(T - 1, static_cast<Eigen::Index>(std::ceil(bw)) - 1);
        } else {
            max_lag = T - 1;
        }
    }
    if (max_lag > 0) {
        if (max_lag <= kDirectLagLimit) {
            accumulate_direct(u, max_lag, opt.kernel, bw, omega);
        } else {
            accumulate_fft(u, max_lag, opt.kernel, bw, omega);
        }
    }
    out.matrix = symmetrize(omega);

    const double tr = out.matrix.trace();
    if (m > 0 && tr > 0.0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(out.matrix, Eigen::EigenvaluesOnly);
        out.singular = es.eigenvalues().minCoeff() <= 1e-10 * tr;
    } else {
        out.singular = true;
    }
    return out;
}

Matrix score_vector_series(const Decomposition& d1, const Decomposition& d2) {
    if (d1.size() != d2.size()) throw InputError("decompositions are based on different sample sizes");
    Matrix s(d1.size(), 5);
    s.col(0) = d1.per_obs.col(0);
    s.col(1) = d1.per_obs.col(1);
    s.col(2) = d2.per_obs.col(0);
    s.col(3) = d2.per_obs.col(1);
    s.col(4) = d1.per_obs.col(2);
    s.rowwise() -= s.colwise().mean();
    return s;
}

Matrix score_vector_series(const Decomposition& d) {
    Matrix s = d.per_obs;
    s.rowwise() -= s.colwise().mean();
    return s;
}

LongRunCov omega_hat(const Decomposition& d1, const Decomposition& d2, const HacOptions& opt) {
    return hac_cov(score_vector_series(d1, d2), opt);
}

QuadFormNuisance quadform_nuisance(const ScoringSpec& spec, const Matrix& W, const Vector& y, const Vector& theta,
                                   double r_hat, const HacOptions& opt) {
    if (!spec.smooth()) throw UnsupportedOperation("quadratic-form nuisance matrices need a smooth loss");
    if (W.rows() != y.size() || W.cols() != theta.size()) throw InputError("dimension mismatch in nuisance inputs");
    QuadFormNuisance q;
    q.kept_columns = independent_columns(W);
    const Matrix Wr = select_columns(W, q.kept_columns);
    const Vector fitted = W * theta;
    const Eigen::Index T = y.size();
    const double Td = static_cast<double>(T);
    const Eigen::Index p = Wr.cols();

    Vector s1(T), s2(T), s2r(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        s1(t) = score_d1(spec, fitted(t), y(t));
        s2(t) = score_d2(spec, fitted(t), y(t));
        s2r(t) = score_d2(spec, r_hat, y(t));
    }
    q.upsilon = symmetrize(Wr.transpose() * s2.asDiagonal() * Wr / Td);
    Eigen::LLT<Matrix> llt(q.upsilon);
    if (llt.info() != Eigen::Success) throw EstimationError("curvature matrix Upsilon is not positive definite");

    const Matrix M = symmetrize(Wr.transpose() * s2r.asDiagonal() * Wr / Td);
    Eigen::FullPivLU<Matrix> lu(M);
    if (!lu.isInvertible() || !(std::abs(M(0, 0)) > 0.0))
        throw EstimationError("reference curvature matrix is singular");
    q.h_inverse = symmetrize(lu.inverse());
    q.h_inverse(0, 0) -= 1.0 / M(0, 0);

    Matrix g(T, p);
    for (Eigen::Index t = 0; t < T; ++t) g.row(t) = s1(t) * Wr.row(t);
    g.rowwise() -= g.colwise().mean();
    const LongRunCov pi = hac_cov(g, opt);
    q.pi = pi.matrix;
    q.pi_bandwidth = pi.bandwidth;
    return q;
}

}  // namespace scoredec
