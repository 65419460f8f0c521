#include <cmath>
#include <random>

#include "doctest.h"
#include "scoredec/errors.hpp"
#include "scoredec/longrun.hpp"
#include "test_util.hpp"

using namespace scoredec;

namespace {

// Plain lag-sum reference, written independently of the library paths.
Matrix naive_hac(const Matrix& u, Kernel k, double bw) {
    const Eigen::Index T = u.rows();
    Matrix out = u.transpose() * u / static_cast<double>(T);
    for (Eigen::Index j = 1; j < T; ++j) {
        const double w = kernel_weight(k, j / bw);
        if (w == 0.0) continue;
        Matrix G = Matrix::Zero(u.cols(), u.cols());
        for (Eigen::Index t = j; t < T; ++t) G += u.row(t).transpose() * u.row(t - j);
        G /= static_cast<double>(T);
        out += w * (G + G.transpose());
    }
    return out;
}

Matrix ar1(std::mt19937_64& rng, Eigen::Index T, double rho, int cols = 1) {
    std::normal_distribution<double> nd;
    Matrix u(T, cols);
    for (int c = 0; c < cols; ++c) {
        double v = nd(rng) / std::sqrt(1.0 - rho * rho);
        for (Eigen::Index t = 0; t < T; ++t) {
            v = rho * v + nd(rng);
            u(t, c) = v;
        }
    }
    u.rowwise() -= u.colwise().mean();
    return u;
}

}  // namespace

TEST_CASE("kernel weights") {
    CHECK(kernel_weight(Kernel::QuadraticSpectral, 0.0) == 1.0);
    CHECK(kernel_weight(Kernel::Bartlett, 0.0) == 1.0);
    CHECK(kernel_weight(Kernel::Bartlett, 0.25) == doctest::Approx(0.75));
    CHECK(kernel_weight(Kernel::Bartlett, 1.5) == 0.0);
    CHECK(kernel_weight(Kernel::QuadraticSpectral, 1e-6) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(kernel_weight(Kernel::QuadraticSpectral, -0.7) == kernel_weight(Kernel::QuadraticSpectral, 0.7));
}

TEST_CASE("iid series recovers the identity") {
    std::mt19937_64 rng(21);
    Matrix u(50000, 3);
    for (int c = 0; c < 3; ++c) u.col(c) = testutil::normals(rng, 50000);
    u.rowwise() -= u.colwise().mean();
    const LongRunCov lr = hac_cov(u);
    CHECK((lr.matrix - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 0.05);
    CHECK_FALSE(lr.degenerate());
}

TEST_CASE("AR(1) long-run variance") {
    std::mt19937_64 rng(22);
    const Matrix u = ar1(rng, 100000, 0.5);
    // 1 / (1 - rho)^2 = 4
    for (Kernel k : {Kernel::QuadraticSpectral, Kernel::Bartlett}) {
        const LongRunCov lr = hac_cov(u, {k, -1.0});
        CHECK(std::abs(lr.matrix(0, 0) - 4.0) <= 0.4);
        CHECK(lr.bandwidth > 0.0);
    }
}

TEST_CASE("zero bandwidth gives the sample covariance") {
    std::mt19937_64 rng(23);
    const Matrix u = ar1(rng, 400, 0.3, 2);
    const LongRunCov lr = hac_cov(u, {Kernel::QuadraticSpectral, 0.0});
    CHECK((lr.matrix - u.transpose() * u / 400.0).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("FFT and direct lag sums agree with a naive reference") {
    std::mt19937_64 rng(24);
    const Matrix u = ar1(rng, 1200, 0.6, 3);
    for (Kernel k : {Kernel::QuadraticSpectral, Kernel::Bartlett}) {
        // the QS kernel and a 400-lag Bartlett window take the FFT route, bandwidth 8 Bartlett the direct one
        for (double bw : {8.0, 400.0}) {
            const LongRunCov lr = hac_cov(u, {k, bw});
            const Matrix ref = naive_hac(u, k, bw);
            CHECK((lr.matrix - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("scale equivariance and symmetry") {
    std::mt19937_64 rng(25);
    const Matrix u = ar1(rng, 800, 0.4, 3);
    const LongRunCov a = hac_cov(u);
    const LongRunCov b = hac_cov(3.0 * u);
    CHECK(a.bandwidth == doctest::Approx(b.bandwidth).epsilon(1e-10));
    CHECK((b.matrix - 9.0 * a.matrix).cwiseAbs().maxCoeff() <= 1e-10 * b.matrix.cwiseAbs().maxCoeff());
    CHECK((a.matrix - a.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("degenerate and singular inputs are flagged") {
    std::mt19937_64 rng(26);
    Matrix u(300, 3);
    u.col(0) = testutil::normals(rng, 300);
    u.col(1).setZero();
    u.col(2) = 2.0 * u.col(0);
    u.rowwise() -= u.colwise().mean();
    const LongRunCov lr = hac_cov(u);
    REQUIRE(lr.degenerate_columns.size() == 1);
    CHECK(lr.degenerate_columns[0] == 1);
    CHECK(lr.singular);
    CHECK_THROWS_AS(hac_cov(Matrix::Zero(5, 2)), InputError);
}

TEST_CASE("omega of a forecast paired with itself") {
    std::mt19937_64 rng(27);
    const Vector x = testutil::normals(rng, 600);
    const Vector y = ((0.8 * x).array() + 0.2).matrix() + testutil::normals(rng, 600);
    const Decomposition d = decompose(ScoringSpec::squared_error(), x, y);
    const LongRunCov om = omega_hat(d, d);
    // columns (a1, c1) and (a2, c2) coincide
    CHECK((om.matrix.block(0, 0, 2, 2) - om.matrix.block(2, 2, 2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((om.matrix.block(0, 0, 2, 2) - om.matrix.block(0, 2, 2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(om.singular);
}

TEST_CASE("SE nuisance matrices in closed form") {
    std::mt19937_64 rng(28);
    const Eigen::Index T = 500;
    const Vector x = testutil::normals(rng, T);
    const Vector y = x + testutil::normals(rng, T);
    const auto se = ScoringSpec::squared_error();
    const Decomposition d = decompose(se, x, y);
    const QuadFormNuisance q = quadform_nuisance(se, d.design, y, d.theta_hat, d.r_hat);
    const Matrix WtW = d.design.transpose() * d.design / static_cast<double>(T);
    CHECK((q.upsilon - 2.0 * WtW).cwiseAbs().maxCoeff() <= 1e-12);
    Matrix h = (2.0 * WtW).inverse();
    h(0, 0) -= 0.5;
    CHECK((q.h_inverse - h).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(q.pi.rows() == 2);
    CHECK_THROWS_AS(quadform_nuisance(ScoringSpec::check_loss(0.5), d.design, y, d.theta_hat, d.r_hat),
                    UnsupportedOperation);
}

TEST_CASE("QLIKE curvature matches a finite-difference Hessian") {
    std::mt19937_64 rng(29);
    const Eigen::Index T = 400;
    const Vector x = testutil::uniforms(rng, T, 0.5, 2.5);
    Vector y(T);
    std::gamma_distribution<double> gd(3.0, 1.0 / 3.0);
    for (Eigen::Index t = 0; t < T; ++t) y(t) = x(t) * gd(rng);
    const auto ql = ScoringSpec::qlike();
    const Decomposition d = decompose(ql, x, y);
    const QuadFormNuisance q = quadform_nuisance(ql, d.design, y, d.theta_hat, d.r_hat);

    auto grad = [&](const Vector& th) {
        Vector g = Vector::Zero(2);
        const Vector f = d.design * th;
        for (Eigen::Index t = 0; t < T; ++t) g += score_d1(ql, f(t), y(t)) * d.design.row(t).transpose();
        return Vector(g / static_cast<double>(T));
    };
    Matrix H(2, 2);
    for (int i = 0; i < 2; ++i) {
        Vector e = Vector::Zero(2);
        e(i) = 1e-5;
        H.col(i) = (grad(d.theta_hat + e) - grad(d.theta_hat - e)) / 2e-5;
    }
    CHECK((q.upsilon - H).cwiseAbs().maxCoeff() <= 1e-4 * H.cwiseAbs().maxCoeff());
}
