#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "scoredec/errors.hpp"
#include "scoredec/inference.hpp"
#include "test_util.hpp"

using namespace scoredec;

namespace {

// DM statistic from scratch: QS-weighted autocovariances of the loss differential.
double naive_dm(const ScoringSpec& spec, const Vector& x1, const Vector& x2, const Vector& y, double bw) {
    const Eigen::Index T = y.size();
    Vector d(T);
    for (Eigen::Index t = 0; t < T; ++t) d(t) = score(spec, x1(t), y(t)) - score(spec, x2(t), y(t));
    const double mean = d.mean();
    const Vector u = (d.array() - mean).matrix();
    double lrv = u.squaredNorm() / T;
    for (Eigen::Index j = 1; j < T; ++j) {
        const double w = kernel_weight(Kernel::QuadraticSpectral, j / bw);
        lrv += 2.0 * w * u.tail(T - j).dot(u.head(T - j)) / T;
    }
    return std::sqrt(static_cast<double>(T)) * mean / std::sqrt(lrv);
}

}  // namespace

TEST_CASE("combination rule") {
    CHECK(combine_pvalues(0.2, 0.01, 0.5) == doctest::Approx(0.2));
    CHECK(combine_pvalues(0.01, 0.3, 0.4) == doctest::Approx(0.6));
    CHECK(combine_pvalues(1.0, 1.0, 1.0) == 1.0);
    CHECK(combine_pvalues(0.0, 0.0, 0.7) == 0.0);
    CHECK_THROWS_AS(combine_pvalues(1.2, 0.1, 0.1), InputError);
    CHECK_THROWS_AS(combine_pvalues(0.5, -0.1, 0.1), InputError);
}

TEST_CASE("xi matrix maps scores to components") {
    std::mt19937_64 rng(31);
    const Vector y = testutil::normals(rng, 200);
    const Vector x1 = ((0.5 * y).array() + 0.2).matrix() + testutil::normals(rng, 200);
    const Vector x2 = testutil::normals(rng, 200);
    const auto se = ScoringSpec::squared_error();
    const Decomposition d1 = decompose(se, x1, y);
    const Decomposition d2 = decompose(se, x2, y);
    Vector means(5);
    means << d1.per_obs.col(0).mean(), d1.per_obs.col(1).mean(), d2.per_obs.col(0).mean(), d2.per_obs.col(1).mean(),
        d1.per_obs.col(2).mean();
    const Vector comp = xi_matrix() * means;
    CHECK(comp(0) == doctest::Approx(d1.mcb).epsilon(1e-12));
    CHECK(comp(1) == doctest::Approx(d1.dsc).epsilon(1e-12));
    CHECK(comp(2) == doctest::Approx(d2.mcb).epsilon(1e-12));
    CHECK(comp(3) == doctest::Approx(d2.dsc).epsilon(1e-12));
}

TEST_CASE("identical forecasts") {
    std::mt19937_64 rng(32);
    const Vector x = testutil::normals(rng, 300);
    const Vector y = x + testutil::normals(rng, 300);
    const auto se = ScoringSpec::squared_error();
    for (const TestReport& r : {test_equal_mcb(se, x, x, y), test_equal_dsc(se, x, x, y), test_dm(se, x, x, y)}) {
        CAPTURE(r.name);
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
        CHECK(r.degenerate);
    }
}

TEST_CASE("DM matches an independent computation") {
    std::mt19937_64 rng(33);
    const Eigen::Index T = 700;
    const Vector y = testutil::normals(rng, T);
    const Vector x1 = 0.6 * y + testutil::normals(rng, T, 0.0, 0.8);
    const Vector x2 = 0.5 * y + testutil::normals(rng, T, 0.0, 0.9);
    const auto se = ScoringSpec::squared_error();
    for (double bw : {0.0, 3.0, 12.5}) {
        const TestReport r = test_dm(se, x1, x2, y, {Kernel::QuadraticSpectral, bw});
        const double ref = bw == 0.0 ? naive_dm(se, x1, x2, y, 1e-300) : naive_dm(se, x1, x2, y, bw);
        CHECK(r.statistic == doctest::Approx(ref).epsilon(1e-9));
        CHECK(r.p_value == doctest::Approx(std::erfc(std::abs(ref) / std::numbers::sqrt2)).epsilon(1e-9));
        CHECK(r.method == TestMethod::Gaussian);
    }
}

TEST_CASE("MCB=0 boundary test") {
    std::mt19937_64 rng(34);
    const auto se = ScoringSpec::squared_error();
    const Eigen::Index T = 500;
    const Vector x = testutil::normals(rng, T);
    const Vector y = x + testutil::normals(rng, T);
    TestReport r = test_mcb_zero(se, (x.array() + 0.5).matrix(), y);
    CHECK(r.method == TestMethod::Imhof);
    CHECK(r.p_value < 1e-6);
    CHECK(r.weights.size() == 2);
    r = test_dsc_zero(se, testutil::normals(rng, T), y);
    CHECK(r.p_value > 1e-4);
    r = test_dsc_zero(se, x, y);
    CHECK(r.p_value < 1e-6);

    // size under a calibrated forecast
    int rejections = 0;
    const int reps = 300;
    for (int i = 0; i < reps; ++i) {
        const Vector xi = testutil::normals(rng, T);
        const Vector yi = xi + testutil::normals(rng, T);
        rejections += test_mcb_zero(se, xi, yi).p_value < 0.1;
    }
    CHECK(rejections >= 0.05 * reps);
    CHECK(rejections <= 0.16 * reps);
}

TEST_CASE("check loss boundary tests use the VQR Wald test") {
    std::mt19937_64 rng(35);
    const double alpha = 0.1;
    const Eigen::Index T = 500;
    const double q = -1.2815515655446004;  // standard normal 10% quantile
    int rejections = 0;
    const int reps = 200;
    for (int i = 0; i < reps; ++i) {
        const Vector x = testutil::normals(rng, T);
        const Vector y = (x.array() - q).matrix() + testutil::normals(rng, T);
        const TestReport r = test_mcb_zero(ScoringSpec::check_loss(alpha), x, y);
        REQUIRE(r.method == TestMethod::VQRWald);
        CHECK(r.df == 2.0);
        rejections += r.p_value < 0.1;
    }
    CHECK(rejections >= 0.04 * reps);
    CHECK(rejections <= 0.18 * reps);

    const Vector x = testutil::normals(rng, T);
    const Vector y = (x.array() - q).matrix() + testutil::normals(rng, T);
    CHECK(vqr_test(x, y, alpha, VqrNull::InterceptAndSlope).p_value > 1e-3);
    CHECK(vqr_test(Vector((x.array() + 1.0).matrix()), y, alpha, VqrNull::InterceptAndSlope).p_value < 1e-6);
    CHECK(vqr_test(x, y, alpha, VqrNull::SlopeOnly).p_value < 1e-6);
    CHECK(vqr_test(testutil::normals(rng, T), y, alpha, VqrNull::SlopeOnly).df == 1.0);
}

TEST_CASE("Hall-Sheather bandwidth") {
    // T^(-1/3) z^(2/3) (1.5 phi(0)^2 / 1)^(1/3) at the median
    const double z = 1.959963984540054;
    const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    const double ref = std::pow(1000.0, -1.0 / 3.0) * std::pow(z, 2.0 / 3.0) * std::cbrt(1.5 * phi0 * phi0);
    CHECK(hall_sheather_bandwidth(1000, 0.5) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(hall_sheather_bandwidth(8000, 0.5) == doctest::Approx(ref / 2.0).epsilon(1e-12));
}

TEST_CASE("confidence intervals") {
    std::mt19937_64 rng(36);
    const Eigen::Index T = 400;
    const Vector y = testutil::normals(rng, T);
    const Vector x1 = 0.8 * y + testutil::normals(rng, T, 0.3, 0.6);
    const Vector x2 = 0.4 * y + testutil::normals(rng, T);
    const auto se = ScoringSpec::squared_error();
    const Interval z = component_ci(se, x1, y, Component::DSCdiff, 0.0, x2);
    CHECK(z.lower == z.estimate);
    CHECK(z.upper == z.estimate);
    const Interval a = component_ci(se, x1, y, Component::DSCdiff, 0.8, x2);
    const Interval b = component_ci(se, x1, y, Component::DSCdiff, 0.95, x2);
    CHECK(b.lower < a.lower);
    CHECK(b.upper > a.upper);
    CHECK(a.estimate > 0.0);
    const Interval m = component_ci(se, x2, y, Component::MCB, 0.99);
    CHECK(m.lower >= 0.0);
    CHECK(m.upper >= m.lower);
    CHECK_THROWS_AS(component_ci(se, x1, y, Component::MCBdiff, 0.9), InputError);
    CHECK_THROWS_AS(component_ci(se, x1, y, Component::MCB, 1.0), InputError);
}

TEST_CASE("equal-MCB and equal-DSC report their components") {
    std::mt19937_64 rng(37);
    const Eigen::Index T = 500;
    const Vector y = testutil::normals(rng, T);
    const Vector x1 = 0.9 * y + testutil::normals(rng, T, 0.0, 0.5);
    const Vector x2 = (x1.array() + 1.0).matrix();
    const auto se = ScoringSpec::squared_error();
    const TestReport m = test_equal_mcb(se, x1, x2, y);
    CHECK(m.method == TestMethod::Combined);
    CHECK(m.components.count("p_plus") == 1);
    CHECK(m.p_value < 1e-6);
    // a pure shift leaves discrimination untouched
    const TestReport d = test_equal_dsc(se, x1, x2, y);
    CHECK(d.p_value == 1.0);
}
