#include <cmath>
#include <random>

#include "doctest.h"
#include "scoredec/errors.hpp"
#include "scoredec/recalibration.hpp"
#include "scoredec/scoring.hpp"
#include "test_util.hpp"

using namespace scoredec;

TEST_CASE("score examples") {
    const auto se = ScoringSpec::squared_error();
    const auto ql = ScoringSpec::qlike();
    CHECK(score(se, 2.0, 1.0) == 1.0);
    CHECK(score(ql, 1.0, 1.0) == 0.0);
    // frozen from the Python oracle
    CHECK(score(ql, 2.0, 1.0) == doctest::Approx(0.1931471805599454).epsilon(1e-15));
    CHECK(score(ScoringSpec::check_loss(0.05), -1.0, 0.0) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("derivative examples") {
    const auto se = ScoringSpec::squared_error();
    const auto ql = ScoringSpec::qlike();
    CHECK(score_d1(se, 3.0, 1.0) == 4.0);
    CHECK(score_d1(ql, 1.0, 1.0) == 0.0);
    CHECK(score_d1(ql, 2.0, 1.0) == doctest::Approx(0.25));
    CHECK(score_d2(se, -7.0, 3.0) == 2.0);
    CHECK(score_d2(ql, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(score_d2(ql, 2.0, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(score_d1(ScoringSpec::check_loss(0.1), 0.0, 1.0), UnsupportedOperation);
    CHECK_THROWS_AS(score_d2(ScoringSpec::check_loss(0.1), 0.0, 1.0), UnsupportedOperation);
}

TEST_CASE("identification examples") {
    CHECK(identification(ScoringSpec::squared_error(), 1.0, 1.0) == 0.0);
    CHECK(identification(ScoringSpec::check_loss(0.01), -2.0, -3.0) == doctest::Approx(0.99));
    CHECK(identification(ScoringSpec::check_loss(0.05), -2.0, 0.0) == doctest::Approx(-0.05));
}

TEST_CASE("domain and spec validation") {
    CHECK_THROWS_AS(score(ScoringSpec::qlike(), 0.0, 1.0), InputError);
    CHECK_THROWS_AS(score(ScoringSpec::qlike(), 1.0, -1.0), InputError);
    CHECK_THROWS_AS(ScoringSpec::check_loss(1.0), InputError);
    CHECK_THROWS_AS(ScoringSpec::check_loss(0.0), InputError);
    ScoringSpec bad{Functional::Quantile, LossFamily::SquaredError, 0.5, 1e-12};
    CHECK_THROWS_AS(bad.validate(), InputError);
    ScoringSpec bad2{Functional::Mean, LossFamily::CheckLoss, 0.5, 1e-12};
    CHECK_THROWS_AS(bad2.validate(), InputError);
}

TEST_CASE("derivatives match central finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (const auto& spec : {ScoringSpec::squared_error(), ScoringSpec::qlike()}) {
        for (int i = 0; i < 1000; ++i) {
            const double x = u(rng), y = u(rng);
            const double h = 1e-5 * x;
            const double fd1 = (score(spec, x + h, y) - score(spec, x - h, y)) / (2 * h);
            const double fd2 = (score_d1(spec, x + h, y) - score_d1(spec, x - h, y)) / (2 * h);
            const double d1 = score_d1(spec, x, y);
            const double d2 = score_d2(spec, x, y);
            CHECK(std::abs(fd1 - d1) <= 1e-6 * std::max(1.0, std::abs(d1)));
            CHECK(std::abs(fd2 - d2) <= 1e-6 * std::max(1.0, std::abs(d2)));
        }
    }
}

TEST_CASE("scores are non-negative") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> pos(1e-3, 10.0);
    std::normal_distribution<double> nd(0.0, 3.0);
    std::uniform_real_distribution<double> lv(0.01, 0.99);
    int negatives = 0;
    for (int i = 0; i < 10000; ++i) {
        negatives += score(ScoringSpec::squared_error(), nd(rng), nd(rng)) < 0.0;
        negatives += score(ScoringSpec::qlike(), pos(rng), pos(rng)) < 0.0;
        negatives += score(ScoringSpec::check_loss(lv(rng)), nd(rng), nd(rng)) < 0.0;
    }
    CHECK(negatives == 0);
}

TEST_CASE("sample functional beats perturbed constants") {
    std::mt19937_64 rng(13);
    const Vector y = testutil::uniforms(rng, 57, 0.5, 4.0);
    for (const auto& spec : {ScoringSpec::squared_error(), ScoringSpec::qlike(), ScoringSpec::check_loss(0.3)}) {
        const double r = fit_reference(spec, y);
        const double base = mean_score(spec, Vector::Constant(y.size(), r), y);
        for (int i = 1; i <= 100; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double eps = sgn * 0.004 * i;
                const double s = mean_score(spec, Vector::Constant(y.size(), r + eps), y);
                CHECK(base <= s + 1e-15);
                if (spec.smooth()) CHECK(base < s);
            }
        }
    }
}

TEST_CASE("generic Bregman and GPL forms reproduce the built-ins") {
    auto phi = [](double v) { return v * v; };
    auto dphi = [](double v) { return 2 * v; };
    CHECK(bregman_score(phi, dphi, 2.5, -1.0) == doctest::Approx(score(ScoringSpec::squared_error(), 2.5, -1.0)));
    auto phq = [](double v) { return -std::log(v); };
    auto dphq = [](double v) { return -1.0 / v; };
    CHECK(bregman_score(phq, dphq, 2.0, 1.0) == doctest::Approx(score(ScoringSpec::qlike(), 2.0, 1.0)));
    auto g = [](double v) { return v; };
    CHECK(gpl_score(g, 0.2, 0.3, 1.1) == doctest::Approx(score(ScoringSpec::check_loss(0.2), 0.3, 1.1)));
}
