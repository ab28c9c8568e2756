#include <doctest.h>

#include <cmath>
#include <vector>

#include "satsnet/errors.hpp"
#include "satsnet/metrics.hpp"
#include "satsnet/rng.hpp"
#include "test_support.hpp"

using namespace satsnet;

TEST_SUITE("metrics") {

TEST_CASE("compute_metrics basics") {
    const std::vector<double> t{1.0, 2.0, 3.0};
    const Metrics zero = compute_metrics(t, t);
    CHECK(zero.sse == 0.0);
    CHECK(zero.mse == 0.0);
    CHECK(zero.mae == 0.0);
    CHECK(*zero.mape == 0.0);

    const std::vector<double> t1{100.0};
    const std::vector<double> y1{90.0};
    const Metrics m = compute_metrics(t1, y1);
    CHECK(m.sse == doctest::Approx(100.0));
    CHECK(m.mse == doctest::Approx(100.0));
    CHECK(m.mae == doctest::Approx(10.0));
    CHECK(*m.mape == doctest::Approx(10.0));
}

TEST_CASE("compute_metrics matches an independent recomputation on random data") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = test_support::random_vector(rng, 40, 1.0, 50.0);
        const auto y = test_support::random_vector(rng, 40, 1.0, 50.0);
        const Metrics m = compute_metrics(t, y);

        // spreadsheet-style recomputation, different accumulation order
        double sse = 0.0, mae = 0.0, mape = 0.0;
        for (std::size_t i = t.size(); i-- > 0;) {
            const double e = t[i] - y[i];
            sse += e * e;
            mae += std::abs(e);
            mape += std::abs(e) / std::abs(t[i]);
        }
        CHECK(test_support::rel_err(m.sse, sse, 1e-12) < 1e-10);
        CHECK(test_support::rel_err(m.mae, mae / 40.0, 1e-12) < 1e-10);
        CHECK(test_support::rel_err(*m.mape, 100.0 * mape / 40.0, 1e-12) < 1e-10);
        CHECK(m.mse * 40.0 == doctest::Approx(m.sse).epsilon(1e-12));
        CHECK(m.mae <= std::sqrt(m.mse) + 1e-12); // Cauchy-Schwarz
    }
}

TEST_CASE("mape is absent when a target is zero") {
    const std::vector<double> t{1.0, 0.0};
    const std::vector<double> y{1.0, 1.0};
    CHECK_FALSE(compute_metrics(t, y).mape.has_value());
}

TEST_CASE("compute_metrics errors") {
    const std::vector<double> a{1.0};
    const std::vector<double> empty;
    CHECK_THROWS_AS(compute_metrics(empty, empty), DataError);
    const std::vector<double> b{1.0, 2.0};
    CHECK_THROWS_AS(compute_metrics(a, b), DataError);
}

TEST_CASE("aggregate") {
    Metrics one;
    one.sse = 1.0; one.mse = 1.0; one.mae = 1.0; one.mape = 1.0;
    Metrics two = one;
    two.sse = 2.0; two.mse = 2.0; two.mae = 2.0; two.mape = 2.0;
    Metrics three = one;
    three.sse = 3.0; three.mse = 3.0; three.mae = 3.0; three.mape = 3.0;

    const auto single = aggregate({one});
    CHECK_FALSE(single.sd.has_value());
    CHECK(single.mean.sse == 1.0);

    const auto twins = aggregate({two, two});
    CHECK(twins.sd->sse == 0.0);
    CHECK(twins.mean.mse == 2.0);

    const auto spread = aggregate({one, two, three});
    CHECK(spread.mean.sse == doctest::Approx(2.0));
    CHECK(spread.sd->sse == doctest::Approx(1.0)); // textbook sample SD of {1,2,3}
    CHECK(*spread.mean.mape == doctest::Approx(2.0));

    CHECK_THROWS_AS(aggregate({}), DataError);
}

TEST_CASE("regularized incomplete beta against reference values") {
    // frozen from an independent high-precision evaluation
    CHECK(regularized_incomplete_beta(2, 3, 0.5) == doctest::Approx(0.6875).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(0.5, 0.5, 0.1) ==
          doctest::Approx(0.204832764699133).epsilon(1e-11));
    CHECK(regularized_incomplete_beta(4, 0.5, 8.0 / 9.0) ==
          doctest::Approx(0.346593507087334).epsilon(1e-11));
    CHECK(regularized_incomplete_beta(5, 1, 0.3) == doctest::Approx(0.00243).epsilon(1e-11));
    CHECK(regularized_incomplete_beta(3, 4, 1e-8) ==
          doctest::Approx(1.999999955e-23).epsilon(1e-8));
    CHECK(regularized_incomplete_beta(1, 1, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(1, 1, 1.0) == 1.0);
    CHECK_THROWS(regularized_incomplete_beta(-1, 1, 0.5));
    CHECK_THROWS(regularized_incomplete_beta(1, 1, 2.0));
}

TEST_CASE("student two-sided p against reference values") {
    CHECK(student_t_two_sided_p(1.0, 8) == doctest::Approx(0.346593507087334).epsilon(1e-10));
    CHECK(student_t_two_sided_p(2.5, 30) == doctest::Approx(0.0181156490680667).epsilon(1e-10));
    CHECK(student_t_two_sided_p(0.5, 3) == doctest::Approx(0.651447964848151).epsilon(1e-10));
    CHECK(student_t_two_sided_p(4.0, 5) == doctest::Approx(0.0103234154808315).epsilon(1e-10));
    CHECK(student_t_two_sided_p(0.0, 10) == doctest::Approx(1.0));
}

TEST_CASE("t-test frozen example") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 3, 4, 5, 6};
    const TTestResult r = t_test(a, b);
    CHECK(r.t_stat == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.df == 8.0);
    CHECK(r.p_value == doctest::Approx(0.34659350708733416).epsilon(1e-10));
    CHECK_FALSE(r.significant_at_5pct);

    // antisymmetry under swapping, invariant p
    const TTestResult swapped = t_test(b, a);
    CHECK(swapped.t_stat == doctest::Approx(1.0));
    CHECK(swapped.p_value == doctest::Approx(r.p_value).epsilon(1e-14));

    // equal-variance samples: Welch agrees with pooled here
    const TTestResult welch = t_test(a, b, true);
    CHECK(welch.t_stat == doctest::Approx(-1.0));
    CHECK(welch.p_value == doctest::Approx(r.p_value).epsilon(1e-12));
}

TEST_CASE("t-test degenerate samples") {
    const std::vector<double> a{2, 2, 2};
    const TTestResult same = t_test(a, a);
    CHECK(same.t_stat == 0.0);
    CHECK(same.p_value == 1.0);
    CHECK_FALSE(same.degenerate);

    const std::vector<double> b{3, 3, 3};
    const TTestResult apart = t_test(a, b);
    CHECK(apart.p_value == 0.0);
    CHECK(apart.degenerate);

    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(t_test(one, a), DataError);
}

TEST_CASE("identical samples give p = 1") {
    Rng rng(8);
    const auto xs = test_support::random_vector(rng, 20, -3.0, 3.0);
    const TTestResult r = t_test(xs, xs);
    CHECK(r.t_stat == 0.0);
    CHECK(r.p_value == 1.0);
}

TEST_CASE("monte-carlo calibration: 5% rejection under the null") {
    Rng rng(271828);
    const int reps = 1000;
    int rejections = 0;
    std::vector<double> a(25), b(25);
    for (int rep = 0; rep < reps; ++rep) {
        for (double& x : a) x = rng.gaussian(0.0, 1.0);
        for (double& x : b) x = rng.gaussian(0.0, 1.0);
        if (t_test(a, b).significant_at_5pct) {
            ++rejections;
        }
    }
    const double rate = static_cast<double>(rejections) / reps;
    CHECK(rate > 0.03);
    CHECK(rate < 0.07);
}

} // TEST_SUITE
