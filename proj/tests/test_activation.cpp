#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "satsnet/activation.hpp"
#include "satsnet/rng.hpp"
#include "test_support.hpp"

using namespace satsnet;

namespace {

// Direct transcription of the closed form, valid away from the overflow
// range; used as an independent route against the log-space implementation.
double aranda_direct(double lambda, double x) {
    return 1.0 - std::pow(1.0 + lambda * std::exp(x), -1.0 / lambda);
}

double softplus_ref(double u) {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

} // namespace

TEST_SUITE("activation") {

TEST_CASE("frozen values") {
    CHECK(eval(ActivationSpec::aranda_fixed(1.0), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(eval(ActivationSpec::cloglog(), 0.0) ==
          doctest::Approx(0.632120558828557678).epsilon(1e-14));
    // high-precision direct evaluations of the closed form
    CHECK(eval(ActivationSpec::aranda_fixed(1.0), 2.0) ==
          doctest::Approx(0.880797077977882444).epsilon(1e-13));
    CHECK(eval(ActivationSpec::aranda_fixed(2.0), 0.0) ==
          doctest::Approx(0.422649730810374235).epsilon(1e-13));

    CHECK(eval_deriv(ActivationSpec::aranda_fixed(1.0), 0.0) ==
          doctest::Approx(0.25).epsilon(1e-14));
    CHECK(eval_deriv(ActivationSpec::aranda_fixed(2.0), 0.0) ==
          doctest::Approx(0.192450089729875255).epsilon(1e-13));
    CHECK(eval_deriv(ActivationSpec::cloglog(), 0.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("log-space evaluation matches the direct formula where it is stable") {
    for (double lambda : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const auto spec = ActivationSpec::aranda_fixed(lambda);
        for (double x = -20.0; x <= 20.0; x += 0.37) {
            CHECK(eval(spec, x) == doctest::Approx(aranda_direct(lambda, x)).epsilon(1e-11));
        }
    }
}

TEST_CASE("saturation is smooth, never non-finite, and stays in (0,1)") {
    for (double lambda : {1e-3, 0.1, 1.0, 5.0, 10.0}) {
        const auto spec = ActivationSpec::aranda_fixed(lambda);
        for (double x : {-800.0, -100.0, 0.0, 100.0, 800.0, 5000.0}) {
            const double y = eval(spec, x);
            CHECK(std::isfinite(y));
            CHECK(y >= 0.0);
            CHECK(y <= 1.0);
        }
        CHECK(eval(spec, 800.0) > 0.99);
        CHECK(eval(spec, -800.0) < 1e-300);
        CHECK(eval(spec, -300.0) > 0.0); // deeper in the tail it underflows to 0
    }
}

TEST_CASE("bound witnesses") {
    // The x needed for 1 - f < 1e-6 grows with lambda (the tail decays like
    // exp(-x/lambda)); x = 30 covers lambda <= 2, x = 70 covers lambda <= 5.
    for (double lambda : {0.1, 0.5, 1.0, 2.0}) {
        CHECK(eval(ActivationSpec::aranda_fixed(lambda), 30.0) > 1.0 - 1e-6);
    }
    for (double lambda : {3.0, 5.0}) {
        CHECK(eval(ActivationSpec::aranda_fixed(lambda), 70.0) > 1.0 - 1e-6);
    }
    for (double lambda : {0.1, 1.0, 2.0, 5.0}) {
        CHECK(eval(ActivationSpec::aranda_fixed(lambda), -30.0) < 1e-6);
    }
    CHECK(eval(ActivationSpec::cloglog(), 30.0) > 1.0 - 1e-6);
    CHECK(eval(ActivationSpec::cloglog(), -30.0) < 1e-6);
}

// Largest x (capped at 20) where 1 - f is still representable for this
// lambda: beyond softplus(x + ln lambda)/lambda ~ 36 the value rounds to
// exactly 1.0 and strict ordering stops being observable in double.
static double strict_range_hi(double lambda) {
    if (36.0 * lambda > 30.0) {
        return 20.0;
    }
    return std::min(20.0, std::log(std::expm1(36.0 * lambda)) - std::log(lambda) - 0.5);
}

TEST_CASE("monotonicity on random pairs") {
    Rng rng(20240901);
    for (int i = 0; i < 10000; ++i) {
        const double lambda = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
        const double hi = strict_range_hi(lambda);
        double x1 = rng.uniform(-20.0, hi);
        double x2 = rng.uniform(-20.0, hi);
        if (x1 == x2) continue;
        if (x1 > x2) std::swap(x1, x2);
        const auto spec = ActivationSpec::aranda_fixed(lambda);
        CHECK(eval(spec, x2) > eval(spec, x1));
    }
    // inside the saturated band ordering still holds non-strictly
    for (int i = 0; i < 1000; ++i) {
        const double lambda = std::exp(rng.uniform(std::log(1e-3), std::log(10.0)));
        double x1 = rng.uniform(-20.0, 20.0);
        double x2 = rng.uniform(-20.0, 20.0);
        if (x1 > x2) std::swap(x1, x2);
        const auto spec = ActivationSpec::aranda_fixed(lambda);
        CHECK(eval(spec, x2) >= eval(spec, x1));
    }
}

TEST_CASE("special cases: logit and cloglog agree with their family limits") {
    const auto logit = ActivationSpec::logit();
    const auto aranda1 = ActivationSpec::aranda_fixed(1.0);
    const auto cloglog = ActivationSpec::cloglog();
    const auto aranda_tiny = ActivationSpec::aranda_fixed(1e-6);
    for (int i = 0; i <= 1000; ++i) {
        const double x = -6.0 + 12.0 * i / 1000.0;
        CHECK(std::abs(eval(aranda1, x) - eval(logit, x)) < 1e-12);
        CHECK(std::abs(eval(aranda_tiny, x) - eval(cloglog, x)) < 1e-5);
    }
}

TEST_CASE("derivative matches finite differences over the grid") {
    // Two oracles: direct central differences of eval where both tails are
    // representable, and everywhere a central difference of the log-survival
    // s(x) = -ln(1 - f(x)) = softplus(x + ln lambda)/lambda, recombined as
    // f' = s' * exp(-s). The latter stays conditioned in the saturated tail
    // where f rounds to 1 and direct differencing is below double resolution.
    const double h = 1e-5;
    for (double lambda : {0.1, 1.0, 2.0, 5.0}) {
        const auto spec = ActivationSpec::aranda_fixed(lambda);
        for (double x = -6.0; x <= 6.0; x += 0.19) {
            const double analytic = eval_deriv(spec, x);

            const double f = eval(spec, x);
            if (f > 1e-3 && f < 1.0 - 1e-3) {
                const double direct = test_support::central_diff(
                    [&](double t) { return eval(spec, t); }, x, h);
                CHECK(test_support::rel_err(analytic, direct, 1e-12) < 1e-6);
            }

            const auto s = [&](double t) { return softplus_ref(t + std::log(lambda)) / lambda; };
            const double s_prime = test_support::central_diff(s, x, h);
            const double transformed = s_prime * std::exp(-s(x));
            CHECK(test_support::rel_err(analytic, transformed, 1e-300) < 1e-6);
        }
    }
}

TEST_CASE("derivative is positive on the working range") {
    for (double lambda : {0.1, 1.0, 2.0, 5.0}) {
        const auto spec = ActivationSpec::aranda_fixed(lambda);
        for (double x = -20.0; x <= 20.0; x += 0.5) {
            CHECK(eval_deriv(spec, x) > 0.0);
        }
    }
    for (double x = -6.0; x <= 6.0; x += 0.25) {
        CHECK(eval_deriv(ActivationSpec::logit(), x) > 0.0);
        CHECK(eval_deriv(ActivationSpec::cloglog(), x) > 0.0);
    }
}

TEST_CASE("asymmetry witness at lambda = 4") {
    const auto spec = ActivationSpec::aranda_fixed(4.0);
    const double s = eval(spec, 2.0) + eval(spec, -2.0);
    CHECK(std::abs(s - 1.0) > 0.1); // a symmetric sigmoid would give exactly 1
    // the logit really is symmetric
    const auto logit = ActivationSpec::logit();
    CHECK(eval(logit, 2.0) + eval(logit, -2.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(eval(ActivationSpec::logit(), std::nan("")), std::domain_error);
    CHECK_THROWS_AS(eval(ActivationSpec::logit(), INFINITY), std::domain_error);
    CHECK_THROWS_AS(ActivationSpec::aranda_fixed(0.0), std::domain_error);
    CHECK_THROWS_AS(ActivationSpec::aranda_fixed(-2.0), std::domain_error);
    CHECK_THROWS_AS(ActivationSpec::aranda_free(5.0, 1e-3, 2.0), std::domain_error);
    ActivationSpec bad = ActivationSpec::aranda_fixed(1.0);
    bad.lambda = -1.0;
    CHECK_THROWS_AS(eval(bad, 0.0), std::domain_error);
}

} // TEST_SUITE
