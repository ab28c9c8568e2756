#include <doctest.h>

#include <cmath>
#include <sstream>

#include "satsnet/errors.hpp"
#include "satsnet/global_opt.hpp"
#include "test_support.hpp"

using namespace satsnet;

namespace {

SaTsConfig desk_config(std::uint64_t seed) {
    SaTsConfig config;
    config.max_iters = 1000;
    config.seed = seed;
    return config;
}

double sphere(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// Two basins with the global minimum on the negative side.
double double_well(double x) {
    return (x * x - 1.0) * (x * x - 1.0) + 0.3 * x;
}

} // namespace

TEST_SUITE("global_opt") {

TEST_CASE("cooling factor frozen values") {
    CHECK(cooling_factor(1, 10) == 1.0); // 1/ln(e) exactly
    CHECK(cooling_factor(5, 10) == 1.0);
    CHECK(cooling_factor(10, 10) == 1.0);
    CHECK(cooling_factor(11, 10) == doctest::Approx(0.393230076693422500).epsilon(1e-12));
    CHECK(cooling_factor(20, 10) == doctest::Approx(0.393230076693422500).epsilon(1e-12));
    CHECK(cooling_factor(21, 10) == doctest::Approx(0.320187505159003213).epsilon(1e-12));
    // reference values quoted to four decimals
    CHECK(cooling_factor(11, 10) == doctest::Approx(0.3932).epsilon(2e-4));
    CHECK(cooling_factor(21, 10) == doctest::Approx(0.3202).epsilon(2e-4));
}

TEST_CASE("temperature trace over 200 iterations") {
    SaTsConfig config = desk_config(3);
    config.max_iters = 200;
    SearchSpace space{3, std::nullopt};
    Solution init{{5.0, 5.0, 5.0}, 0.0};
    const auto result = optimize(sphere, init, config, space);
    REQUIRE(result.history.size() == 200);
    double prev = config.initial_temp;
    for (const auto& point : result.history) {
        CHECK(point.temperature > 0.0);
        CHECK(point.temperature <= prev);
        prev = point.temperature;
    }
    // constant within each block of iters_per_temp iterations
    for (std::size_t block = 0; block < 20; ++block) {
        const double t0 = result.history[block * 10].temperature;
        for (std::size_t i = 1; i < 10; ++i) {
            CHECK(result.history[block * 10 + i].temperature == t0);
        }
    }
    // first block runs at the initial temperature, second is scaled once
    CHECK(result.history[0].temperature == config.initial_temp);
    CHECK(result.history[10].temperature ==
          doctest::Approx(config.initial_temp / std::log(10.0 + std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("propose: zero scales copy the input, clamp holds") {
    SaTsConfig config;
    config.sigma_weights = 0.0;
    config.sigma_lambda = 0.0;
    SearchSpace space{4, LambdaSlot{3, 1e-3, 10.0}};
    Rng rng(1);
    Solution current{{0.5, -0.2, 0.9, 2.0}, 0.0};
    CHECK(propose(current, config, space, rng) == current.vector);

    config.sigma_lambda = 5.0; // violent lambda kicks to exercise the clamp
    for (int i = 0; i < 200; ++i) {
        const auto candidate = propose(current, config, space, rng);
        CHECK(candidate[3] >= 1e-3);
        CHECK(candidate[3] <= 10.0);
    }
    // a lambda already at the boundary stays inside after any kick
    current.vector[3] = 10.0;
    for (int i = 0; i < 50; ++i) {
        CHECK(propose(current, config, space, rng)[3] <= 10.0);
    }
}

TEST_CASE("propose: weight noise is zero-mean") {
    SaTsConfig config;
    config.sigma_weights = 0.1;
    SearchSpace space{2, std::nullopt};
    Rng rng(7);
    Solution current{{1.0, -2.0}, 0.0};
    double sum0 = 0.0, sum1 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto candidate = propose(current, config, space, rng);
        sum0 += candidate[0];
        sum1 += candidate[1];
    }
    // sample mean of n draws has sd sigma/sqrt(n); 3 sigma band
    const double band = 3.0 * config.sigma_weights / 100.0;
    CHECK(std::abs(sum0 / n - 1.0) < band);
    CHECK(std::abs(sum1 / n + 2.0) < band);
}

TEST_CASE("metropolis acceptance") {
    Rng rng(5);
    for (double t : {1e-6, 0.5, 10.0}) {
        CHECK(metropolis_accept(-1.0, t, rng));
        CHECK(metropolis_accept(-1e-12, t, rng));
    }
    // delta = T: empirical rate ~ exp(-1)
    Rng rng2(99);
    int accepted = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        if (metropolis_accept(1.0, 1.0, rng2)) ++accepted;
    }
    const double rate = static_cast<double>(accepted) / n;
    CHECK(std::abs(rate - std::exp(-1.0)) < 0.01);

    // freezing: acceptance of a worse point dies as T -> 0
    Rng rng3(11);
    int frozen = 0;
    for (int i = 0; i < 10000; ++i) {
        if (metropolis_accept(1.0, 1e-4, rng3)) ++frozen;
    }
    CHECK(frozen == 0);
}

TEST_CASE("tabu list: bounded FIFO with radius membership") {
    TabuList tabu(3, 0.5);
    tabu.push({0.0, 0.0});
    CHECK(tabu.contains(std::vector<double>{0.1, 0.1}));
    CHECK_FALSE(tabu.contains(std::vector<double>{1.0, 0.0}));
    tabu.push({1.0, 0.0});
    tabu.push({2.0, 0.0});
    tabu.push({3.0, 0.0});
    CHECK(tabu.size() == 3);
    CHECK_FALSE(tabu.contains(std::vector<double>{0.0, 0.0})); // evicted
    CHECK(tabu.contains(std::vector<double>{3.0, 0.1}));
}

TEST_CASE("optimize: constant cost keeps the initial value") {
    SaTsConfig config = desk_config(17);
    config.max_iters = 100;
    SearchSpace space{2, std::nullopt};
    Solution init{{1.0, 2.0}, 0.0};
    const auto result = optimize([](std::span<const double>) { return 7.5; }, init, config, space);
    CHECK(result.best.cost == 7.5);
}

TEST_CASE("optimize: sphere reaches the minimum across seeds") {
    SearchSpace space{3, std::nullopt};
    Solution init{{5.0, 5.0, 5.0}, 0.0};
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto result = optimize(sphere, init, desk_config(seed), space);
        if (result.best.cost < 1e-2) ++good;
        // best-cost trace is non-increasing in every run
        double prev = result.history.front().best_cost;
        for (const auto& point : result.history) {
            CHECK(point.best_cost <= prev);
            prev = point.best_cost;
        }
    }
    CHECK(good >= 9);
}

TEST_CASE("optimize: two-basin cost against a dense grid scan") {
    // grid oracle for the global minimum
    double grid_best_x = -3.0;
    double grid_best = double_well(-3.0);
    for (double x = -3.0; x <= 3.0; x += 1e-4) {
        const double c = double_well(x);
        if (c < grid_best) {
            grid_best = c;
            grid_best_x = x;
        }
    }
    CHECK(grid_best_x < 0.0); // sanity: the 0.3x tilt favours the left basin

    SearchSpace space{1, std::nullopt};
    Solution init{{2.0}, 0.0}; // start in the wrong basin
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SaTsConfig config = desk_config(seed);
        config.sigma_weights = 0.5; // step scale on par with the basin spacing
        const auto result = optimize(
            [](std::span<const double> v) { return double_well(v[0]); }, init, config, space);
        if (std::abs(result.best.vector[0] - grid_best_x) < 0.05) ++good;
    }
    CHECK(good >= 9);
}

TEST_CASE("optimize: determinism and non-finite handling") {
    SearchSpace space{2, std::nullopt};
    Solution init{{3.0, -1.0}, 0.0};
    const auto a = optimize(sphere, init, desk_config(123), space);
    const auto b = optimize(sphere, init, desk_config(123), space);
    CHECK(a.best.vector == b.best.vector);
    CHECK(a.best.cost == b.best.cost);
    REQUIRE(a.history.size() == b.history.size());
    CHECK(a.history.back().best_cost == b.history.back().best_cost);

    // candidates falling into a NaN pocket are treated as infinitely bad
    const auto nan_pocket = [](std::span<const double> v) {
        if (v[0] > 0.0 && v[0] < 0.5) return std::nan("");
        return sphere(v);
    };
    const auto c = optimize(nan_pocket, init, desk_config(5), space);
    CHECK(std::isfinite(c.best.cost));

    // a non-finite initial cost is an error
    CHECK_THROWS_AS(optimize([](std::span<const double>) { return std::nan(""); }, init,
                             desk_config(5), space),
                    NumericError);
}

TEST_CASE("optimize: early-stop callback fires at temperature updates") {
    SaTsConfig config = desk_config(2);
    config.max_iters = 500;
    SearchSpace space{1, std::nullopt};
    Solution init{{4.0}, 0.0};
    int calls = 0;
    const auto result = optimize([](std::span<const double> v) { return v[0] * v[0]; }, init,
                                 config, space, [&](const Solution&) { return ++calls >= 3; });
    CHECK(result.stopped_early);
    CHECK(calls == 3);
    // stopped at the third temperature boundary: 21..30 iterations run
    CHECK(result.iterations_run >= 21);
    CHECK(result.iterations_run <= 30);
}

TEST_CASE("history csv export") {
    SaTsConfig config = desk_config(1);
    config.max_iters = 12;
    SearchSpace space{1, std::nullopt};
    Solution init{{1.0}, 0.0};
    const auto result = optimize(sphere, init, config, space);
    std::ostringstream out;
    write_history_csv(result.history, out);
    const std::string text = out.str();
    CHECK(text.rfind("iteration,temperature,current_cost,best_cost\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 13); // header + 12 rows
}

TEST_CASE("config validation") {
    SaTsConfig config;
    config.initial_temp = 0.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = SaTsConfig{};
    config.pool_size = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

} // TEST_SUITE
