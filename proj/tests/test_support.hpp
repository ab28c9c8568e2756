#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "satsnet/rng.hpp"

namespace test_support {

/// Central difference derivative of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Relative discrepancy with a floored denominator so noise-level values
/// do not blow the ratio up.
inline double rel_err(double a, double b, double floor_at) {
    const double denom = std::max({std::abs(a), std::abs(b), floor_at});
    return std::abs(a - b) / denom;
}

inline std::vector<double> random_vector(satsnet::Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform(lo, hi);
    }
    return v;
}

} // namespace test_support
