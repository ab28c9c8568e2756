#pragma once

#include <optional>
#include <span>
#include <vector>

namespace satsnet {

/// Error summary of one prediction run. mape is a percentage and is absent
/// when any target is zero.
struct Metrics {
    double sse = 0.0;
    double mse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;
};

Metrics compute_metrics(std::span<const double> targets, std::span<const double> predictions);

/// Elementwise mean and sample SD (n-1 denominator) over restarts.
/// sd is absent for a single restart; mean.mape / sd->mape are present only
/// when every restart defined mape.
struct MetricsAggregate {
    Metrics mean;
    std::optional<Metrics> sd;
};

MetricsAggregate aggregate(const std::vector<Metrics>& per_restart);

struct TTestResult {
    double t_stat = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    bool significant_at_5pct = false;
    bool degenerate = false; // zero variance with unequal means
};

/// Two-sample Student t-test, pooled variance by default (df = na+nb-2),
/// Welch's correction when `welch` is set. Two-sided p-value.
TTestResult t_test(std::span<const double> a, std::span<const double> b, bool welch = false);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
/// absolute accuracy around 1e-12.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| > |t|) for Student's t with df degrees
/// of freedom, computed as I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs); // n-1 denominator

} // namespace satsnet
