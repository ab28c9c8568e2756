#include "satsnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "satsnet/errors.hpp"

namespace satsnet {

Metrics compute_metrics(std::span<const double> targets, std::span<const double> predictions) {
    if (targets.empty()) {
        throw DataError("compute_metrics: empty input");
    }
    if (targets.size() != predictions.size()) {
        throw DataError("compute_metrics: length mismatch (" + std::to_string(targets.size()) +
                        " targets vs " + std::to_string(predictions.size()) + " predictions)");
    }
    const double n = static_cast<double>(targets.size());
    Metrics m;
    double abs_pct = 0.0;
    bool mape_defined = true;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double e = targets[i] - predictions[i];
        m.sse += e * e;
        m.mae += std::abs(e);
        if (targets[i] == 0.0) {
            mape_defined = false;
        } else {
            abs_pct += std::abs(e / targets[i]);
        }
    }
    m.mse = m.sse / n;
    m.mae /= n;
    if (mape_defined) {
        m.mape = 100.0 * abs_pct / n;
    }
    return m;
}

MetricsAggregate aggregate(const std::vector<Metrics>& per_restart) {
    if (per_restart.empty()) {
        throw DataError("aggregate: no restarts");
    }
    const double n = static_cast<double>(per_restart.size());
    const bool mape_everywhere =
        std::all_of(per_restart.begin(), per_restart.end(),
                    [](const Metrics& m) { return m.mape.has_value(); });

    MetricsAggregate agg;
    for (const Metrics& m : per_restart) {
        agg.mean.sse += m.sse;
        agg.mean.mse += m.mse;
        agg.mean.mae += m.mae;
    }
    agg.mean.sse /= n;
    agg.mean.mse /= n;
    agg.mean.mae /= n;
    if (mape_everywhere) {
        double s = 0.0;
        for (const Metrics& m : per_restart) s += *m.mape;
        agg.mean.mape = s / n;
    }

    if (per_restart.size() < 2) {
        return agg; // SD undefined for a single restart
    }
    Metrics sd;
    for (const Metrics& m : per_restart) {
        sd.sse += (m.sse - agg.mean.sse) * (m.sse - agg.mean.sse);
        sd.mse += (m.mse - agg.mean.mse) * (m.mse - agg.mean.mse);
        sd.mae += (m.mae - agg.mean.mae) * (m.mae - agg.mean.mae);
    }
    sd.sse = std::sqrt(sd.sse / (n - 1.0));
    sd.mse = std::sqrt(sd.mse / (n - 1.0));
    sd.mae = std::sqrt(sd.mae / (n - 1.0));
    if (mape_everywhere) {
        double s = 0.0;
        for (const Metrics& m : per_restart) s += (*m.mape - *agg.mean.mape) * (*m.mape - *agg.mean.mape);
        sd.mape = std::sqrt(s / (n - 1.0));
    }
    agg.sd = sd;
    return agg;
}

double sample_mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    const double mean = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return s / static_cast<double>(xs.size() - 1);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's algorithm).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return h;
        }
    }
    throw NumericError("incomplete beta continued fraction failed to converge");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("regularized_incomplete_beta: a and b must be positive");
    }
    if (x < 0.0 || x > 1.0) {
        throw std::domain_error("regularized_incomplete_beta: x must lie in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other side.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw std::domain_error("student_t_two_sided_p: df must be positive");
    }
    if (!std::isfinite(t)) {
        return 0.0;
    }
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult t_test(std::span<const double> a, std::span<const double> b, bool welch) {
    if (a.size() < 2 || b.size() < 2) {
        throw DataError("t_test: each sample needs at least 2 observations");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    const double va = sample_variance(a);
    const double vb = sample_variance(b);

    TTestResult result;
    double se = 0.0;
    if (welch) {
        se = std::sqrt(va / na + vb / nb);
        const double num = (va / na + vb / nb) * (va / na + vb / nb);
        const double den = (va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0);
        result.df = den > 0.0 ? num / den : na + nb - 2.0;
    } else {
        const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
        result.df = na + nb - 2.0;
    }

    if (se == 0.0) {
        if (ma == mb) {
            result.t_stat = 0.0;
            result.p_value = 1.0;
        } else {
            result.t_stat = ma > mb ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity();
            result.p_value = 0.0;
            result.degenerate = true;
        }
    } else {
        result.t_stat = (ma - mb) / se;
        result.p_value = student_t_two_sided_p(result.t_stat, result.df);
    }
    result.significant_at_5pct = result.p_value < 0.05;
    return result;
}

} // namespace satsnet
