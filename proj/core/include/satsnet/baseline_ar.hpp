#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace satsnet {

/// AR(p) model with intercept, fitted by conditional least squares.
struct ArModel {
    int order = 0;
    double intercept = 0.0;
    std::vector<double> coefficients; // phi_1 .. phi_p
    double residual_variance = 0.0;   // RSS / n_effective
    std::size_t n_effective = 0;
    double aic = 0.0; // n_eff * ln(RSS/n_eff) + 2*(p+1)
};

struct AicRow {
    int order;
    double aic;
};

/// Fits v_t = c + sum_i phi_i v_{t-i} + e_t over t = p..n-1 via least
/// squares. Throws NumericError on a rank-deficient design (e.g. a
/// constant series) and DataError when the series is too short
/// (needs length > 2*(p+1)).
ArModel fit_ar(std::span<const double> values, int order);

/// AIC-minimizing order over 1..max_order, ties resolved to the smaller
/// order. Callers may override the result (seasonal series sometimes need
/// a manual choice).
int select_lags(std::span<const double> values, int max_order = 12);

/// The per-order AIC table behind select_lags.
std::vector<AicRow> aic_table(std::span<const double> values, int max_order = 12);

/// One-step-ahead predictions for the last `horizon` positions of
/// `history`, always conditioning on true past values.
std::vector<double> forecast_ar(const ArModel& model, std::span<const double> history,
                                int horizon);

} // namespace satsnet
