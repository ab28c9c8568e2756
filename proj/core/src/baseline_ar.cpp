#include "satsnet/baseline_ar.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

#include "satsnet/errors.hpp"

namespace satsnet {

ArModel fit_ar(std::span<const double> values, int order) {
    if (order < 1) {
        throw DataError("fit_ar: order must be >= 1, got " + std::to_string(order));
    }
    const std::size_t p = static_cast<std::size_t>(order);
    const std::size_t n = values.size();
    if (n <= 2 * (p + 1)) {
        throw DataError("fit_ar: series of length " + std::to_string(n) +
                        " is too short for order " + std::to_string(order));
    }
    const std::size_t rows = n - p;
    const std::size_t cols = p + 1; // intercept + p lags

    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd target(rows);
    for (std::size_t t = p; t < n; ++t) {
        const std::size_t r = t - p;
        design(r, 0) = 1.0;
        for (std::size_t i = 1; i <= p; ++i) {
            design(r, i) = values[t - i];
        }
        target(r) = values[t];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(cols)) {
        throw NumericError("fit_ar: rank-deficient design (constant or collinear series)");
    }
    const Eigen::VectorXd beta = qr.solve(target);
    const double rss = (target - design * beta).squaredNorm();

    ArModel model;
    model.order = order;
    model.intercept = beta(0);
    model.coefficients.assign(beta.data() + 1, beta.data() + cols);
    model.n_effective = rows;
    model.residual_variance = rss / static_cast<double>(rows);
    // ln(0) = -inf is fine for comparison on noiseless data.
    model.aic = static_cast<double>(rows) * std::log(model.residual_variance) +
                2.0 * static_cast<double>(cols);
    return model;
}

std::vector<AicRow> aic_table(std::span<const double> values, int max_order) {
    if (max_order < 1) {
        throw DataError("aic_table: max_order must be >= 1");
    }
    std::vector<AicRow> rows;
    rows.reserve(static_cast<std::size_t>(max_order));
    for (int p = 1; p <= max_order; ++p) {
        rows.push_back({p, fit_ar(values, p).aic});
    }
    return rows;
}

int select_lags(std::span<const double> values, int max_order) {
    const auto rows = aic_table(values, max_order);
    int best_order = rows.front().order;
    double best_aic = rows.front().aic;
    for (const AicRow& row : rows) {
        if (row.aic < best_aic) { // strict: ties keep the smaller order
            best_aic = row.aic;
            best_order = row.order;
        }
    }
    return best_order;
}

std::vector<double> forecast_ar(const ArModel& model, std::span<const double> history,
                                int horizon) {
    if (horizon < 0) {
        throw DataError("forecast_ar: horizon must be >= 0");
    }
    const std::size_t h = static_cast<std::size_t>(horizon);
    const std::size_t p = static_cast<std::size_t>(model.order);
    if (history.size() < h || history.size() - h < p) {
        throw DataError("forecast_ar: history of length " + std::to_string(history.size()) +
                        " cannot supply " + std::to_string(p) + " lags for " +
                        std::to_string(horizon) + " one-step forecasts");
    }
    std::vector<double> predictions(h);
    const std::size_t first_target = history.size() - h;
    for (std::size_t j = 0; j < h; ++j) {
        const std::size_t t = first_target + j;
        double v = model.intercept;
        for (std::size_t i = 1; i <= p; ++i) {
            v += model.coefficients[i - 1] * history[t - i];
        }
        predictions[j] = v;
    }
    return predictions;
}

} // namespace satsnet
