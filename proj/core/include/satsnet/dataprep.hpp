#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "satsnet/matrix.hpp"

namespace satsnet {

/// A univariate series in file order. `transform_log` records whether the
/// stored values are natural logs of the raw data.
struct Series {
    std::string name;
    std::vector<double> values;
    bool transform_log = false;
};

/// Reads one value per row. Accepts an optional single header line and an
/// optional leading timestamp column (two-column files use the second
/// column). Throws DataError naming the offending line on parse failure.
Series load_csv(const std::filesystem::path& path);

/// Returns a copy with values replaced by their natural logs.
/// Throws DataError if any value is <= 0.
Series apply_log(const Series& series);

/// Affine map of the training range [lo, hi] onto [target_lo, target_hi].
/// Values outside [lo, hi] map linearly beyond the target band; nothing is
/// clamped, so invert(apply(v)) == v everywhere.
struct ScaleInfo {
    double lo = 0.0;
    double hi = 1.0;
    double target_lo = 0.1;
    double target_hi = 0.9;

    double apply(double v) const {
        return target_lo + (v - lo) * (target_hi - target_lo) / (hi - lo);
    }
    double invert(double s) const {
        return lo + (s - target_lo) * (hi - lo) / (target_hi - target_lo);
    }
};

/// Fits the scale on training values only. Throws NumericError when the
/// window is constant (hi == lo).
ScaleInfo fit_scale(std::span<const double> train_values, double target_lo = 0.1,
                    double target_hi = 0.9);

/// Lag-embedded supervised patterns: row i of X holds `lags` consecutive
/// values and y[i] the value that follows them.
struct Supervised {
    RowMatrix X;
    std::vector<double> y;

    std::size_t size() const { return y.size(); }
    bool empty() const { return y.empty(); }
};

/// Builds all n - lags patterns of a value sequence. Throws DataError when
/// n <= lags.
Supervised make_lagged(std::span<const double> values, int lags);

struct PrepareConfig {
    int lags = 1;
    int test_len = 12;
    double val_fraction = 0.2;
    bool log_transform = false;
};

/// The series after transform / scale / lag-embed / chronological split,
/// with everything needed to undo the transforms for reporting.
struct PreparedData {
    Supervised train;
    Supervised val;  // empty when val_fraction == 0
    Supervised test; // targets are the final test_len observations
    ScaleInfo scale;
    int lags = 0;
    int test_len = 0;
    bool log_applied = false;
};

/// Chronological split: the last test_len observations are the test
/// targets; of the remaining patterns the final ceil(val_fraction * count)
/// form the validation set. Any log transform happens first; scaling is
/// fitted on the pre-test window only, so no test information leaks into
/// ScaleInfo. Test lag windows may reach back into the pre-test tail
/// (one-step-ahead evaluation with known history).
PreparedData prepare(const Series& series, const PrepareConfig& config);

} // namespace satsnet
