#include "satsnet/dataprep.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "satsnet/errors.hpp"

namespace satsnet {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) {
        return false;
    }
    const char* first = t.data();
    const char* last = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cells.push_back(cell);
    }
    return cells;
}

} // namespace

Series load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    Series series;
    series.name = path.stem().string();

    std::string line;
    std::size_t line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const auto cells = split_cells(stripped);
        const std::string& value_cell = cells.size() >= 2 ? cells[1] : cells[0];
        double v = 0.0;
        if (!parse_double(value_cell, v)) {
            // A single non-numeric first line is a header.
            if (first_data_line) {
                first_data_line = false;
                continue;
            }
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": non-numeric value '" + trim(value_cell) + "'");
        }
        if (!std::isfinite(v)) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": non-finite value");
        }
        first_data_line = false;
        series.values.push_back(v);
    }
    if (series.values.size() < 2) {
        throw DataError(path.string() + ": need at least 2 observations, found " +
                        std::to_string(series.values.size()));
    }
    return series;
}

Series apply_log(const Series& series) {
    Series out = series;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (!(out.values[i] > 0.0)) {
            throw DataError("log transform requires positive values; series '" + series.name +
                            "' has " + std::to_string(out.values[i]) + " at index " +
                            std::to_string(i));
        }
        out.values[i] = std::log(out.values[i]);
    }
    out.transform_log = true;
    return out;
}

ScaleInfo fit_scale(std::span<const double> train_values, double target_lo, double target_hi) {
    if (train_values.empty()) {
        throw NumericError("fit_scale: empty training window");
    }
    const auto [lo_it, hi_it] = std::minmax_element(train_values.begin(), train_values.end());
    ScaleInfo scale;
    scale.lo = *lo_it;
    scale.hi = *hi_it;
    scale.target_lo = target_lo;
    scale.target_hi = target_hi;
    if (!(scale.hi > scale.lo)) {
        throw NumericError("fit_scale: degenerate training window (min == max == " +
                           std::to_string(scale.lo) + ")");
    }
    return scale;
}

Supervised make_lagged(std::span<const double> values, int lags) {
    if (lags < 1) {
        throw DataError("make_lagged: lags must be >= 1, got " + std::to_string(lags));
    }
    const std::size_t p = static_cast<std::size_t>(lags);
    if (values.size() <= p) {
        throw DataError("make_lagged: series of length " + std::to_string(values.size()) +
                        " has no patterns for " + std::to_string(lags) + " lags");
    }
    const std::size_t n = values.size() - p;
    Supervised out;
    out.X = RowMatrix(n, p);
    out.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            out.X.at(i, j) = values[i + j];
        }
        out.y[i] = values[i + p];
    }
    return out;
}

PreparedData prepare(const Series& series, const PrepareConfig& config) {
    if (config.lags < 1) {
        throw DataError("prepare: lags must be >= 1");
    }
    if (config.test_len < 0 || config.val_fraction < 0.0 || config.val_fraction >= 1.0) {
        throw DataError("prepare: invalid test_len or val_fraction");
    }
    Series working = series;
    if (config.log_transform && !working.transform_log) {
        working = apply_log(working);
    }
    const std::size_t n = working.values.size();
    const std::size_t p = static_cast<std::size_t>(config.lags);
    const std::size_t test_len = static_cast<std::size_t>(config.test_len);
    if (n < p + test_len + 1) {
        throw DataError("prepare: series '" + series.name + "' has " + std::to_string(n) +
                        " observations; need at least " + std::to_string(p + test_len + 1));
    }

    const std::size_t fit_len = n - test_len; // pre-test window
    std::span<const double> all(working.values);
    const auto fit_window = all.subspan(0, fit_len);

    PreparedData prepared;
    prepared.lags = config.lags;
    prepared.test_len = config.test_len;
    prepared.log_applied = working.transform_log;
    prepared.scale = fit_scale(fit_window);

    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = prepared.scale.apply(working.values[i]);
    }

    // Patterns over the pre-test window, then the chronological tail becomes
    // the validation set.
    const Supervised fit_patterns =
        make_lagged(std::span<const double>(scaled).subspan(0, fit_len), config.lags);
    const std::size_t count = fit_patterns.size();
    const std::size_t val_count =
        static_cast<std::size_t>(std::ceil(config.val_fraction * static_cast<double>(count)));
    if (val_count >= count) {
        throw DataError("prepare: validation fraction leaves no training patterns");
    }
    const std::size_t train_count = count - val_count;

    auto slice = [&](std::size_t begin, std::size_t len) {
        Supervised s;
        s.X = RowMatrix(len, p);
        s.y.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                s.X.at(i, j) = fit_patterns.X.at(begin + i, j);
            }
            s.y[i] = fit_patterns.y[begin + i];
        }
        return s;
    };
    prepared.train = slice(0, train_count);
    prepared.val = slice(train_count, val_count);

    // Test windows draw on true history, including the pre-test tail.
    prepared.test.X = RowMatrix(test_len, p);
    prepared.test.y.resize(test_len);
    for (std::size_t i = 0; i < test_len; ++i) {
        const std::size_t target = fit_len + i;
        for (std::size_t j = 0; j < p; ++j) {
            prepared.test.X.at(i, j) = scaled[target - p + j];
        }
        prepared.test.y[i] = scaled[target];
    }
    return prepared;
}

} // namespace satsnet
