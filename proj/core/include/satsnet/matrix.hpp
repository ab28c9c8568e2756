#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace satsnet {

/// Minimal row-major dense matrix; just enough for lag windows and
/// Jacobians without dragging a linear-algebra dependency into the API.
struct RowMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // rows * cols, row-major

    RowMatrix() = default;
    RowMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data.data() + r * cols, cols);
    }
};

} // namespace satsnet
