#pragma once

#include <stdexcept>
#include <string>

namespace satsnet {

/// Problem with input data: unreadable files, malformed CSV cells,
/// series too short, schema mismatches between model and data.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: degenerate fits, non-finite initial costs,
/// stalled solvers.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace satsnet
