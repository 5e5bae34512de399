#pragma once

#include <stdexcept>
#include <string>

namespace sinlab {

/// Dimension disagreement between operands, or between params and cached data.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid argument value: counts, rates, tolerances, indices.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: divergence, non-convergence, degenerate statistics.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input data: CSV parse failures, out-of-range labels.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sinlab
