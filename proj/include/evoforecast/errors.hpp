#pragma once

#include <stdexcept>
#include <string>

namespace evoforecast {

// Caller passed arguments that violate an operation's preconditions.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input data is malformed or unusable (bad CSV, all-missing column, ...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A vector or matrix has the wrong size for the requested operation.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation produced a non-finite value.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace evoforecast
