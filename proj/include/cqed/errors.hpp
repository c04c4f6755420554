#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// Bad user input (config values, malformed grids, unnormalized distributions).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numeric routine failed to converge or found no solution.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace cqed
