#pragma once

#include <stdexcept>
#include <string>

namespace ffdg {

// Bad input data or violated preconditions. The CLI maps this to exit code 3.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure (non-finite values, diverging optimization). Exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ffdg
