#pragma once

#include <stdexcept>
#include <string>

namespace qpg {

// Invalid configuration or malformed input files. The CLI maps this (and
// std::invalid_argument) to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside an algorithm (degenerate variance, diverging
// reconstruction, unphysical intermediate). The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpg
