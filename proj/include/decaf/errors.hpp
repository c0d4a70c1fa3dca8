#pragma once

#include <stdexcept>
#include <string>

namespace decaf {

/// Invalid configuration or argument values. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Missing, unreadable, or malformed files. The CLI maps this to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite or diverging numbers where finite ones are required.
/// The CLI maps this to exit code 4.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace decaf
