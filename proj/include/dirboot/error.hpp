#pragma once

#include <stdexcept>
#include <string>

namespace dirboot {

// Bad input: unsupported signature, malformed config, violated precondition.
// The CLI maps this to exit code 2.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that could not produce a result (division by zero in a
// closure recipe, inconsistent loop equations, non-convergence, missing
// moment). The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dirboot
