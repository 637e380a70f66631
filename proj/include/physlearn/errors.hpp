#pragma once

#include <stdexcept>
#include <string>

namespace physlearn {

// Thrown when an operation's preconditions are violated by its arguments
// (shape mismatch, out-of-range value, malformed file).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a computation produces a non-finite value or otherwise cannot
// continue. The message carries the location (step, round, agent).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace physlearn
