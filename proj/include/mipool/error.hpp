#pragma once

#include <stdexcept>
#include <string>

namespace mipool {

// Raised for contract violations (bad dimensions, out-of-domain arguments).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a decomposition or regression cannot proceed numerically.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mipool
