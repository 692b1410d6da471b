#pragma once

#include <stdexcept>
#include <string>

namespace mangrad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad dimensions, invalid parameters).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (non-convergence, invariant drift).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The request is valid but exceeds what the implementation supports.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A direction law cannot produce a valid direction at the given point.
class LawError : public Error {
 public:
  using Error::Error;
};

}  // namespace mangrad
