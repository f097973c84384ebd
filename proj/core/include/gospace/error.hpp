#pragma once

#include <stdexcept>
#include <string>

namespace gospace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-facing input (out-of-range parameters, malformed ids, bad metric data).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A matrix family is not closed under the commutator.
class ClosureError : public Error {
 public:
  ClosureError(std::size_t i, std::size_t j, double residual)
      : Error("bracket [e_" + std::to_string(i) + ", e_" + std::to_string(j) +
              "] leaves the span (residual " + std::to_string(residual) + ")"),
        first(i),
        second(j) {}

  std::size_t first;
  std::size_t second;
};

/// An internal consistency check failed; indicates a bug in a constructor.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not reach a certified answer.
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gospace
