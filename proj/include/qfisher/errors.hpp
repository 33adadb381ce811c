#pragma once

#include <stdexcept>
#include <string>

namespace qfisher {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operands have incompatible or invalid shapes.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A structural invariant of a value was violated at construction.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// An argument lies outside the mathematical domain of the operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A dense-matrix operation was requested beyond the configured dimension cap.
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// An iterative scheme exhausted its budget before reaching its tolerance.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string &what, double achieved_residual)
        : Error(what), achieved_residual_(achieved_residual) {}

    double achieved_residual() const noexcept { return achieved_residual_; }

  private:
    double achieved_residual_;
};

} // namespace qfisher
