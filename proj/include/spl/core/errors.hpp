#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace spl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A model or solver parameter violates its precondition.
class InvalidParameter : public Error {
public:
  using Error::Error;
};

/// Input data (initial fields, CSV samples) outside the admissible range.
class InvalidData : public Error {
public:
  using Error::Error;
};

/// Argument outside the range of an inverse transform.
class RangeError : public Error {
public:
  using Error::Error;
};

/// An implicit step or inner solve did not converge.
class StepFailure : public Error {
public:
  StepFailure(const std::string& what, double residual)
      : Error(what + " (residual " + format(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  double residual_;
};

/// NaN/Inf detected, or a state invariant was lost during time stepping.
class NumericalBlowup : public Error {
public:
  using Error::Error;
};

/// Newton failed on the initial elliptic projection.
class ProjectionFailure : public StepFailure {
public:
  using StepFailure::StepFailure;
};

/// A barrier profile could not be constructed.
class ConstructionFailure : public Error {
public:
  using Error::Error;
};

}  // namespace spl
