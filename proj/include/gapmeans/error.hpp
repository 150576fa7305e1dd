#pragma once

#include <stdexcept>
#include <string>

namespace gapmeans {

// Base of every error thrown by the library. The CLI maps subclasses onto
// exit codes (see ExitCode in tools/).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied parameter (non-positive alpha, unparseable spec, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (too few points, non-increasing radii, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

class MonotonicityError : public InputError {
 public:
  using InputError::InputError;
};

class ConvexityError : public InputError {
 public:
  using InputError::InputError;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// Gap selection could not meet its postconditions. Carries the radius where
// the failure was detected.
class ConstructionError : public Error {
 public:
  ConstructionError(const std::string& what, double radius)
      : Error(what), radius_(radius) {}
  double radius() const { return radius_; }

 private:
  double radius_;
};

// Sampled quadrature cannot resolve the active exponents at the requested
// circle size; callers should switch to bounds mode.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Doubling the sample count changed the result beyond the tolerance.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace gapmeans
