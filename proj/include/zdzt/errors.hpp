#pragma once

#include <stdexcept>
#include <string>

namespace zdzt {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: non-square data, asymmetry beyond tolerance, non-finite
// entries, dimension mismatches, out-of-range arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Thrown when an operation requires lambda_min > pd_tol and the input fails.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

// The integer grid (2m+1)^d would exceed the enumeration cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Cone membership could not be certified at the requested tolerance. This is
// a legitimate outcome when m is below the membership threshold of A.
class Infeasible : public Error {
 public:
  Infeasible(const std::string& msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// Rejection sampling gave up; retry with a different seed.
class SamplingError : public Error {
 public:
  using Error::Error;
};

// Iterative solver failed to converge (pathological input).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace zdzt
