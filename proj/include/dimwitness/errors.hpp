#pragma once

#include <stdexcept>
#include <string>

namespace dimwitness {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Rejected input: dimension mismatch, violated matrix/vector invariant,
// malformed file. Maps to CLI exit code 2.
class InvalidInputError : public Error {
  public:
    using Error::Error;
};

// Numerical breakdown: eigensolver non-convergence, a sampled branch whose
// probability mass is below the noise floor. Carries the offending residual
// when one is available. Maps to CLI exit code 3.
class NumericFailureError : public Error {
  public:
    explicit NumericFailureError(const std::string& what, double residual = 0.0)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

} // namespace dimwitness
