#pragma once

#include <stdexcept>
#include <string>

namespace svyr2 {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad inputs: dimension mismatches, invalid datasets/specs, infeasible
// sampling parameters. CLI maps these (and I/O errors) to exit code 2.
class InvalidArgumentError : public Error {
public:
  using Error::Error;
};

// File and CSV parse problems.
class IoError : public Error {
public:
  using Error::Error;
};

// Fitting failed in a way the caller may want to handle per replicate.
// CLI maps these to exit code 3.
class FitError : public Error {
public:
  using Error::Error;
};

// Design matrix rank-deficient or system condition beyond threshold.
class SingularSystemError : public FitError {
public:
  using FitError::FitError;
};

// Detected complete separation; the MLE is at the boundary.
class SeparationError : public FitError {
public:
  using FitError::FitError;
};

// Response degenerate (all 0 or all 1 for logistic; constant for Gaussian).
class DegenerateResponseError : public FitError {
public:
  using FitError::FitError;
};

// An R^2 statistic was requested from an unconverged fit.
class NotConvergedError : public FitError {
public:
  using FitError::FitError;
};

// Statistic not defined for the fit's family (Nagelkerke for Gaussian).
class FamilyError : public FitError {
public:
  using FitError::FitError;
};

// Heuristic ratio undefined: census R^2 indistinguishable from zero.
class UndefinedRatioError : public FitError {
public:
  using FitError::FitError;
};

}  // namespace svyr2
