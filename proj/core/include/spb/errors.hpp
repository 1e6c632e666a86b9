#pragma once

#include <stdexcept>
#include <string>

namespace spb {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// lambda_r - lambda_{r+1} at or below the split tolerance.
class DegenerateSplitError : public Error {
 public:
  using Error::Error;
};

class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

class IterationError : public Error {
 public:
  IterationError(const std::string& what, double last_residual, int iters)
      : Error(what), last_residual_(last_residual), iters_(iters) {}
  double last_residual() const { return last_residual_; }
  int iters() const { return iters_; }

 private:
  double last_residual_;
  int iters_;
};

class CertificateError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A NewtonResult paired with inputs other than the ones it was computed from.
class StaleResultError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace spb
