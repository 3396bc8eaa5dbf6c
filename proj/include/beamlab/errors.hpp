#pragma once

#include <stdexcept>
#include <string>

namespace beamlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// No virtual-array dimension up to the configured cap met the error threshold.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double best_error, int best_dimension)
      : Error(what), best_error_(best_error), best_dimension_(best_dimension) {}

  double best_error() const noexcept { return best_error_; }
  int best_dimension() const noexcept { return best_dimension_; }

 private:
  double best_error_;
  int best_dimension_;
};

/// A covariance matrix stayed ill-conditioned after diagonal loading.
class SingularCovariance : public Error {
 public:
  SingularCovariance(const std::string& what, double condition_number)
      : Error(what), condition_number_(condition_number) {}

  double condition_number() const noexcept { return condition_number_; }

 private:
  double condition_number_;
};

/// Malformed experiment configuration (bad JSON, unknown field, out of range).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace beamlab
