#pragma once

#include <stdexcept>
#include <string>

namespace sgn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Short machine-readable category, used by the CLI error line.
  virtual const char* kind() const noexcept { return "error"; }
};

/// A documented precondition was violated by the caller (dimension mismatch,
/// empty input, out-of-range argument).
class ContractError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contract"; }
};

/// Tuning parameters or experiment files are invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

/// The model could not produce moments at the requested parameter.
class EvaluationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "evaluation"; }
};

/// The de-meaned quasi-Newton design is numerically singular.
class RankDeficientError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "rank_deficient"; }
};

/// Every replication of an experiment failed.
class ExperimentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "experiment"; }
};

}  // namespace sgn
