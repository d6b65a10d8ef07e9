#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gradflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An evaluator could not certify its result to the requested tolerance.
class PrecisionLossError : public Error {
 public:
  using Error::Error;
};

/// Zero search ran past its horizon without seeing a sign change.
class SearchExhaustedError : public Error {
 public:
  SearchExhaustedError(const std::string& what, double horizon)
      : Error(what), horizon_(horizon) {}
  double horizon() const noexcept { return horizon_; }

 private:
  double horizon_;
};

/// Mutable state used out of order (e.g. a memory channel that was never started).
class InconsistentStateError : public Error {
 public:
  using Error::Error;
};

/// Normalized field evaluated at a vanishing gradient with no regularizer.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A bound calculator was missing a constant its formula needs.
class InsufficientConstantsError : public Error {
 public:
  using Error::Error;
};

/// A bound calculator's precondition inequality does not hold.
class ConditionNotMetError : public Error {
 public:
  ConditionNotMetError(const std::string& what, std::string inequality)
      : Error(what), inequality_(std::move(inequality)) {}
  const std::string& inequality() const noexcept { return inequality_; }

 private:
  std::string inequality_;
};

/// The integrated state left the finite region.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gradflow
