#pragma once
#include <stdexcept>
#include <string>

namespace hexact {

// Bad caller input (domain violations, malformed parameters).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// An iterative series or root search ran out of budget.  The partial value
// (or achieved bound) is kept so callers can decide whether it is usable.
class ConvergenceFailure : public std::runtime_error {
public:
  ConvergenceFailure(const std::string& what, double partial)
      : std::runtime_error(what), partial_(partial) {}
  [[nodiscard]] double partial() const noexcept { return partial_; }

private:
  double partial_;
};

// Table file could not be parsed, or failed a structural/numeric audit.
class TableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Missing tables, inconsistent configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate or a violated internal identity.
class NumericFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Acceptance-rejection exceeded its proposal cap.
class RunawayRejection : public std::runtime_error {
public:
  RunawayRejection(const std::string& what, double L)
      : std::runtime_error(what), L_(L) {}
  [[nodiscard]] double acceptance_factor() const noexcept { return L_; }

private:
  double L_;
};

}  // namespace hexact
