#pragma once

#include <stdexcept>
#include <string>

namespace dirac_tunnel {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Momentum or energy outside the zone an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Barrier heights V0 < m are not covered by the model.
class UnsupportedRegimeError : public Error {
 public:
  using Error::Error;
};

/// A linear system or normalisation integral degenerated.
class NumericalDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach the requested tolerance. Carries the last
/// estimate so callers can still report it.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double estimate, double error_estimate)
      : Error(what), estimate_(estimate), error_estimate_(error_estimate) {}

  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

/// A scan produced no extremum to report.
class EmptyResultError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario configuration. Line and column are 1-based; zero means
/// the error is not tied to a source position (e.g. a bound violation
/// coming from a command-line override).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0, int column = 0)
      : Error(what), field_(std::move(field)), line_(line), column_(column) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

}  // namespace dirac_tunnel
