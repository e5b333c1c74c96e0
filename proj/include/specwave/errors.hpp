#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace specwave {

// Invalid configuration or argument values. `path` is the dotted location of the
// offending field when the error originates from a config document ("control.dt"),
// or the bare parameter name for direct API calls ("N").
class ConfigError : public std::invalid_argument {
public:
  ConfigError(std::string path, const std::string& message)
      : std::invalid_argument(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

// Non-finite data encountered where finite values are required. Carries the index
// of the first offending entry.
class NumericalStateError : public std::runtime_error {
public:
  NumericalStateError(std::size_t index, const std::string& message)
      : std::runtime_error(message + " (first offending index " + std::to_string(index) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

// An internal precondition between cooperating components was violated, e.g.
// coefficients handed to an inverse transform are not conjugate-symmetric.
class ContractViolationError : public std::logic_error {
public:
  explicit ContractViolationError(const std::string& message) : std::logic_error(message) {}
};

// Wavenumber outside the band where the linear dispersion relation is real.
// `band_edge` is the |k| limit of the real band when it is expressible.
class EvanescentBandError : public std::domain_error {
public:
  EvanescentBandError(double k, std::optional<double> band_edge, const std::string& message)
      : std::domain_error(message), k_(k), band_edge_(band_edge) {}

  double k() const noexcept { return k_; }
  std::optional<double> band_edge() const noexcept { return band_edge_; }

private:
  double k_;
  std::optional<double> band_edge_;
};

// Argument outside the mathematical domain of an analytic formula (e.g. k = 0
// for a phase velocity).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& message) : std::domain_error(message) {}
};

// A quantity is undefined for the given data, e.g. a growth rate against a
// zero reference field.
class UndefinedReferenceError : public std::runtime_error {
public:
  explicit UndefinedReferenceError(const std::string& message) : std::runtime_error(message) {}
};

// Filesystem-level failure while reading or writing run outputs.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

// A multi-run study could not be completed; the message names the level that failed.
class StudyAbortedError : public std::runtime_error {
public:
  explicit StudyAbortedError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace specwave
