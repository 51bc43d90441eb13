#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fibertrap {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text. Line and column are 1-based.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A well-formed value that violates a model invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string invariant, const std::string& detail)
      : Error("invariant '" + invariant + "' violated: " + detail), invariant_(std::move(invariant)) {}

  [[nodiscard]] const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// Linear solve failed to reach the requested residual, or the grid cannot
/// represent the geometry.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& message, std::vector<double> residual_history = {})
      : Error(message), history_(std::move(residual_history)) {}

  [[nodiscard]] const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Position outside the sampled region of a field.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Trap analysis could not locate or characterise a minimum.
class AnalysisError : public Error {
 public:
  explicit AnalysisError(const std::string& message, std::vector<std::array<double, 3>> trajectory = {})
      : Error(message), trajectory_(std::move(trajectory)) {}

  [[nodiscard]] const std::vector<std::array<double, 3>>& trajectory() const noexcept { return trajectory_; }

 private:
  std::vector<std::array<double, 3>> trajectory_;
};

}  // namespace fibertrap
