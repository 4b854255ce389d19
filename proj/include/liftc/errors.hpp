#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace liftc {

// Structural precondition violations on models and rule applications.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Linear-mode overflow and other non-finite results.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ToolchainError : public std::runtime_error {
 public:
  ToolchainError(const std::string& msg, std::string diagnostics = {})
      : std::runtime_error(msg), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

// The ground oracle refuses instances above its world-count bound.
class OracleLimitError : public std::runtime_error {
 public:
  OracleLimitError(std::size_t ground_vars, std::size_t bound)
      : std::runtime_error("ground oracle refused: " + std::to_string(ground_vars) +
                           " ground variables exceed the bound of " +
                           std::to_string(bound) + " (use force to override)"),
        ground_vars_(ground_vars) {}
  std::size_t ground_vars() const { return ground_vars_; }

 private:
  std::size_t ground_vars_;
};

}  // namespace liftc
