#pragma once

#include <stdexcept>
#include <string>

namespace bvtk {

/// Argument outside the mathematical domain of an operation (negative t, a > b, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid tuning parameter (tolerance, budget, preset argument).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive search exceeded its configured node or size budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kernel row fails integrability at grid resolution.
class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// Prefixes an existing error with the file it came from.
  static ParseError in_file(const std::string& path, const ParseError& inner) {
    ParseError e(inner);
    e.message_ = path + ": " + inner.what();
    return e;
  }

  const char* what() const noexcept override {
    return message_.empty() ? std::runtime_error::what() : message_.c_str();
  }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
  std::string message_;
};

}  // namespace bvtk
