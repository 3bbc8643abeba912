#pragma once

#include <stdexcept>
#include <string>

namespace matukuma {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input that parses but violates a structural requirement (bump clauses,
/// hypothesis gates, grid sizes). `clause()` names what was violated.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string clause, const std::string& what)
      : std::runtime_error(what), clause_(std::move(clause)) {}
  const std::string& clause() const noexcept { return clause_; }

 private:
  std::string clause_;
};

/// Malformed or incomplete configuration.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Base for failures of a numerical method.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericError {
 public:
  QuadratureError(double a, double b, const std::string& what)
      : NumericError(what), a_(a), b_(b) {}
  /// Subinterval on which the error target could not be met.
  double lower() const noexcept { return a_; }
  double upper() const noexcept { return b_; }

 private:
  double a_, b_;
};

class StepSizeCollapse : public NumericError {
 public:
  StepSizeCollapse(double r, const std::string& what) : NumericError(what), r_(r) {}
  double radius() const noexcept { return r_; }

 private:
  double r_;
};

}  // namespace matukuma
