#pragma once

#include <stdexcept>
#include <string>

namespace speclab {

/// Box or matrix larger than the configured site cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Parameters that do not belong to the requested scaling regime.
class RegimeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative method hit its iteration cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration or mismatched shapes.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace speclab
