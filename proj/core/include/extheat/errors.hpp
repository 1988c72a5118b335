#pragma once

#include <stdexcept>
#include <string>

namespace extheat {

// Invalid configuration: bad DomainSpec, SolverParams, CLI values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (p < 1, t <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Linear-solve breakdown, failed searches and similar numerical failures.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace extheat
