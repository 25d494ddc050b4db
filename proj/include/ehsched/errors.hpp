#pragma once

#include <stdexcept>
#include <string>

namespace ehsched {

// Invalid configuration, bad user-supplied parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (e.g. e > B).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller broke a precondition (e.g. transmitting from an empty battery).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A computed quantity violated a proven property (e.g. C1 - C0 < -tol).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ehsched
