#pragma once

#include <stdexcept>
#include <string>

namespace hbndiff {

/// Bad configuration or inputs that fail validation. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Propagation or quadrature produced non-finite or unusable numbers. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Caller broke an API contract (e.g. mismatched grids).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace hbndiff
