#pragma once

#include <stdexcept>
#include <string>

namespace cfmimo {

/// Base class for simulator failures.
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration (CLI exit code 2).
class ConfigError : public SimError {
 public:
  explicit ConfigError(const std::string& msg) : SimError(msg) {}
};

/// Numerical failure budget exceeded during a sweep (CLI exit code 3).
class FailureBudgetError : public SimError {
 public:
  explicit FailureBudgetError(const std::string& msg) : SimError(msg) {}
};

/// Filesystem problem (CLI exit code 4).
class IoError : public SimError {
 public:
  explicit IoError(const std::string& msg) : SimError(msg) {}
};

}  // namespace cfmimo
