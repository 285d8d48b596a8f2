#pragma once

#include <stdexcept>
#include <string>

namespace ebfission {

/// Invalid prior, likelihood, or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data that does not satisfy an operation's preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown (underflow of every mixture component, non-finite results).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while running an experiment; carries the replicate that failed.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ebfission
