#pragma once

#include <stdexcept>
#include <string>

namespace ravflow {

/// Bad or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Divergence, positivity failure, or other numerical breakdown. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure. Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or fields living on different grids.
class InvalidFieldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not defined for the given model (e.g. vesicle volume on CH).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A multistep scheme was called without enough back values.
class StartupError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ravflow
