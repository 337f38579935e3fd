#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mmfem {

// Bad arguments to a constructor or builder.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Inconsistent study configuration, or setup-time solves that cannot succeed
// with the given parameters (root brackets, unreadable keys, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Base for failures during a simulation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(std::size_t dof, const std::string& what)
      : NumericalError(what), dof_(dof) {}
  std::size_t dof() const noexcept { return dof_; }

 private:
  std::size_t dof_;
};

class TanglingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateMonitorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mmfem
