#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdchk {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text: expressions, configs, flags. Maps to CLI exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t position, std::string expected)
      : InputError("parse error at offset " + std::to_string(position) + ": expected " + expected),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// Violated precondition on an argument (steps = 0, t <= 0, ...).
class PreconditionError : public InputError {
 public:
  using InputError::InputError;
};

/// Failure of a numerical procedure. Maps to CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class EvalError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnboundVariable : public EvalError {
 public:
  explicit UnboundVariable(const std::string& name) : EvalError("unbound variable '" + name + "'") {}
};

class QuadratureFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverDivergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fdchk
