#pragma once

#include <stdexcept>
#include <string>

namespace verbdist {

// Exit codes used by the command-line tool. Each exception type below maps to
// exactly one of them.
enum class ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kNumericalError = 3,
  kConfigError = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

// Malformed or inconsistent input data: unknown verbs, duplicate records,
// dimension mismatches, unreadable files.
class InputError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInputError; }
};

// Non-finite values during training or evaluation.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override {
    return ExitCode::kNumericalError;
  }
};

// Invalid parameters: alpha outside (0,1), k == 0, fold counts, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kConfigError; }
};

}  // namespace verbdist
