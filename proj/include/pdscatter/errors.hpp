#pragma once

#include <stdexcept>
#include <string>

namespace pdscatter {

// Base class for every error raised by the library. The exit code is what the
// command line front end returns when the error escapes a subcommand.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept = 0;
  virtual int exit_code() const noexcept = 0;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, long line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  const char* kind() const noexcept override { return "parse"; }
  int exit_code() const noexcept override { return 2; }
  long line() const noexcept { return line_; }

 private:
  long line_;
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
  int exit_code() const noexcept override { return 3; }
};

// Contamination fraction at or beyond 1/2: the contaminated quantile targets
// reach 1 and the root solvers have no solution.
class ContaminationError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "contamination"; }
};

// Input violates an operation precondition (e.g. data not in general position).
class PreconditionError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "precondition"; }
};

class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_weights"; }
  int exit_code() const noexcept override { return 4; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
  int exit_code() const noexcept override { return 5; }
};

}  // namespace pdscatter
