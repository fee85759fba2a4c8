#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppmaudit {

// Base of every error the library raises. The CLI maps the concrete type
// to an exit code, so new failure modes should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input data (XML syntax, bad JSON lines in a manifest, ...).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  explicit ParseError(const std::string& message) : ParseError(message, 0) {}

  // 1-based; 0 when the location is unknown.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A CsvMapping (or similar user configuration) does not fit the input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two artifacts disagree, e.g. a manifest names a case the log lacks.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// An external predictor produced output that violates the file protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// An external predictor failed to run: nonzero exit, signal, or timeout.
class ExecutionError : public Error {
 public:
  ExecutionError(const std::string& message, std::string diagnostics)
      : Error(message), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace ppmaudit
