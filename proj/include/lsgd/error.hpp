#pragma once

#include <stdexcept>
#include <string>

namespace lsgd {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent function arguments (dimension mismatch, bad ids).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure while reading images or sequence directories.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Failure while parsing a text or binary file; carries the line when known.
class ParseError : public Error {
 public:
  using Error::Error;
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what) {}
};

/// Violation of a run-level contract (e.g. frames of different sizes).
class RunError : public Error {
 public:
  using Error::Error;
};

/// Metrics that cannot be computed from the given inputs.
class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsgd
