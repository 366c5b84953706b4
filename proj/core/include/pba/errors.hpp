#pragma once

#include <stdexcept>
#include <string>

namespace pba {

// Base class for all toolkit errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration: invalid hyperparameters, unknown options, missing files
// named in a config.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data: schema violations, label mismatches.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed input stream; carries a line/offset context in the message.
class ParseError : public DataError {
 public:
  using DataError::DataError;
};

// Failure talking to an external service (LLM backend).
class NetworkError : public Error {
 public:
  using Error::Error;
};

}  // namespace pba
