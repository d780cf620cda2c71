#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bpm {

// Base for every error raised by the toolkit. The CLI maps subclasses onto
// exit codes (ConfigError -> 1, DataError -> 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// A malformed input line. `line` is 1-based.
class ParseError : public DataError {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

// Operation not supported by a model (e.g. score() on a rough-set model).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace bpm
