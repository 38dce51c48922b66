#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linkassess {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (edge lists, manifests, configs, exported tables).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A precondition on arguments was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace linkassess
