#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flipbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidMove : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A search (critical block, alpha-cyclic block, ...) found nothing.
class NotFound : public Error {
 public:
  using Error::Error;
};

/// An operation's precondition does not hold for the given input.
class Refused : public Error {
 public:
  using Error::Error;
};

/// A property guaranteed by the underlying combinatorial argument failed.
/// Seeing this means either a bug or a counterexample.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace flipbench
