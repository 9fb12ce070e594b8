#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adapca {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates the operation's precondition (range, shape, finiteness).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A divergence was requested against an argument with a zero where mass is required.
class SingularArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed data file. `row()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace detail
}  // namespace adapca
