#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based and counts the header line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A requested quantity is not identified by the schedule.
class EstimabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace hfa
