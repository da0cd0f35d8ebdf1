#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace partrans {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input; line is 1-based, 0 when not applicable.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Non-finite values produced during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace partrans
