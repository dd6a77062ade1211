#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oocl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input structure: empty file, ragged rows, corrupt descriptor.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A cell that is not a finite number. Row and column are 1-based as
/// printed in the message.
class ParseError : public FormatError {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : FormatError("parse error at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Index or parameter outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Data that admits no regularization path (constant response, no
/// varying column, lambda_max == 0).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A screening rule requested outside the model class it is valid for.
class PolicyError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace oocl
