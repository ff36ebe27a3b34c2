// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// Exception types thrown by the medsel library. Every error derives from
// medsel::Error so callers can catch the whole family at once.
#ifndef MEDSEL_ERRORS_H_
#define MEDSEL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace medsel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value does not fit the fixed-point codec, or a numeric argument is
// outside its allowed interval.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A word has bits set above the bit-plane width, or a matrix shape is empty.
class WidthError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  using Error::Error;
};

class MaskError : public Error {
 public:
  using Error::Error;
};

// Invalid cluster count.
class KError : public Error {
 public:
  using Error::Error;
};

// Ragged rows in delimited input.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Missing (NA) cells where a complete matrix is required.
class MissingError : public Error {
 public:
  using Error::Error;
};

// Malformed delimited input. line/column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace medsel

#endif  // MEDSEL_ERRORS_H_
