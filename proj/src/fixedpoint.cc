// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "medsel/fixedpoint.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "medsel/errors.h"

namespace medsel {

namespace {

// Round half to even, independent of the floating-point environment.
double RoundHalfEven(double x) {
  const double fl = std::floor(x);
  const double frac = x - fl;
  if (frac > 0.5) return fl + 1.0;
  if (frac < 0.5) return fl;
  return std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1.0;
}

// Scaled, rounded and biased value, or false if it cannot be a word.
bool ToWord(double value, int frac_bits, Word bias, Word max_word, Word* out) {
  if (std::isnan(value)) return false;
  const double scaled = std::ldexp(value, frac_bits);
  if (!std::isfinite(scaled)) return false;
  const double rounded = RoundHalfEven(scaled);
  if (std::fabs(rounded) >= 0x1p65) return false;
  const __int128 biased =
      static_cast<__int128>(rounded) + static_cast<__int128>(bias);
  if (biased < 0 || biased > static_cast<__int128>(max_word)) return false;
  *out = static_cast<Word>(biased);
  return true;
}

}  // namespace

FixedPointCodec::FixedPointCodec(int width, int frac_bits, Word bias)
    : width_(width), frac_bits_(frac_bits), bias_(bias) {
  if (width < 1 || width > 64) {
    throw RangeError("codec width must be in [1, 64], got " +
                     std::to_string(width));
  }
  if (frac_bits < 0 || frac_bits >= width) {
    throw RangeError("codec frac_bits must be in [0, width), got " +
                     std::to_string(frac_bits));
  }
  if (bias > max_word()) {
    throw RangeError("codec bias does not fit in " + std::to_string(width) +
                     " bits");
  }
}

FixedPointCodec FixedPointCodec::Unsigned(int width, int frac_bits) {
  return FixedPointCodec(width, frac_bits, 0);
}

FixedPointCodec FixedPointCodec::Signed(int width, int frac_bits) {
  if (width < 1 || width > 64) {
    throw RangeError("codec width must be in [1, 64], got " +
                     std::to_string(width));
  }
  return FixedPointCodec(width, frac_bits, Word{1} << (width - 1));
}

Word FixedPointCodec::max_word() const {
  return width_ == 64 ? ~Word{0} : (Word{1} << width_) - 1;
}

double FixedPointCodec::ulp() const { return std::ldexp(1.0, -frac_bits_); }

bool FixedPointCodec::CanEncode(double value) const {
  Word unused;
  return ToWord(value, frac_bits_, bias_, max_word(), &unused);
}

Word FixedPointCodec::Encode(double value) const {
  Word word;
  if (!ToWord(value, frac_bits_, bias_, max_word(), &word)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "value " << value << " is not representable with width=" << width_
        << " frac_bits=" << frac_bits_ << " bias=" << bias_;
    throw RangeError(msg.str());
  }
  return word;
}

double FixedPointCodec::Decode(Word word) const {
  const __int128 diff =
      static_cast<__int128>(word) - static_cast<__int128>(bias_);
  return std::ldexp(static_cast<double>(diff), -frac_bits_);
}

FixedPointCodec FitCodec(std::span<const double> values, int width) {
  if (values.empty()) throw RangeError("cannot fit a codec to no values");
  if (std::any_of(values.begin(), values.end(),
                  [](double v) { return std::isnan(v); })) {
    throw RangeError("cannot fit a codec to NaN values");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const bool is_signed = *lo < 0.0;
  for (int f = width - 1; f >= 0; --f) {
    const FixedPointCodec codec = is_signed
                                      ? FixedPointCodec::Signed(width, f)
                                      : FixedPointCodec::Unsigned(width, f);
    if (codec.CanEncode(*lo) && codec.CanEncode(*hi)) return codec;
  }
  std::ostringstream msg;
  msg << "values in [" << *lo << ", " << *hi << "] do not fit " << width
      << "-bit words";
  throw RangeError(msg.str());
}

EncodedMatrix::EncodedMatrix(FixedPointCodec codec, std::size_t rows,
                             std::size_t cols, std::vector<Word> words)
    : codec_(codec), rows_(rows), cols_(cols), words_(std::move(words)) {
  if (words_.size() != rows_ * cols_) {
    throw ShapeError("encoded matrix holds " + std::to_string(words_.size()) +
                     " words, expected " + std::to_string(rows_ * cols_));
  }
}

std::vector<Word> EncodedMatrix::column(std::size_t j) const {
  std::vector<Word> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = at(i, j);
  return out;
}

EncodedMatrix EncodedMatrix::SelectRows(
    std::span<const std::size_t> indices) const {
  std::vector<Word> out;
  out.reserve(indices.size() * cols_);
  for (std::size_t i : indices) {
    if (i >= rows_) throw RangeError("row index out of range");
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return EncodedMatrix(codec_, indices.size(), cols_, std::move(out));
}

EncodedMatrix EncodeMatrix(std::span<const double> values, std::size_t rows,
                           std::size_t cols, const FixedPointCodec& codec) {
  if (values.size() != rows * cols) {
    throw ShapeError("matrix has " + std::to_string(values.size()) +
                     " cells, expected " + std::to_string(rows * cols));
  }
  std::vector<Word> words(values.size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = values[i * cols + j];
      if (std::isnan(v)) {
        throw MissingError("missing value at row " + std::to_string(i) +
                           ", column " + std::to_string(j));
      }
      if (!codec.CanEncode(v)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "value " << v << " at row " << i << ", column " << j
            << " is out of codec range";
        throw RangeError(msg.str());
      }
      words[i * cols + j] = codec.Encode(v);
    }
  }
  return EncodedMatrix(codec, rows, cols, std::move(words));
}

}  // namespace medsel
