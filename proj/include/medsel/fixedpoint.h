// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// Order-preserving fixed-point encoding of real values into unsigned words.
//
// A codec maps a real r to round_half_even(r * 2^frac_bits) + bias. With
// bias = 0 only non-negative reals are representable; with bias = 2^(W-1)
// (offset binary) negative reals are too. In both cases unsigned comparison
// of the words agrees with numeric comparison of the reals, which is what
// lets the bit-serial selector work on plain bit patterns.
#ifndef MEDSEL_FIXEDPOINT_H_
#define MEDSEL_FIXEDPOINT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace medsel {

using Word = std::uint64_t;

class FixedPointCodec {
 public:
  // Throws RangeError unless 1 <= width <= 64, 0 <= frac_bits < width and
  // bias < 2^width.
  FixedPointCodec(int width, int frac_bits, Word bias = 0);

  static FixedPointCodec Unsigned(int width, int frac_bits);
  // Offset-binary codec, bias = 2^(width-1).
  static FixedPointCodec Signed(int width, int frac_bits);

  int width() const { return width_; }
  int frac_bits() const { return frac_bits_; }
  Word bias() const { return bias_; }
  Word max_word() const;
  // Real-valued size of one unit in the last place, 2^-frac_bits.
  double ulp() const;

  bool CanEncode(double value) const;
  // Throws RangeError if value is NaN or falls outside [0, 2^W - 1] after
  // scaling and biasing. Never clamps.
  Word Encode(double value) const;
  double Decode(Word word) const;

  bool operator==(const FixedPointCodec&) const = default;

 private:
  int width_;
  int frac_bits_;
  Word bias_;
};

inline Word Encode(double value, const FixedPointCodec& codec) {
  return codec.Encode(value);
}
inline double Decode(Word word, const FixedPointCodec& codec) {
  return codec.Decode(word);
}

// Picks the codec with the largest frac_bits for which every value encodes.
// Non-negative data gets bias 0, data with negatives gets offset binary.
// Throws RangeError if values is empty, contains NaN, or nothing fits.
FixedPointCodec FitCodec(std::span<const double> values, int width = 64);

// Row-major n x d matrix of words under one codec.
class EncodedMatrix {
 public:
  EncodedMatrix(FixedPointCodec codec, std::size_t rows, std::size_t cols,
                std::vector<Word> words);

  const FixedPointCodec& codec() const { return codec_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const Word> row(std::size_t i) const {
    return {words_.data() + i * cols_, cols_};
  }
  Word at(std::size_t i, std::size_t j) const { return words_[i * cols_ + j]; }
  std::vector<Word> column(std::size_t j) const;
  std::span<const Word> words() const { return words_; }

  // Rows [begin, end) or an explicit index list, same codec.
  EncodedMatrix SelectRows(std::span<const std::size_t> indices) const;

 private:
  FixedPointCodec codec_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Word> words_;
};

// Encodes a row-major block of reals. Throws RangeError on the first cell
// that does not fit, naming it by (row, col).
EncodedMatrix EncodeMatrix(std::span<const double> values, std::size_t rows,
                           std::size_t cols, const FixedPointCodec& codec);

}  // namespace medsel

#endif  // MEDSEL_FIXEDPOINT_H_
