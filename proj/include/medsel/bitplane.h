// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// Bit-serial rank-order selection over bit planes.
//
// Words are stored column-major: column 0 holds the most significant bit of
// every row, column W-1 the least significant. Selection walks the columns
// from MSB to LSB. At each column it counts the zeros among participating
// rows, emits output bit 0 iff that count reaches the requested rank, and
// freezes every still-active row whose bit disagrees with the output. A
// frozen ("saturated") row keeps contributing its own bit at every later
// column, which is the same as overwriting all of its lower-order bits with
// that bit. For the median rank ceil(N/2) the per-column decision is the
// majority function.
#ifndef MEDSEL_BITPLANE_H_
#define MEDSEL_BITPLANE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "medsel/fixedpoint.h"

namespace medsel {

class BitPlaneMatrix {
 public:
  // Throws WidthError if values is empty, width is outside [1, 64], or any
  // value has bits at or above `width`.
  static BitPlaneMatrix Build(std::span<const Word> values, int width);

  std::size_t rows() const { return rows_; }
  int width() const { return width_; }

  // col 0 is the MSB.
  bool bit(std::size_t row, int col) const {
    return (column(col)[row / 64] >> (row % 64)) & 1u;
  }
  Word row_word(std::size_t row) const;

  // Packed bits of one column; bit i of the span is row i. Padding bits past
  // rows() are zero.
  std::span<const std::uint64_t> column(int col) const {
    return {bits_.data() + static_cast<std::size_t>(col) * stride_, stride_};
  }
  std::size_t words_per_column() const { return stride_; }

  // Copy of rows [begin, end).
  BitPlaneMatrix Slice(std::size_t begin, std::size_t end) const;

 private:
  BitPlaneMatrix(std::size_t rows, int width);

  std::size_t rows_;
  int width_;
  std::size_t stride_;
  std::vector<std::uint64_t> bits_;
};

// Per-row inclusion flags for one selection.
class RowMask {
 public:
  explicit RowMask(std::size_t rows, bool included = false);

  static RowMask All(std::size_t rows) { return RowMask(rows, true); }
  // Rows whose label equals `cluster`.
  static RowMask FromLabels(std::span<const std::uint32_t> labels,
                            std::uint32_t cluster);

  std::size_t size() const { return rows_; }
  bool test(std::size_t row) const {
    return (words_[row / 64] >> (row % 64)) & 1u;
  }
  void set(std::size_t row, bool included = true);
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  RowMask Slice(std::size_t begin, std::size_t end) const;
  std::span<const std::uint64_t> words() const { return words_; }

 private:
  std::size_t rows_;
  std::vector<std::uint64_t> words_;
};

enum class RowTag : std::uint8_t { kExcluded, kActive, kSaturatedZero, kSaturatedOne };

struct ColumnCount {
  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;

  std::uint64_t total() const { return zeros + ones; }
  ColumnCount& operator+=(const ColumnCount& o) {
    zeros += o.zeros;
    ones += o.ones;
    return *this;
  }
  bool operator==(const ColumnCount&) const = default;
};

// Per-call scratch state of one selection over one matrix (or one tile of a
// matrix): which rows take part and, of those, which are still active and
// which are saturated to 0 or 1. The matrix itself is never modified.
class SelectionState {
 public:
  // mask.size() must equal the row count of the matrix used with this state.
  explicit SelectionState(const RowMask& mask);

  std::size_t participating() const { return participating_; }
  RowTag tag(std::size_t row) const;

  // Zeros and ones at `col` over participating rows; saturated rows count
  // their saturation bit.
  ColumnCount Count(const BitPlaneMatrix& m, int col) const;

  // Freezes every active row whose bit at `col` differs from out_bit.
  // Returns the number of rows newly saturated.
  std::size_t Saturate(const BitPlaneMatrix& m, int col, bool out_bit);

 private:
  std::size_t participating_;
  std::vector<std::uint64_t> active_;
  std::vector<std::uint64_t> sat_zero_;
  std::vector<std::uint64_t> sat_one_;
};

// 0 iff at least half of the zeros + ones inputs are 0.
bool Majority(std::uint64_t zeros, std::uint64_t ones);

// Decision shared by every engine: bit 0 iff zeros >= rank.
inline bool OutputBit(std::uint64_t zeros, std::uint64_t rank) {
  return zeros < rank;
}

// Rank of the (lower) median among n items.
inline std::uint64_t MedianRank(std::uint64_t n) { return (n + 1) / 2; }

// Throws MaskError for a wrong-sized or empty mask and RankError when rank is
// not in [1, mask.count()]. Returns mask.count().
std::uint64_t ValidateSelection(const BitPlaneMatrix& m, const RowMask& mask,
                                std::uint64_t rank);

// rank-th smallest word among masked-in rows, rank counted from 1.
Word RankSelect(const BitPlaneMatrix& m, const RowMask& mask,
                std::uint64_t rank);

// Lower median for even counts.
Word Median(const BitPlaneMatrix& m, const RowMask& mask);

struct StepRecord {
  int column = 0;
  std::uint64_t zeros = 0;
  std::uint64_t ones = 0;
  bool out_bit = false;
  std::uint64_t rows_saturated = 0;
};

// One record per column of the walk RankSelect performs.
std::vector<StepRecord> StepTrace(const BitPlaneMatrix& m, const RowMask& mask,
                                  std::uint64_t rank);

}  // namespace medsel

#endif  // MEDSEL_BITPLANE_H_
