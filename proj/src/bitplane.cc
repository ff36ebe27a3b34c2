// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "medsel/bitplane.h"

#include <bit>
#include <string>

#include "medsel/errors.h"

namespace medsel {

namespace {

std::size_t WordsFor(std::size_t rows) { return (rows + 63) / 64; }

}  // namespace

BitPlaneMatrix::BitPlaneMatrix(std::size_t rows, int width)
    : rows_(rows),
      width_(width),
      stride_(WordsFor(rows)),
      bits_(static_cast<std::size_t>(width) * WordsFor(rows), 0) {}

BitPlaneMatrix BitPlaneMatrix::Build(std::span<const Word> values, int width) {
  if (values.empty()) throw WidthError("bit-plane matrix needs at least one row");
  if (width < 1 || width > 64) {
    throw WidthError("bit-plane width must be in [1, 64], got " +
                     std::to_string(width));
  }
  const Word limit_mask = width == 64 ? 0 : ~Word{0} << width;
  BitPlaneMatrix m(values.size(), width);
  for (std::size_t row = 0; row < values.size(); ++row) {
    const Word v = values[row];
    if (v & limit_mask) {
      throw WidthError("value " + std::to_string(v) + " at row " +
                       std::to_string(row) + " does not fit in " +
                       std::to_string(width) + " bits");
    }
    const std::uint64_t row_bit = std::uint64_t{1} << (row % 64);
    for (int col = 0; col < width; ++col) {
      if ((v >> (width - 1 - col)) & 1u) {
        m.bits_[static_cast<std::size_t>(col) * m.stride_ + row / 64] |= row_bit;
      }
    }
  }
  return m;
}

Word BitPlaneMatrix::row_word(std::size_t row) const {
  Word w = 0;
  for (int col = 0; col < width_; ++col) w = (w << 1) | Word{bit(row, col)};
  return w;
}

BitPlaneMatrix BitPlaneMatrix::Slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > rows_) throw WidthError("invalid bit-plane slice");
  BitPlaneMatrix out(end - begin, width_);
  for (int col = 0; col < width_; ++col) {
    auto src = column(col);
    std::uint64_t* dst = out.bits_.data() + static_cast<std::size_t>(col) * out.stride_;
    for (std::size_t r = begin; r < end; ++r) {
      if ((src[r / 64] >> (r % 64)) & 1u) {
        const std::size_t i = r - begin;
        dst[i / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
  }
  return out;
}

RowMask::RowMask(std::size_t rows, bool included)
    : rows_(rows), words_(WordsFor(rows), included ? ~std::uint64_t{0} : 0) {
  if (included && rows % 64 != 0) {
    words_.back() = (std::uint64_t{1} << (rows % 64)) - 1;
  }
}

RowMask RowMask::FromLabels(std::span<const std::uint32_t> labels,
                            std::uint32_t cluster) {
  RowMask mask(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cluster) mask.words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return mask;
}

void RowMask::set(std::size_t row, bool included) {
  const std::uint64_t b = std::uint64_t{1} << (row % 64);
  if (included) {
    words_[row / 64] |= b;
  } else {
    words_[row / 64] &= ~b;
  }
}

std::size_t RowMask::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

RowMask RowMask::Slice(std::size_t begin, std::size_t end) const {
  RowMask out(end - begin);
  for (std::size_t r = begin; r < end; ++r) {
    if (test(r)) out.set(r - begin);
  }
  return out;
}

SelectionState::SelectionState(const RowMask& mask)
    : participating_(mask.count()),
      active_(mask.words().begin(), mask.words().end()),
      sat_zero_(active_.size(), 0),
      sat_one_(active_.size(), 0) {}

RowTag SelectionState::tag(std::size_t row) const {
  const std::size_t w = row / 64;
  const std::uint64_t b = std::uint64_t{1} << (row % 64);
  if (active_[w] & b) return RowTag::kActive;
  if (sat_zero_[w] & b) return RowTag::kSaturatedZero;
  if (sat_one_[w] & b) return RowTag::kSaturatedOne;
  return RowTag::kExcluded;
}

ColumnCount SelectionState::Count(const BitPlaneMatrix& m, int col) const {
  auto bits = m.column(col);
  std::uint64_t ones = 0;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    ones += std::popcount(active_[i] & bits[i]) + std::popcount(sat_one_[i]);
  }
  return {participating_ - ones, ones};
}

std::size_t SelectionState::Saturate(const BitPlaneMatrix& m, int col,
                                     bool out_bit) {
  auto bits = m.column(col);
  std::size_t frozen = 0;
  for (std::size_t i = 0; i < active_.size(); ++i) {
    const std::uint64_t disagree = out_bit ? active_[i] & ~bits[i]
                                           : active_[i] & bits[i];
    if (!disagree) continue;
    frozen += std::popcount(disagree);
    active_[i] &= ~disagree;
    if (out_bit) {
      sat_zero_[i] |= disagree;
    } else {
      sat_one_[i] |= disagree;
    }
  }
  return frozen;
}

bool Majority(std::uint64_t zeros, std::uint64_t ones) {
  // zeros >= (zeros + ones) / 2, kept in integers.
  return !(2 * zeros >= zeros + ones);
}

std::uint64_t ValidateSelection(const BitPlaneMatrix& m, const RowMask& mask,
                                std::uint64_t rank) {
  if (mask.size() != m.rows()) {
    throw MaskError("mask covers " + std::to_string(mask.size()) +
                    " rows but the matrix has " + std::to_string(m.rows()));
  }
  const std::uint64_t n = mask.count();
  if (n == 0) throw MaskError("selection mask includes no rows");
  if (rank < 1 || rank > n) {
    throw RankError("rank " + std::to_string(rank) + " outside [1, " +
                    std::to_string(n) + "]");
  }
  return n;
}

std::vector<StepRecord> StepTrace(const BitPlaneMatrix& m, const RowMask& mask,
                                  std::uint64_t rank) {
  ValidateSelection(m, mask, rank);
  SelectionState state(mask);
  std::vector<StepRecord> trace;
  trace.reserve(m.width());
  for (int col = 0; col < m.width(); ++col) {
    const ColumnCount c = state.Count(m, col);
    const bool out = OutputBit(c.zeros, rank);
    const std::size_t frozen = state.Saturate(m, col, out);
    trace.push_back({col, c.zeros, c.ones, out, frozen});
  }
  return trace;
}

Word RankSelect(const BitPlaneMatrix& m, const RowMask& mask,
                std::uint64_t rank) {
  ValidateSelection(m, mask, rank);
  SelectionState state(mask);
  Word result = 0;
  for (int col = 0; col < m.width(); ++col) {
    const bool out = OutputBit(state.Count(m, col).zeros, rank);
    state.Saturate(m, col, out);
    result = (result << 1) | Word{out};
  }
  return result;
}

Word Median(const BitPlaneMatrix& m, const RowMask& mask) {
  if (mask.size() != m.rows()) {
    throw MaskError("mask size does not match matrix rows");
  }
  return RankSelect(m, mask, MedianRank(mask.count()));
}

}  // namespace medsel
