// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.
#ifndef MEDSEL_TESTS_ORACLES_H_
#define MEDSEL_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace medsel::oracle {

// r-th smallest (1-based) of the included values, by sorting.
inline std::uint64_t SortRank(std::span<const std::uint64_t> values,
                              const std::vector<bool>& included, std::uint64_t r) {
  std::vector<std::uint64_t> kept;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (included[i]) kept.push_back(values[i]);
  }
  std::sort(kept.begin(), kept.end());
  return kept.at(r - 1);
}

// The bit-serial walk as literally described: a row disagreeing with the
// chosen output bit has every lower-order bit overwritten with its own bit.
// Works on a private copy of the words.
inline std::uint64_t RewriteRankSelect(std::vector<std::uint64_t> words,
                                       const std::vector<bool>& included,
                                       int width, std::uint64_t r) {
  std::vector<bool> frozen(words.size(), false);
  std::uint64_t result = 0;
  for (int col = 0; col < width; ++col) {
    const int shift = width - 1 - col;
    std::uint64_t zeros = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (included[i] && ((words[i] >> shift) & 1u) == 0) ++zeros;
    }
    const std::uint64_t out = zeros >= r ? 0 : 1;
    result = (result << 1) | out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (!included[i] || frozen[i]) continue;
      const std::uint64_t b = (words[i] >> shift) & 1u;
      if (b != out) {
        frozen[i] = true;
        const std::uint64_t low = shift == 0 ? 0 : ((std::uint64_t{1} << shift) - 1);
        words[i] = b ? (words[i] | low) : (words[i] & ~low);
      }
    }
  }
  return result;
}

// Mean silhouette from decoded points, computed directly from the textbook
// definition with an O(n^2) loop over all pairs.
inline double Silhouette(const std::vector<std::vector<double>>& pts,
                         std::span<const std::uint32_t> labels, bool l1) {
  const std::size_t n = pts.size();
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t t = 0; t < pts[a].size(); ++t) {
      const double d = pts[a][t] - pts[b][t];
      s += l1 ? std::fabs(d) : d * d;
    }
    return l1 ? s : std::sqrt(s);
  };
  std::uint32_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> cnt(k, 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += dist(i, j);
      ++cnt[labels[j]];
    }
    if (cnt[labels[i]] == 0) continue;
    const double a = sum[labels[i]] / cnt[labels[i]];
    double b = std::numeric_limits<double>::infinity();
    for (std::uint32_t c = 0; c < k; ++c) {
      if (c != labels[i] && cnt[c] > 0) b = std::min(b, sum[c] / cnt[c]);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / n;
}

// Two-pass sample statistics at 50 decimal digits.
struct HighPrecisionStats {
  double mean = 0;
  double var = 0;
  double sum = 0;
};

inline HighPrecisionStats TwoPass(std::span<const double> v) {
  using Big = boost::multiprecision::cpp_dec_float_50;
  Big sum = 0;
  for (double x : v) sum += Big(x);
  const Big mean = sum / Big(v.size());
  Big ss = 0;
  for (double x : v) ss += (Big(x) - mean) * (Big(x) - mean);
  HighPrecisionStats out;
  out.sum = sum.convert_to<double>();
  out.mean = mean.convert_to<double>();
  out.var = (ss / Big(v.size() - 1)).convert_to<double>();
  return out;
}

}  // namespace medsel::oracle

#endif  // MEDSEL_TESTS_ORACLES_H_
