// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "medsel/pimsim.h"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>

#include "medsel/errors.h"

namespace medsel {

void TileConfig::Validate() const {
  if (rows_per_array < 1) throw RangeError("rows_per_array must be >= 1");
  if (group_size < 1 || group_size > rows_per_array) {
    throw RangeError("group_size must be in [1, rows_per_array]");
  }
  if (tree_fanin < 2) throw RangeError("tree_fanin must be >= 2");
}

TileConfig TileConfig::Parse(std::string_view text) {
  TileConfig cfg;
  std::size_t* fields[] = {&cfg.rows_per_array, &cfg.group_size,
                           &cfg.tree_fanin};
  std::size_t idx = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    if (idx >= 3) throw RangeError("tile config takes exactly 3 fields: R,G,F");
    const std::string field(text.substr(start, end - start));
    char* stop = nullptr;
    const unsigned long long v = std::strtoull(field.c_str(), &stop, 10);
    if (field.empty() || *stop != '\0') {
      throw RangeError("bad tile config field '" + field + "'");
    }
    *fields[idx++] = static_cast<std::size_t>(v);
    start = end + 1;
  }
  if (idx != 3) throw RangeError("tile config takes exactly 3 fields: R,G,F");
  cfg.Validate();
  return cfg;
}

TileConfig TileConfig::FromEnvironment() {
  const char* env = std::getenv("MEDSEL_TILES");
  if (env == nullptr || *env == '\0') return TileConfig{};
  return Parse(env);
}

double CostLedger::ratio() const {
  if (host_bits_moved == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(bits_moved) / static_cast<double>(host_bits_moved);
}

CostLedger& CostLedger::operator+=(const CostLedger& o) {
  selections += o.selections;
  column_activations += o.column_activations;
  counting_steps += o.counting_steps;
  merge_ops += o.merge_ops;
  bits_moved += o.bits_moved;
  host_bits_moved += o.host_bits_moved;
  return *this;
}

TilePlan Partition(const BitPlaneMatrix& m, const TileConfig& cfg) {
  cfg.Validate();
  TilePlan plan;
  plan.total_rows = m.rows();
  plan.width = m.width();
  for (std::size_t begin = 0; begin < m.rows(); begin += cfg.rows_per_array) {
    const std::size_t end = std::min(m.rows(), begin + cfg.rows_per_array);
    plan.tiles.push_back({begin, m.Slice(begin, end)});
  }
  return plan;
}

int CountWidthBits(std::uint64_t n) { return std::bit_width(n); }

ColumnCount TileColumnCount(const Tile& tile, const SelectionState& state,
                            int col, const TileConfig& cfg, CostLedger& ledger) {
  const std::uint64_t n = state.participating();
  ledger.column_activations += 1;
  ledger.counting_steps += (n + cfg.group_size - 1) / cfg.group_size;
  return state.Count(tile.bits, col);
}

Reduction ReduceCounts(std::span<const ColumnCount> partials,
                       std::size_t fanin, int count_width, CostLedger& ledger) {
  if (partials.empty()) throw RangeError("no partial counts to reduce");
  if (fanin < 2) throw RangeError("tree_fanin must be >= 2");
  std::vector<ColumnCount> level(partials.begin(), partials.end());
  Reduction out;
  while (level.size() > 1) {
    std::vector<ColumnCount> next;
    next.reserve((level.size() + fanin - 1) / fanin);
    for (std::size_t i = 0; i < level.size(); i += fanin) {
      const std::size_t end = std::min(level.size(), i + fanin);
      ColumnCount sum;
      for (std::size_t j = i; j < end; ++j) sum += level[j];
      if (end - i > 1) {
        ledger.merge_ops += 1;
        ledger.bits_moved += (end - i) * 2 * static_cast<std::uint64_t>(count_width);
      }
      next.push_back(sum);
    }
    level = std::move(next);
    ++out.levels;
  }
  out.total = level.front();
  return out;
}

Word SimulatedRankSelect(const TilePlan& plan, const RowMask& mask,
                         std::uint64_t rank, const TileConfig& cfg,
                         CostLedger& ledger) {
  cfg.Validate();
  if (mask.size() != plan.total_rows) {
    throw MaskError("mask covers " + std::to_string(mask.size()) +
                    " rows but the plan has " + std::to_string(plan.total_rows));
  }
  const std::uint64_t n = mask.count();
  if (n == 0) throw MaskError("selection mask includes no rows");
  if (rank < 1 || rank > n) {
    throw RankError("rank " + std::to_string(rank) + " outside [1, " +
                    std::to_string(n) + "]");
  }

  // Each tile keeps its own flags; only counts and the output bit cross.
  std::vector<SelectionState> states;
  states.reserve(plan.tiles.size());
  for (const Tile& t : plan.tiles) {
    states.emplace_back(mask.Slice(t.first_row, t.first_row + t.size()));
  }

  const int count_width = CountWidthBits(n);
  std::vector<ColumnCount> partials(plan.tiles.size());
  ledger.selections += 1;
  Word result = 0;
  for (int col = 0; col < plan.width; ++col) {
    for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
      partials[t] = TileColumnCount(plan.tiles[t], states[t], col, cfg, ledger);
    }
    const Reduction red = ReduceCounts(partials, cfg.tree_fanin, count_width, ledger);
    const bool out = OutputBit(red.total.zeros, rank);
    ledger.bits_moved += plan.tiles.size();
    for (std::size_t t = 0; t < plan.tiles.size(); ++t) {
      states[t].Saturate(plan.tiles[t].bits, col, out);
    }
    result = (result << 1) | Word{out};
  }
  return result;
}

void AddStreamingBaselineCost(std::uint64_t n, int width, CostLedger& ledger) {
  ledger.host_bits_moved += n * static_cast<std::uint64_t>(width);
}

Accelerator::Accelerator(const BitPlaneMatrix& m, TileConfig cfg)
    : cfg_(cfg), plan_(Partition(m, cfg)) {}

Word Accelerator::RankSelect(const RowMask& mask, std::uint64_t rank,
                             CostLedger& ledger) const {
  const Word w = SimulatedRankSelect(plan_, mask, rank, cfg_, ledger);
  AddStreamingBaselineCost(mask.count(), plan_.width, ledger);
  return w;
}

Word Accelerator::Median(const RowMask& mask, CostLedger& ledger) const {
  return RankSelect(mask, MedianRank(mask.count()), ledger);
}

std::string LedgerCsvHeader() {
  return "N,W,tiles,counting_steps,merge_ops,bits_moved,host_bits_moved,ratio";
}

std::string LedgerCsvRow(const CostRow& row) {
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.6g", row.ledger.ratio());
  std::ostringstream out;
  out << row.n << ',' << row.width << ',' << row.tiles << ','
      << row.ledger.counting_steps << ',' << row.ledger.merge_ops << ','
      << row.ledger.bits_moved << ',' << row.ledger.host_bits_moved << ','
      << ratio;
  return out.str();
}

std::string CostModelFormulas(const TileConfig& cfg) {
  std::ostringstream out;
  out << "R = " << cfg.rows_per_array << " rows per array, G = "
      << cfg.group_size << " cells per counting step, F = " << cfg.tree_fanin
      << " tree fan-in\n"
      << "tiles T = ceil(N / R)\n"
      << "count width c = ceil(log2(N_active + 1)) bits\n"
      << "counting_steps = sum over columns and tiles of ceil(n_tile / G)\n"
      << "merge_ops = W * (internal nodes of a fan-in-F tree over T leaves)\n"
      << "bits_moved = W * (2 * c * (child edges of the tree) + T)\n"
      << "host_bits_moved = N_active * W\n"
      << "ratio = bits_moved / host_bits_moved\n";
  return out.str();
}

}  // namespace medsel
