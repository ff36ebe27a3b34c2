// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// Behavioral model of a tiled in-storage median accelerator.
//
// Rows live in fixed-size arrays (tiles). For every bit column each tile
// counts its own zeros/ones, `group_size` cells per counting step, and a
// fan-in-F adder tree merges the per-tile partial counts. The controller
// derives the output bit from the merged count and broadcasts it back; each
// tile then updates its own saturation flags. Only partial counts and the
// broadcast bits leave a tile, which is what the CostLedger accounts for.
//
// The analog counter is modeled as an exact digital count. Results are
// bit-identical to RankSelect on the unpartitioned matrix.
#ifndef MEDSEL_PIMSIM_H_
#define MEDSEL_PIMSIM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medsel/bitplane.h"
#include "medsel/fixedpoint.h"

namespace medsel {

struct TileConfig {
  std::size_t rows_per_array = 256;
  std::size_t group_size = 16;
  std::size_t tree_fanin = 2;

  // Throws RangeError unless R >= 1, 1 <= G <= R and F >= 2.
  void Validate() const;
  bool operator==(const TileConfig&) const = default;

  // Parses "R,G,F" (e.g. "256,16,2"). Throws RangeError.
  static TileConfig Parse(std::string_view text);
  // Defaults, overridden by MEDSEL_TILES when set.
  static TileConfig FromEnvironment();
};

struct CostLedger {
  std::uint64_t selections = 0;
  std::uint64_t column_activations = 0;
  std::uint64_t counting_steps = 0;
  std::uint64_t merge_ops = 0;
  std::uint64_t bits_moved = 0;
  std::uint64_t host_bits_moved = 0;

  // bits_moved / host_bits_moved; NaN if nothing was streamed.
  double ratio() const;
  CostLedger& operator+=(const CostLedger& o);
  bool operator==(const CostLedger&) const = default;
};

struct Tile {
  std::size_t first_row = 0;
  BitPlaneMatrix bits;

  std::size_t size() const { return bits.rows(); }
};

struct TilePlan {
  std::size_t total_rows = 0;
  int width = 0;
  std::vector<Tile> tiles;
};

// ceil(N / R) tiles; row i goes to tile i / R.
TilePlan Partition(const BitPlaneMatrix& m, const TileConfig& cfg);

// Bits needed for one component of a partial count over n participating rows,
// ceil(log2(n + 1)).
int CountWidthBits(std::uint64_t n);

// Counts one column inside one tile. `state` covers the tile's rows only.
// Adds ceil(participating / G) counting steps and one column activation.
ColumnCount TileColumnCount(const Tile& tile, const SelectionState& state,
                            int col, const TileConfig& cfg, CostLedger& ledger);

struct Reduction {
  ColumnCount total;
  std::size_t levels = 0;
};

// Merges partial counts through a fan-in tree in fixed left-to-right order.
// Each internal node is one merge op; every child edge moves two counts of
// count_width bits. A lone leftover at a level is carried up unmerged.
Reduction ReduceCounts(std::span<const ColumnCount> partials,
                       std::size_t fanin, int count_width, CostLedger& ledger);

// Same contract as RankSelect, computed on the tiled model.
Word SimulatedRankSelect(const TilePlan& plan, const RowMask& mask,
                         std::uint64_t rank, const TileConfig& cfg,
                         CostLedger& ledger);

// Host-side baseline: every participating word streamed once.
void AddStreamingBaselineCost(std::uint64_t n, int width, CostLedger& ledger);

// A partitioned matrix plus its configuration, for repeated selections.
class Accelerator {
 public:
  Accelerator(const BitPlaneMatrix& m, TileConfig cfg);

  const TilePlan& plan() const { return plan_; }
  const TileConfig& config() const { return cfg_; }

  // Runs one selection and adds both its in-situ and streaming cost.
  Word RankSelect(const RowMask& mask, std::uint64_t rank, CostLedger& ledger) const;
  Word Median(const RowMask& mask, CostLedger& ledger) const;

 private:
  TileConfig cfg_;
  TilePlan plan_;
};

// One selection's cost row.
struct CostRow {
  std::uint64_t n = 0;
  int width = 0;
  std::size_t tiles = 0;
  CostLedger ledger;
};

// Column order: N,W,tiles,counting_steps,merge_ops,bits_moved,host_bits_moved,ratio
std::string LedgerCsvHeader();
std::string LedgerCsvRow(const CostRow& row);

// Plain-text statement of the cost formulas, one per line.
std::string CostModelFormulas(const TileConfig& cfg);

}  // namespace medsel

#endif  // MEDSEL_PIMSIM_H_
