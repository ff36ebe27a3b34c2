// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "medsel/pimsim.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <vector>

#include "medsel/errors.h"

namespace medsel {
namespace {

std::vector<Word> Iota(std::size_t n) {
  std::vector<Word> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

TEST(TileConfigTest, ValidatesAndParses) {
  EXPECT_NO_THROW(TileConfig{}.Validate());
  EXPECT_THROW((TileConfig{0, 1, 2}.Validate()), RangeError);
  EXPECT_THROW((TileConfig{8, 9, 2}.Validate()), RangeError);
  EXPECT_THROW((TileConfig{8, 0, 2}.Validate()), RangeError);
  EXPECT_THROW((TileConfig{8, 4, 1}.Validate()), RangeError);

  const TileConfig cfg = TileConfig::Parse("64,8,4");
  EXPECT_EQ(cfg.rows_per_array, 64u);
  EXPECT_EQ(cfg.group_size, 8u);
  EXPECT_EQ(cfg.tree_fanin, 4u);
  EXPECT_THROW(TileConfig::Parse("64,8"), RangeError);
  EXPECT_THROW(TileConfig::Parse("64,8,4,1"), RangeError);
  EXPECT_THROW(TileConfig::Parse("64,x,4"), RangeError);
  EXPECT_THROW(TileConfig::Parse("4,8,2"), RangeError);
}

TEST(TileConfigTest, ReadsEnvironment) {
  ::setenv("MEDSEL_TILES", "32,4,3", 1);
  EXPECT_EQ(TileConfig::FromEnvironment().rows_per_array, 32u);
  ::unsetenv("MEDSEL_TILES");
  EXPECT_EQ(TileConfig::FromEnvironment().rows_per_array, 256u);
}

TEST(PartitionTest, TileSizes) {
  const auto m = BitPlaneMatrix::Build(Iota(1000), 10);
  const TilePlan plan = Partition(m, TileConfig{});
  ASSERT_EQ(plan.tiles.size(), 4u);
  EXPECT_EQ(plan.tiles[0].size(), 256u);
  EXPECT_EQ(plan.tiles[2].size(), 256u);
  EXPECT_EQ(plan.tiles[3].size(), 232u);
  EXPECT_EQ(plan.tiles[3].first_row, 768u);
  // Row i lands in tile i / R with its own word.
  for (std::size_t i = 0; i < 1000; i += 37) {
    const Tile& t = plan.tiles[i / 256];
    EXPECT_EQ(t.bits.row_word(i - t.first_row), i);
  }

  EXPECT_EQ(Partition(BitPlaneMatrix::Build(Iota(5), 3), {}).tiles.size(), 1u);
  const TilePlan full = Partition(BitPlaneMatrix::Build(Iota(256), 8), {});
  ASSERT_EQ(full.tiles.size(), 1u);
  EXPECT_EQ(full.tiles[0].size(), 256u);
}

TEST(TileColumnCountTest, CountsAndCharges) {
  const std::vector<Word> v = {0b10, 0b01};
  const auto plan = Partition(BitPlaneMatrix::Build(v, 2), {});
  CostLedger ledger;
  SelectionState all(RowMask::All(2));
  EXPECT_EQ(TileColumnCount(plan.tiles[0], all, 0, {}, ledger), (ColumnCount{1, 1}));
  EXPECT_EQ(ledger.column_activations, 1u);
  EXPECT_EQ(ledger.counting_steps, 1u);

  RowMask one(2);
  one.set(0);
  SelectionState single(one);
  EXPECT_EQ(TileColumnCount(plan.tiles[0], single, 0, {}, ledger), (ColumnCount{0, 1}));

  const auto big = Partition(BitPlaneMatrix::Build(Iota(256), 8), {});
  CostLedger l2;
  SelectionState s(RowMask::All(256));
  TileColumnCount(big.tiles[0], s, 0, TileConfig{256, 16, 2}, l2);
  EXPECT_EQ(l2.counting_steps, 16u);
}

TEST(ReduceCountsTest, TreeArithmetic) {
  CostLedger ledger;
  const std::vector<ColumnCount> one = {{3, 2}};
  const Reduction r1 = ReduceCounts(one, 2, 3, ledger);
  EXPECT_EQ(r1.total, (ColumnCount{3, 2}));
  EXPECT_EQ(ledger.merge_ops, 0u);
  EXPECT_EQ(ledger.bits_moved, 0u);

  const std::vector<ColumnCount> four = {{1, 0}, {0, 1}, {2, 2}, {1, 1}};
  const Reduction r4 = ReduceCounts(four, 2, 4, ledger);
  EXPECT_EQ(r4.total, (ColumnCount{4, 4}));
  EXPECT_EQ(r4.levels, 2);
  EXPECT_EQ(ledger.merge_ops, 3u);
  // Six tree edges, two components of four bits each.
  EXPECT_EQ(ledger.bits_moved, 6u * 2 * 4);

  CostLedger l3;
  const std::vector<ColumnCount> five(5, ColumnCount{1, 1});
  const Reduction r5 = ReduceCounts(five, 3, 4, l3);
  EXPECT_EQ(r5.total, (ColumnCount{5, 5}));
  EXPECT_EQ(r5.levels, 2);
  EXPECT_EQ(l3.merge_ops, 3u);

  EXPECT_THROW(ReduceCounts({}, 2, 1, ledger), RangeError);
}

TEST(SimulatedSelectTest, MergeOpsForThousandRows) {
  std::mt19937_64 rng(5);
  std::vector<Word> v(1000);
  for (auto& x : v) x = rng();
  const Accelerator acc(BitPlaneMatrix::Build(v, 64), TileConfig{256, 16, 2});
  CostLedger ledger;
  acc.Median(RowMask::All(1000), ledger);
  EXPECT_EQ(ledger.merge_ops, 192u);
  EXPECT_EQ(ledger.column_activations, 4u * 64);
  EXPECT_EQ(ledger.counting_steps, 64u * (16 + 16 + 16 + 15));
  EXPECT_EQ(ledger.host_bits_moved, 64000u);
  // c = 10 bits; per column 6 edges * 2 * 10 plus 4 broadcast bits.
  EXPECT_EQ(ledger.bits_moved, 64u * (6 * 2 * 10 + 4));
  EXPECT_LT(ledger.ratio(), 1.0);
}

TEST(SimulatedSelectTest, SingleTileMovesOnlyResultBits) {
  const std::vector<Word> v = {9, 3, 7, 1, 5};
  const Accelerator acc(BitPlaneMatrix::Build(v, 8), {});
  CostLedger ledger;
  EXPECT_EQ(acc.Median(RowMask::All(5), ledger), 5u);
  EXPECT_EQ(ledger.merge_ops, 0u);
  EXPECT_EQ(ledger.bits_moved, 8u);
  EXPECT_EQ(ledger.selections, 1u);
}

TEST(SimulatedSelectTest, StreamingBaseline) {
  CostLedger ledger;
  AddStreamingBaselineCost(1000, 64, ledger);
  EXPECT_EQ(ledger.host_bits_moved, 64000u);
  CostLedger small;
  AddStreamingBaselineCost(1, 8, small);
  EXPECT_EQ(small.host_bits_moved, 8u);
  EXPECT_TRUE(std::isnan(CostLedger{}.ratio()));
}

TEST(SimulatedSelectTest, PropagatesSelectionErrors) {
  const Accelerator acc(BitPlaneMatrix::Build(Iota(10), 4), TileConfig{4, 2, 2});
  CostLedger ledger;
  EXPECT_THROW(acc.RankSelect(RowMask(10), 1, ledger), MaskError);
  EXPECT_THROW(acc.RankSelect(RowMask::All(9), 1, ledger), MaskError);
  EXPECT_THROW(acc.RankSelect(RowMask::All(10), 11, ledger), RankError);
}

TEST(SimulatedSelectTest, TilingIsTransparentAndLedgerDeterministic) {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 1 + rng() % 600;
    const int w = 1 + static_cast<int>(rng() % 64);
    const Word top = w == 64 ? ~Word{0} : (Word{1} << w) - 1;
    std::vector<Word> v(n);
    for (auto& x : v) x = rng() & top;
    RowMask mask(n);
    for (std::size_t i = 0; i < n; ++i) mask.set(i, rng() % 3 != 0);
    if (mask.empty()) mask.set(0);
    const std::uint64_t r = 1 + rng() % mask.count();
    TileConfig cfg;
    cfg.rows_per_array = 1 + rng() % 300;
    cfg.group_size = 1 + rng() % cfg.rows_per_array;
    cfg.tree_fanin = 2 + rng() % 5;
    const auto m = BitPlaneMatrix::Build(v, w);
    const TilePlan plan = Partition(m, cfg);
    CostLedger a;
    CostLedger b;
    const Word got = SimulatedRankSelect(plan, mask, r, cfg, a);
    ASSERT_EQ(got, RankSelect(m, mask, r));
    ASSERT_EQ(SimulatedRankSelect(plan, mask, r, cfg, b), got);
    ASSERT_EQ(a, b);
  }
}

TEST(SimulatedSelectTest, CountsAreConservedAcrossTiles) {
  std::mt19937_64 rng(23);
  std::vector<Word> v(700);
  for (auto& x : v) x = rng() & 0xffff;
  RowMask mask(700);
  for (std::size_t i = 0; i < 700; ++i) mask.set(i, rng() % 2);
  const TileConfig cfg{100, 10, 3};
  const TilePlan plan = Partition(BitPlaneMatrix::Build(v, 16), cfg);
  CostLedger ledger;
  for (int col = 0; col < 16; ++col) {
    std::uint64_t total = 0;
    for (const Tile& t : plan.tiles) {
      SelectionState s(mask.Slice(t.first_row, t.first_row + t.size()));
      total += TileColumnCount(t, s, col, cfg, ledger).total();
    }
    EXPECT_EQ(total, mask.count());
  }
}

TEST(SimulatedSelectTest, CostGrowsWithRows) {
  std::mt19937_64 rng(29);
  CostLedger prev;
  for (std::size_t n : {16, 100, 256, 257, 600, 1500}) {
    std::vector<Word> v(n);
    for (auto& x : v) x = rng() & 0xfff;
    const Accelerator acc(BitPlaneMatrix::Build(v, 12), {});
    CostLedger l;
    acc.Median(RowMask::All(n), l);
    EXPECT_GE(l.counting_steps, prev.counting_steps);
    EXPECT_GE(l.host_bits_moved, prev.host_bits_moved);
    prev = l;
  }
}

TEST(CostCsvTest, FormatsRows) {
  CostRow row{1000, 64, 4, {}};
  row.ledger.counting_steps = 4032;
  row.ledger.merge_ops = 192;
  row.ledger.bits_moved = 7936;
  row.ledger.host_bits_moved = 64000;
  EXPECT_EQ(LedgerCsvHeader(),
            "N,W,tiles,counting_steps,merge_ops,bits_moved,host_bits_moved,ratio");
  EXPECT_EQ(LedgerCsvRow(row), "1000,64,4,4032,192,7936,64000,0.124");
  EXPECT_NE(CostModelFormulas({}).find("host_bits_moved = N_active * W"),
            std::string::npos);
}

}  // namespace
}  // namespace medsel
