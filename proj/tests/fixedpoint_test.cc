// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "medsel/fixedpoint.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "medsel/errors.h"

namespace medsel {
namespace {

TEST(FixedPointTest, EncodesOntoTheGrid) {
  // 7.4 * 8 = 59.2 rounds to 59.
  EXPECT_EQ(Encode(7.4, FixedPointCodec::Unsigned(8, 3)), 59u);
  EXPECT_EQ(Encode(0.0, FixedPointCodec::Unsigned(8, 3)), 0u);
  EXPECT_EQ(Encode(31.875, FixedPointCodec::Unsigned(8, 3)), 255u);
}

TEST(FixedPointTest, DecodeOfEncodeLandsOnNearestGridPoint) {
  // 6.8 * 256 = 1740.8 -> 1741, and 1741 / 256 = 6.80078125.
  const auto codec = FixedPointCodec::Unsigned(16, 8);
  EXPECT_EQ(Decode(Encode(6.8, codec), codec), 6.80078125);
}

TEST(FixedPointTest, TiesRoundToEven) {
  const auto codec = FixedPointCodec::Unsigned(8, 0);
  EXPECT_EQ(codec.Encode(0.5), 0u);
  EXPECT_EQ(codec.Encode(1.5), 2u);
  EXPECT_EQ(codec.Encode(2.5), 2u);
  EXPECT_EQ(codec.Encode(3.5), 4u);
  EXPECT_EQ(codec.Encode(2.500001), 3u);
}

TEST(FixedPointTest, OutOfRangeThrowsInsteadOfClamping) {
  const auto codec = FixedPointCodec::Unsigned(8, 3);
  EXPECT_THROW(codec.Encode(32.0), RangeError);
  EXPECT_THROW(codec.Encode(-0.5), RangeError);
  EXPECT_THROW(codec.Encode(std::numeric_limits<double>::quiet_NaN()), RangeError);
  EXPECT_THROW(codec.Encode(std::numeric_limits<double>::infinity()), RangeError);
  EXPECT_FALSE(codec.CanEncode(32.0));
  EXPECT_TRUE(codec.CanEncode(31.9));
}

TEST(FixedPointTest, RejectsBadParameters) {
  EXPECT_THROW(FixedPointCodec(0, 0), RangeError);
  EXPECT_THROW(FixedPointCodec(65, 0), RangeError);
  EXPECT_THROW(FixedPointCodec(8, 8), RangeError);
  EXPECT_THROW(FixedPointCodec(8, -1), RangeError);
  EXPECT_THROW(FixedPointCodec(8, 0, 256), RangeError);
  EXPECT_NO_THROW(FixedPointCodec(64, 63));
}

TEST(FixedPointTest, SignedCodecUsesOffsetBinary) {
  const auto codec = FixedPointCodec::Signed(8, 2);
  EXPECT_EQ(codec.bias(), 128u);
  EXPECT_EQ(codec.Encode(0.0), 128u);
  EXPECT_EQ(codec.Encode(-1.0), 124u);
  EXPECT_EQ(codec.Encode(1.0), 132u);
  EXPECT_EQ(codec.Decode(0), -32.0);
  EXPECT_THROW(codec.Encode(-32.5), RangeError);
}

TEST(FixedPointTest, EncodingPreservesOrder) {
  std::mt19937_64 rng(7);
  const auto codec = FixedPointCodec::Signed(64, 40);
  std::uniform_real_distribution<double> dist(-1000.0, 1000.0);
  for (int i = 0; i < 20000; ++i) {
    double a = dist(rng);
    double b = dist(rng);
    if (a > b) std::swap(a, b);
    EXPECT_LE(codec.Encode(a), codec.Encode(b)) << a << " " << b;
  }
}

TEST(FixedPointTest, RoundTripWithinHalfUlp) {
  std::mt19937_64 rng(11);
  for (int f : {0, 3, 8, 23, 40}) {
    const auto codec = FixedPointCodec::Signed(64, f);
    std::uniform_real_distribution<double> dist(-5000.0, 5000.0);
    for (int i = 0; i < 5000; ++i) {
      const double v = dist(rng);
      EXPECT_LE(std::fabs(codec.Decode(codec.Encode(v)) - v), codec.ulp() / 2)
          << "f=" << f << " v=" << v;
    }
  }
}

TEST(FixedPointTest, FitCodecPicksFinestFittingScale) {
  const std::vector<double> v = {0.0, 3.5, 100.0};
  const auto codec = FitCodec(v, 16);
  // 100 needs 7 integer bits, leaving 9 fraction bits in 16.
  EXPECT_EQ(codec.frac_bits(), 9);
  EXPECT_EQ(codec.bias(), 0u);
  for (double x : v) EXPECT_EQ(codec.Decode(codec.Encode(x)), x);

  const std::vector<double> neg = {-2.0, 1.0};
  const auto s = FitCodec(neg, 8);
  EXPECT_EQ(s.bias(), 128u);
  EXPECT_TRUE(s.CanEncode(-2.0));
  EXPECT_FALSE(FixedPointCodec::Signed(8, s.frac_bits() + 1).CanEncode(-2.0));

  EXPECT_THROW(FitCodec(std::vector<double>{}), RangeError);
}

TEST(FixedPointTest, EncodeMatrixReportsMissingAndRangeCells) {
  const auto codec = FixedPointCodec::Unsigned(8, 3);
  const std::vector<double> ok = {1.0, 2.0, 3.0, 4.0};
  const EncodedMatrix m = EncodeMatrix(ok, 2, 2, codec);
  EXPECT_EQ(m.at(1, 0), 24u);
  EXPECT_EQ(m.column(1), (std::vector<Word>{16, 32}));

  const std::vector<double> missing = {1.0, std::nan(""), 3.0, 4.0};
  EXPECT_THROW(EncodeMatrix(missing, 2, 2, codec), MissingError);
  const std::vector<double> big = {1.0, 2.0, 300.0, 4.0};
  try {
    EncodeMatrix(big, 2, 2, codec);
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(EncodeMatrix(ok, 3, 2, codec), ShapeError);
}

}  // namespace
}  // namespace medsel
