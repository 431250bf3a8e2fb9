// Copyright (c) the BSGD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "bsgd/pd_ops.hpp"
#include "test_util.hpp"

namespace bsgd {
namespace {

// Independent index enumeration of the tile layout.
Image pd_down_oracle(const Image& x, int f) {
  Image out(x.height(), x.width(), x.channels());
  const int hs = x.height() / f, ws = x.width() / f;
  for (int k = 0; k < x.channels(); ++k)
    for (int r = 0; r < f; ++r)
      for (int c = 0; c < f; ++c)
        for (int i = 0; i < hs; ++i)
          for (int j = 0; j < ws; ++j) out.at(r * hs + i, c * ws + j, k) = x.at(i * f + r, j * f + c, k);
  return out;
}

TEST(PixelShuffle, UnitFactorIsIdentity) {
  const Image x = test::random_image(6, 10, 3, 1);
  EXPECT_TRUE(pd_down(x, 1).bitwise_equal(x));
  EXPECT_TRUE(pd_up(x, 1).bitwise_equal(x));
}

TEST(PixelShuffle, TwoByTwoTiles) {
  Image x(2, 2, 1);
  x.at(0, 0, 0) = 1;
  x.at(0, 1, 0) = 2;
  x.at(1, 0, 0) = 3;
  x.at(1, 1, 0) = 4;
  EXPECT_TRUE(pd_down(x, 2).bitwise_equal(x));
}

TEST(PixelShuffle, FourByFourLayout) {
  Image x(4, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int c = 0; c < 4; ++c) x.at(y, c, 0) = 10 * y + c;
  const Image d = pd_down(x, 2);
  // Top-left tile holds the even/even phase.
  EXPECT_EQ(d.at(0, 0, 0), 0);
  EXPECT_EQ(d.at(0, 1, 0), 2);
  EXPECT_EQ(d.at(1, 0, 0), 20);
  EXPECT_EQ(d.at(1, 1, 0), 22);
  // Bottom-right tile holds the odd/odd phase.
  EXPECT_EQ(d.at(2, 2, 0), 11);
  EXPECT_EQ(d.at(3, 3, 0), 33);
}

TEST(PixelShuffle, MatchesEnumerationAndInverts) {
  for (int f : {2, 4}) {
    for (int k = 0; k < 10; ++k) {
      const Image x = test::random_image(8, 8, 1 + k % 3, 40 + k);
      const Image d = pd_down(x, f);
      EXPECT_TRUE(d.bitwise_equal(pd_down_oracle(x, f)));
      EXPECT_TRUE(pd_up(d, f).bitwise_equal(x));
      EXPECT_TRUE(pd_down(pd_up(x, f), f).bitwise_equal(x));
    }
  }
}

TEST(PixelShuffle, RejectsIndivisible) {
  const Image x = test::random_image(6, 8, 1, 2);
  EXPECT_THROW(pd_down(x, 4), std::invalid_argument);
  EXPECT_THROW(pd_up(x, 4), std::invalid_argument);
  EXPECT_THROW(pd_down(x, 0), std::invalid_argument);
}

TEST(Mask, Extremes) {
  const ReplacementMask none = make_mask(16, 16, 0.0, 1);
  const ReplacementMask all = make_mask(16, 16, 1.0, 1);
  EXPECT_EQ(none.count(), 0u);
  EXPECT_EQ(all.count(), 256u);
  EXPECT_THROW(make_mask(4, 4, -0.1, 1), std::invalid_argument);
  EXPECT_THROW(make_mask(4, 4, 1.1, 1), std::invalid_argument);
}

TEST(Mask, BinomialBound) {
  const ReplacementMask m = make_mask(128, 128, 0.25, 77);
  const double n = 128.0 * 128.0;
  const double sigma = std::sqrt(0.25 * 0.75 / n);
  const double frac = static_cast<double>(m.count()) / n;
  EXPECT_GE(frac, 0.25 - 3 * sigma);
  EXPECT_LE(frac, 0.25 + 3 * sigma);
}

TEST(Mask, PureFunctionOfInputs) {
  const ReplacementMask a = make_mask(32, 24, 0.3, 5);
  const ReplacementMask b = make_mask(32, 24, 0.3, 5);
  const ReplacementMask c = make_mask(32, 24, 0.3, 6);
  EXPECT_EQ(a.bits, b.bits);
  EXPECT_NE(a.bits, c.bits);
}

TEST(Replace, ExtremesAndPartition) {
  const Image dst = test::random_image(8, 8, 3, 1);
  const Image src = test::random_image(8, 8, 3, 2);
  EXPECT_TRUE(replace(dst, src, make_mask(8, 8, 0.0, 1)).bitwise_equal(dst));
  EXPECT_TRUE(replace(dst, src, make_mask(8, 8, 1.0, 1)).bitwise_equal(src));

  const ReplacementMask m = make_mask(8, 8, 0.4, 9);
  const Image a = replace(dst, src, m);
  const Image b = replace(src, dst, m.inverted());
  for (int k = 0; k < 3; ++k)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) {
        // Both outputs pick the same source for every pixel.
        EXPECT_EQ(a.at(y, x, k), m(y, x) ? src.at(y, x, k) : dst.at(y, x, k));
        EXPECT_EQ(b.at(y, x, k), a.at(y, x, k));
      }
}

TEST(Replace, IdempotentForFixedMask) {
  const Image dst = test::random_image(8, 8, 1, 3);
  const Image src = test::random_image(8, 8, 1, 4);
  const ReplacementMask m = make_mask(8, 8, 0.5, 2);
  const Image once = replace(dst, src, m);
  EXPECT_TRUE(replace(once, src, m).bitwise_equal(once));
}

TEST(Replace, ShapeMismatch) {
  const Image a = test::random_image(8, 8, 1, 3);
  EXPECT_THROW(replace(a, test::random_image(8, 4, 1, 3), make_mask(8, 8, 0.5, 1)),
               std::invalid_argument);
  EXPECT_THROW(replace(a, a, make_mask(4, 8, 0.5, 1)), std::invalid_argument);
}

}  // namespace
}  // namespace bsgd
