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
#include <fstream>

#include "bsgd/image_io.hpp"
#include "bsgd/metrics.hpp"
#include "test_util.hpp"

namespace bsgd {
namespace {

// Direct 2-D windowed SSIM, written independently of the separable version.
double ssim_brute(const Image& a, const Image& b, double peak) {
  const int n = 11, r = 5;
  const double sigma = 1.5;
  double w[11][11], sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      w[i][j] = std::exp(-((i - r) * (i - r) + (j - r) * (j - r)) / (2 * sigma * sigma));
      sum += w[i][j];
    }
  const double c1 = std::pow(0.01 * peak, 2), c2 = std::pow(0.03 * peak, 2);
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double acc = 0.0;
    int count = 0;
    for (int y = 0; y + n <= a.height(); ++y)
      for (int x = 0; x + n <= a.width(); ++x) {
        double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double k = w[i][j] / sum;
            const double p = a.at(y + i, x + j, c), q = b.at(y + i, x + j, c);
            mx += k * p;
            my += k * q;
            sxx += k * p * p;
            syy += k * q * q;
            sxy += k * p * q;
          }
        const double vx = sxx - mx * mx, vy = syy - my * my, cv = sxy - mx * my;
        acc += (2 * mx * my + c1) * (2 * cv + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
    total += acc / count;
  }
  return total / a.channels();
}

TEST(Psnr, HandValues) {
  const Image a = test::random_image(5, 5, 1, 1);
  EXPECT_EQ(psnr(a, a, 2.0), kPsnrIdentical);
  EXPECT_TRUE(std::isinf(psnr(a, a, 2.0)));

  Image p(1, 1, 1), q(1, 1, 1);
  q[0] = 255.0;
  EXPECT_NEAR(psnr(p, q, 255.0), 0.0, 1e-12);

  // MSE = peak^2 / 100.
  Image x(2, 2, 1), y(2, 2, 1);
  for (double& v : y.values()) v = 25.5;
  EXPECT_NEAR(psnr(x, y, 255.0), 20.0, 1e-12);
  EXPECT_THROW(psnr(x, y, 0.0), std::invalid_argument);
  EXPECT_THROW(psnr(x, Image(2, 3, 1), 1.0), std::invalid_argument);
}

TEST(Psnr, EightBitHandPair) {
  // One pixel off by 10 levels in a 16x16 image: MSE = 100 / 256.
  Image a(16, 16, 1), b(16, 16, 1);
  for (double& v : a.values()) v = storage_to_internal(100);
  b = a;
  b.at(7, 3, 0) = storage_to_internal(110);
  EXPECT_NEAR(psnr_8bit(a, b), 52.2132032617976, 1e-6);
}

TEST(Psnr, DecreasesWithNoise) {
  const Image clean = test::random_image(32, 32, 1, 2, 0.2);
  double prev = kPsnrIdentical;
  for (double s : {0.02, 0.05, 0.1}) {
    Image noisy = clean;
    Rng rng(3);
    for (double& v : noisy.values()) v += s * rng.normal();
    const double p = psnr(clean, noisy, 2.0);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Ssim, IdentityAndSign) {
  const Image a = test::random_image(16, 16, 3, 4);
  EXPECT_EQ(ssim(a, a, 2.0), 1.0);
  const Image c = test::constant_image(16, 16, 1, 1.0);
  const Image neg = test::constant_image(16, 16, 1, -1.0);
  EXPECT_LT(ssim(c, neg, 2.0), 0.0);
}

TEST(Ssim, MatchesBruteForce) {
  const Image a = test::random_image(24, 20, 2, 5);
  Image b = a;
  Rng rng(6);
  for (double& v : b.values()) v += 0.3 * rng.normal();
  EXPECT_NEAR(ssim(a, b, 2.0), ssim_brute(a, b, 2.0), 1e-6);
  const Image la = to_storage_levels(a), lb = to_storage_levels(b);
  EXPECT_NEAR(ssim(la, lb, 255.0), ssim_brute(la, lb, 255.0), 1e-6);
}

TEST(Ssim, SymmetricAndBounded) {
  const Image a = test::random_image(16, 16, 1, 7);
  const Image b = test::random_image(16, 16, 1, 8);
  EXPECT_DOUBLE_EQ(ssim(a, b, 2.0), ssim(b, a, 2.0));
  EXPECT_DOUBLE_EQ(psnr(a, b, 2.0), psnr(b, a, 2.0));
  EXPECT_GE(ssim(a, b, 2.0), -1.0);
  EXPECT_LE(ssim(a, b, 2.0), 1.0);
}

TEST(Ssim, RejectsSmallImages) {
  const Image a = test::random_image(10, 16, 1, 1);
  EXPECT_THROW(ssim(a, a, 2.0), std::invalid_argument);
}

TEST(MetricReport, CsvAndMeans) {
  MetricReport r;
  r.add("a", 30.0, 0.8);
  r.add("b", 20.0, 0.6);
  EXPECT_DOUBLE_EQ(r.mean_psnr(), 25.0);
  EXPECT_DOUBLE_EQ(r.mean_ssim(), 0.7);
  r.add("c", kPsnrIdentical, 1.0);
  const auto dir = test::temp_dir("report");
  r.write_csv(dir / "m.csv");
  std::ifstream in(dir / "m.csv");
  std::string header, row_a, row_b, row_c, mean;
  std::getline(in, header);
  std::getline(in, row_a);
  std::getline(in, row_b);
  std::getline(in, row_c);
  std::getline(in, mean);
  EXPECT_EQ(header, "image_id,psnr_db,ssim");
  EXPECT_EQ(row_a, "a,30,0.8");
  EXPECT_EQ(row_c, "c,inf,1");
  EXPECT_EQ(mean.substr(0, 9), "mean,inf,");
}

TEST(EvaluateDirectories, IdenticalAndUnmatched) {
  const auto den = test::temp_dir("eval_den");
  const auto ref = test::temp_dir("eval_ref");
  for (int i = 0; i < 3; ++i) {
    const Image img = test::random_image(16, 16, 1, 20 + i, 0.3);
    write_png(img, den / ("x" + std::to_string(i) + ".png"));
    write_png(img, ref / ("x" + std::to_string(i) + ".png"));
  }
  const MetricReport rep = evaluate_directories(den, ref);
  EXPECT_EQ(rep.count(), 3u);
  EXPECT_EQ(rep.mean_ssim(), 1.0);
  EXPECT_EQ(rep.mean_psnr(), kPsnrIdentical);

  write_png(test::random_image(16, 16, 1, 30), den / "extra.png");
  try {
    evaluate_directories(den, ref);
    FAIL() << "expected an unmatched-file error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("extra.png"), std::string::npos);
  }
}

}  // namespace
}  // namespace bsgd
