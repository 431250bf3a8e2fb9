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

#include "bsgd/image.hpp"
#include "bsgd/schedule.hpp"
#include "test_util.hpp"

namespace bsgd {
namespace {

// Frozen from a 40-digit cumulative product over the 1000 linear betas.
constexpr double kAlphaBar1000 = 4.035829765375683e-05;
constexpr double kAlphaBar300 = 0.3964197594582526;
// Desk schedule (T = 100, same endpoints).
constexpr double kDeskAlphaBar30 = 0.9133631980115529;

TEST(Schedule, LinearAlphaBarMatchesProductOracle) {
  const NoiseSchedule s = make_linear_schedule(1000, 1e-4, 0.02);
  EXPECT_NEAR(s.alpha_bar(1000) / kAlphaBar1000, 1.0, 1e-10);
  EXPECT_NEAR(s.alpha_bar(300) / kAlphaBar300, 1.0, 1e-12);
  EXPECT_NEAR(make_linear_schedule(100, 1e-4, 0.02).alpha_bar(30), kDeskAlphaBar30, 1e-13);
  EXPECT_DOUBLE_EQ(s.beta(1), 1e-4);
  EXPECT_DOUBLE_EQ(s.beta(1000), 0.02);
}

TEST(Schedule, SingleAndTwoStepProducts) {
  const NoiseSchedule one = make_linear_schedule(1, 0.5, 0.5);
  ASSERT_EQ(one.steps(), 1);
  EXPECT_EQ(one.beta(1), 0.5);
  EXPECT_EQ(one.alpha_bar(1), 0.5);
  const NoiseSchedule two = make_linear_schedule(2, 0.5, 0.5);
  EXPECT_EQ(two.alpha_bar(1), 0.5);
  EXPECT_EQ(two.alpha_bar(2), 0.25);
}

TEST(Schedule, Invariants) {
  for (int T : {1, 10, 100, 1000}) {
    const NoiseSchedule s = make_linear_schedule(T, 1e-4, 0.02);
    EXPECT_EQ(s.alpha_bar(0), 1.0);
    for (int t = 1; t <= T; ++t) {
      EXPECT_GT(s.beta(t), 0.0);
      EXPECT_LT(s.beta(t), 1.0);
      EXPECT_LT(s.alpha_bar(t), s.alpha_bar(t - 1));
      EXPECT_GT(s.alpha_bar(t), 0.0);
      EXPECT_NEAR(s.alpha(t) * s.alpha_bar(t - 1) / s.alpha_bar(t), 1.0, 1e-12);
    }
  }
}

TEST(Schedule, RejectsBadEndpoints) {
  EXPECT_THROW(make_linear_schedule(0, 1e-4, 0.02), std::invalid_argument);
  EXPECT_THROW(make_linear_schedule(10, 0.02, 1e-4), std::invalid_argument);
  EXPECT_THROW(make_linear_schedule(10, 0.0, 0.02), std::invalid_argument);
  EXPECT_THROW(make_linear_schedule(10, 1e-4, 1.0), std::invalid_argument);
  EXPECT_THROW(NoiseSchedule({0.1, 1.5}), std::invalid_argument);
}

TEST(Schedule, TimestepRange) {
  const NoiseSchedule s = make_linear_schedule(10, 1e-4, 0.02);
  const Image x = test::random_image(4, 4, 1, 1);
  EXPECT_THROW(forward_diffuse(x, 11, x, s), std::out_of_range);
  EXPECT_THROW(forward_diffuse(x, -1, x, s), std::out_of_range);
  EXPECT_THROW(forward_diffuse(x, 3, Image(4, 5, 1), s), std::invalid_argument);
}

TEST(ForwardDiffuse, HandExamples) {
  // ab = 0.25 at t = 2 for betas (0.5, 0.5).
  const NoiseSchedule s = make_linear_schedule(2, 0.5, 0.5);
  const Image x0 = test::constant_image(3, 3, 1, 2.0);
  const Image zero(3, 3, 1);
  const Image out = forward_diffuse(x0, 2, zero, s);
  for (double v : out.values()) EXPECT_EQ(v, 1.0);
  // t = 0 leaves the input untouched.
  EXPECT_TRUE(forward_diffuse(x0, 0, test::random_image(3, 3, 1, 5), s).bitwise_equal(x0));
}

TEST(ForwardDiffuse, MonteCarloMoments) {
  const NoiseSchedule s = make_linear_schedule(100, 1e-4, 0.02);
  // 100 draws of a 100x100 image give 1e6 samples per timestep. At 1e4 the
  // standard error of the mean at t=90 is about 2% of the target itself, so a
  // 2% band would fail by chance; 1e6 puts it near 0.2%.
  const Image x0 = test::constant_image(100, 100, 1, 0.6);
  Rng rng(99);
  for (int t : {5, 30, 90}) {
    const int draws = 100;
    const double n = draws * 1e4;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const Image xt = forward_diffuse(x0, t, rng.normal_image(100, 100, 1), s);
      for (double v : xt.values()) {
        sum += v;
        sq += v * v;
      }
    }
    const double mean = sum / n, var = sq / n - mean * mean;
    const double ab = s.alpha_bar(t);
    EXPECT_NEAR(mean / (std::sqrt(ab) * 0.6), 1.0, 0.02) << "t=" << t;
    EXPECT_NEAR(var / (1.0 - ab), 1.0, 0.02) << "t=" << t;
  }
}

TEST(Conversions, HandExamples) {
  const NoiseSchedule s = make_linear_schedule(2, 0.5, 0.5);  // ab(2) = 0.25
  const Image xt = test::constant_image(1, 1, 1, 1.0);
  EXPECT_NEAR(x0_to_eps(xt, test::constant_image(1, 1, 1, 2.0), 2, s)[0], 0.0, 1e-15);
  // eps_hat = 0 gives x_t / sqrt(ab).
  EXPECT_NEAR(eps_to_x0(xt, Image(1, 1, 1), 2, s)[0], 2.0, 1e-15);
  // x_t = 0.5 with eps solved by hand for x0 = 1: eps = (0.5 - 0.5) / sqrt(0.75) = 0.
  const Image half = test::constant_image(1, 1, 1, 0.5);
  const Image eps = x0_to_eps(half, test::constant_image(1, 1, 1, 1.0), 2, s);
  EXPECT_NEAR(eps[0], 0.0, 1e-15);
  EXPECT_NEAR(eps_to_x0(half, eps, 2, s)[0], 1.0, 1e-6);
}

TEST(Conversions, RoundTrips) {
  const NoiseSchedule s = make_linear_schedule(1000, 1e-4, 0.02);
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const int t = rng.uniform_int(1, 1000);
    const Image x0 = test::random_image(8, 8, 1, 100 + k);
    const Image eps = rng.normal_image(8, 8, 1);
    const Image xt = forward_diffuse(x0, t, eps, s);
    EXPECT_LE(test::max_abs_diff(x0_to_eps(xt, x0, t, s), eps), 1e-6);
    EXPECT_LE(test::max_abs_diff(eps_to_x0(xt, eps, t, s), x0), 1e-6);
    const Image other = test::random_image(8, 8, 1, 500 + k);
    EXPECT_LE(test::max_abs_diff(eps_to_x0(xt, x0_to_eps(xt, other, t, s), t, s), other), 1e-6);
  }
}

TEST(Conversions, DegenerateStepsRejected) {
  const NoiseSchedule s = make_linear_schedule(10, 1e-4, 0.02);
  const Image x = test::random_image(2, 2, 1, 1);
  EXPECT_THROW(x0_to_eps(x, x, 0, s), std::domain_error);
}

TEST(ImageRange, StorageRoundTripIsExact) {
  for (int l = 0; l < 256; ++l) {
    EXPECT_EQ(quantize_storage(storage_to_internal(l)), l);
  }
  EXPECT_EQ(storage_to_internal(0), -1.0);
  EXPECT_EQ(storage_to_internal(255), 1.0);
  EXPECT_EQ(quantize_storage(-3.0), 0);
  EXPECT_EQ(quantize_storage(3.0), 255);
}

}  // namespace
}  // namespace bsgd
