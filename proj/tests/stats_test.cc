// Copyright 2026 The Clicktrail Authors
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

#include "clicktrail/stats.h"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.h"

namespace clicktrail {
namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

TEST(DelayStats, EmptyIsAnError) {
  EXPECT_THROW(delay_stats(std::vector<double>{}), StatsError);
}

TEST(DelayStats, NonFiniteIsAnError) {
  EXPECT_THROW(delay_stats(std::vector<double>{1.0, NAN}), StatsError);
  EXPECT_THROW(delay_stats(std::vector<double>{INFINITY}), StatsError);
}

TEST(DelayStats, AllZeros) {
  const std::vector<double> v(1000, 0.0);
  const auto s = delay_stats(v);
  EXPECT_EQ(s.n, 1000u);
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.sd, 0.0);
  EXPECT_EQ(s.ci_low, 0.0);
  EXPECT_EQ(s.ci_high, 0.0);
  EXPECT_TRUE(s.outliers.empty());
}

TEST(DelayStats, SingleValue) {
  const auto s = delay_stats(std::vector<double>{4.5});
  EXPECT_EQ(s.mean, 4.5);
  EXPECT_EQ(s.sd, 0.0);
  EXPECT_EQ(s.ci_low, 4.5);
  EXPECT_EQ(s.ci_high, 4.5);
}

TEST(DelayStats, ConfidenceIntervalReproducesPublishedRow) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(1000);
  for (auto& x : v) x = dist(rng);
  testing::standardize(v, 7.88, 3.63);
  const auto s = delay_stats(v);
  EXPECT_NEAR(s.mean, 7.88, 1e-9);
  EXPECT_NEAR(s.sd, 3.63, 1e-9);
  EXPECT_NEAR(s.ci_half_width(), 1.96 * 3.63 / std::sqrt(1000.0), 1e-9);
  EXPECT_NEAR(round2(s.ci_low), 7.66, 1e-9);
  EXPECT_NEAR(round2(s.ci_high), 8.10, 1e-9);
}

// Hand computation: mean 20, sample sd = sqrt(10000 / 5) = 44.72,
// |100 - 20| = 80 < 4 * 44.72, so nothing is flagged.
TEST(DelayStats, OutlierRuleNotTriggered) {
  const auto s = delay_stats(std::vector<double>{0, 0, 0, 0, 100});
  EXPECT_DOUBLE_EQ(s.mean, 20.0);
  EXPECT_NEAR(s.sd, 44.72135955, 1e-6);
  EXPECT_TRUE(s.outliers.empty());
}

TEST(DelayStats, OutlierFlaggedButKept) {
  std::vector<double> v(100, 5.0);
  v[3] = 4.0;
  v[50] = 6.0;
  v[77] = 500.0;
  const auto s = delay_stats(v);
  ASSERT_EQ(s.outliers.size(), 1u);
  EXPECT_EQ(s.outliers[0].index, 77u);
  EXPECT_EQ(s.outliers[0].value, 500.0);
  EXPECT_EQ(s.n, 100u);
  EXPECT_GT(s.mean, 9.0);
}

TEST(DelayStats, MatchesTwoPassOracle) {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<std::size_t> len(1, 500);
  std::uniform_real_distribution<double> scale(0.01, 1e4);
  std::uniform_real_distribution<double> offset(-1e5, 1e5);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> v(len(rng));
    const double sc = scale(rng);
    const double off = offset(rng);
    std::normal_distribution<double> dist(off, sc);
    for (auto& x : v) x = dist(rng);
    const auto s = delay_stats(v);
    const auto o = testing::oracle_two_pass(v);
    const double tol = 1e-9 * std::max(1.0, std::abs(o.mean) + o.sd);
    ASSERT_NEAR(s.mean, o.mean, tol);
    ASSERT_NEAR(s.sd, o.sd, tol);
    const double half = v.size() > 1 ? 1.96 * o.sd / std::sqrt(double(v.size())) : 0.0;
    ASSERT_NEAR(s.ci_low, o.mean - half, tol);
    ASSERT_NEAR(s.ci_high, o.mean + half, tol);
  }
}

TEST(DelayStats, ShiftAndScaleProperties) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> v(2 + i);
    for (auto& x : v) x = dist(rng);
    const auto base = delay_stats(v);
    std::vector<double> shifted = v;
    for (auto& x : shifted) x += 123.5;
    const auto sh = delay_stats(shifted);
    EXPECT_NEAR(sh.mean, base.mean + 123.5, 1e-9);
    EXPECT_NEAR(sh.sd, base.sd, 1e-9);
    std::vector<double> scaled = v;
    for (auto& x : scaled) x *= -3.0;
    const auto sc = delay_stats(scaled);
    EXPECT_NEAR(sc.mean, -3.0 * base.mean, 1e-9);
    EXPECT_NEAR(sc.sd, 3.0 * base.sd, 1e-9);
    EXPECT_LE(base.ci_low, base.mean);
    EXPECT_GE(base.ci_high, base.mean);
  }
}

}  // namespace
}  // namespace clicktrail
