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

#ifndef CLICKTRAIL_STATS_H_
#define CLICKTRAIL_STATS_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace clicktrail {

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kCi95Z = 1.96;
inline constexpr double kOutlierSds = 4.0;

struct Outlier {
  std::size_t index = 0;
  double value = 0.0;
};

struct DelayStats {
  std::size_t n = 0;
  double mean = 0.0;
  // Sample standard deviation (n - 1 denominator); 0 when n == 1.
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Values further than 4 sd from the mean. Reported only, never removed.
  std::vector<Outlier> outliers;

  double ci_half_width() const { return (ci_high - ci_low) / 2.0; }
};

// Mean and variance come from a single Welford pass; the 95% interval is the
// normal approximation mean +/- 1.96 sd / sqrt(n).
// Throws StatsError on empty input or non-finite values.
DelayStats delay_stats(std::span<const double> values);

}  // namespace clicktrail

#endif  // CLICKTRAIL_STATS_H_
