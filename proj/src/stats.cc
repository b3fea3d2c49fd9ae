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

#include <cmath>

namespace clicktrail {

DelayStats delay_stats(std::span<const double> values) {
  if (values.empty()) {
    throw StatsError("delay_stats needs at least one value");
  }
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (!std::isfinite(v)) throw StatsError("delay_stats: non-finite value");
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }

  DelayStats stats;
  stats.n = n;
  stats.mean = mean;
  stats.sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  const double half = kCi95Z * stats.sd / std::sqrt(static_cast<double>(n));
  stats.ci_low = mean - half;
  stats.ci_high = mean + half;

  if (stats.sd > 0.0) {
    const double limit = kOutlierSds * stats.sd;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::abs(values[i] - mean) > limit) {
        stats.outliers.push_back({i, values[i]});
      }
    }
  }
  return stats;
}

}  // namespace clicktrail
