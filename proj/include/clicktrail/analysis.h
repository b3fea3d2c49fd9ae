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

#ifndef CLICKTRAIL_ANALYSIS_H_
#define CLICKTRAIL_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clicktrail/event_model.h"

namespace clicktrail {

enum class AnalysisErrorCode { kNotFound, kInvalidTimestamp, kBadArgument };

std::string_view to_string(AnalysisErrorCode code);

class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(AnalysisErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  AnalysisErrorCode code() const { return code_; }

 private:
  AnalysisErrorCode code_;
};

// Number of events whose id equals `event_id` exactly.
std::size_t count_event(const EventStream& stream, std::string_view event_id);

enum class PatternMatch {
  // Pattern must occur as consecutive events; overlapping runs all count.
  kContiguous,
  // Pattern may be interleaved with other events. Occurrences are found by
  // greedy left-to-right matching and never share an event.
  kGapsAllowed,
};

// Throws AnalysisError(kBadArgument) on an empty pattern.
std::size_t count_event_pattern(const EventStream& stream,
                                std::span<const std::string> pattern,
                                PatternMatch mode = PatternMatch::kContiguous);

// Timestamp of the `occurrence`-th (1-indexed) event with id `event_id`.
// Throws AnalysisError with kNotFound when there are fewer matches,
// kInvalidTimestamp when the match carries the Invalid marker, and
// kBadArgument when occurrence is 0.
std::int64_t nth_timestamp(const EventStream& stream,
                           std::string_view event_id, std::size_t occurrence);

// |nth_timestamp(b) - nth_timestamp(a)|.
std::int64_t interval(const EventStream& stream, std::string_view id_a,
                      std::size_t occ_a, std::string_view id_b,
                      std::size_t occ_b);

struct Finding {
  std::string rule;
  std::size_t event_index = 0;
  std::string description;

  friend bool operator==(const Finding&, const Finding&) = default;
};

struct DwellRecord {
  std::size_t from_event_index = 0;
  std::size_t to_event_index = 0;
  std::int64_t dwell_ms = 0;

  friend bool operator==(const DwellRecord&, const DwellRecord&) = default;
};

struct DwellResult {
  std::vector<DwellRecord> records;
  std::vector<Finding> findings;
};

// A click is page-changing when a PageReady event follows it before any
// other click. Dwell records connect consecutive page-changing clicks.
// Events with an Invalid timestamp are ignored (and reported); a
// negative gap between page-changing clicks is reported and produces no
// record.
DwellResult dwell_times(const EventStream& stream);

// Indices of page-changing clicks, in stream order.
std::vector<std::size_t> page_changing_clicks(const EventStream& stream);

enum class Plausibility { kNoEvents, kInvalidTimestamps, kImplausibleOrder, kValid };

std::string_view to_string(Plausibility value);
std::optional<Plausibility> parse_plausibility(std::string_view text);

inline constexpr std::string_view kRuleNoEvents = "no_events";
inline constexpr std::string_view kRuleInvalidTimestamp = "invalid_timestamp";
inline constexpr std::string_view kRuleNonMonotonic = "non_monotonic_timestamp";
inline constexpr std::string_view kRuleLoadWithoutReady = "load_without_ready";
inline constexpr std::string_view kRuleClickBeforeReady = "click_before_ready";

// Order rules can be switched off individually.
struct OrderRules {
  bool monotonic_timestamps = true;
  bool load_requires_ready = true;
  bool click_requires_ready = true;
};

struct PlausibilityReport {
  Plausibility classification = Plausibility::kValid;
  std::vector<Finding> findings;
};

PlausibilityReport plausibility_check(const EventStream& stream,
                                      const OrderRules& rules = {});

struct Share {
  std::string category;
  std::size_t count = 0;
  double percent = 0.0;
};

struct Quartiles {
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
};

// Linear interpolation between closest ranks (the R-7 / numpy default).
// Precondition: `values` non-empty.
double percentile(std::vector<double> values, double q);
Quartiles quartiles(const std::vector<double>& values);

struct SummaryOptions {
  // Survey field holding completion time; the median is reported when at
  // least one record has a numeric value there.
  std::string duration_field = "Duration (in seconds)";
  OrderRules order_rules;
};

struct CorpusSummary {
  std::size_t record_count = 0;
  // Sorted by descending count, then category name.
  std::vector<Share> browser_shares;
  std::vector<Share> os_shares;
  std::size_t resolution_known = 0;
  std::size_t resolution_unknown = 0;
  std::optional<Quartiles> width;
  std::optional<Quartiles> height;
  std::size_t no_events = 0;
  std::size_t invalid_timestamps = 0;
  std::size_t implausible_order = 0;
  std::size_t valid = 0;
  std::optional<double> median_duration;

  std::size_t count_of(Plausibility p) const;
};

CorpusSummary corpus_summary(std::span<const ParticipantRecord> records,
                             const SummaryOptions& options = {});

}  // namespace clicktrail

#endif  // CLICKTRAIL_ANALYSIS_H_
