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

#include "clicktrail/analysis.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace clicktrail {

std::string_view to_string(AnalysisErrorCode code) {
  switch (code) {
    case AnalysisErrorCode::kNotFound:
      return "not_found";
    case AnalysisErrorCode::kInvalidTimestamp:
      return "invalid_timestamp";
    case AnalysisErrorCode::kBadArgument:
      return "bad_argument";
  }
  return "unknown";
}

std::size_t count_event(const EventStream& stream, std::string_view event_id) {
  return static_cast<std::size_t>(
      std::count_if(stream.events.begin(), stream.events.end(),
                    [&](const Event& e) { return e.id == event_id; }));
}

std::size_t count_event_pattern(const EventStream& stream,
                                std::span<const std::string> pattern,
                                PatternMatch mode) {
  if (pattern.empty()) {
    throw AnalysisError(AnalysisErrorCode::kBadArgument,
                        "event pattern must not be empty");
  }
  const auto& events = stream.events;
  std::size_t count = 0;

  if (mode == PatternMatch::kGapsAllowed) {
    std::size_t next = 0;
    for (const auto& e : events) {
      if (e.id == pattern[next] && ++next == pattern.size()) {
        ++count;
        next = 0;
      }
    }
    return count;
  }

  // Matches can only start where the first id matches, so scan for that and
  // verify the rest in place.
  if (events.size() < pattern.size()) return 0;
  const std::size_t last_start = events.size() - pattern.size();
  for (std::size_t start = 0; start <= last_start; ++start) {
    if (events[start].id != pattern[0]) continue;
    std::size_t k = 1;
    while (k < pattern.size() && events[start + k].id == pattern[k]) ++k;
    if (k == pattern.size()) ++count;
  }
  return count;
}

std::int64_t nth_timestamp(const EventStream& stream,
                           std::string_view event_id, std::size_t occurrence) {
  if (occurrence == 0) {
    throw AnalysisError(AnalysisErrorCode::kBadArgument,
                        "occurrence is 1-indexed; 0 is not allowed");
  }
  std::size_t seen = 0;
  for (const auto& e : stream.events) {
    if (e.id != event_id || ++seen < occurrence) continue;
    if (!e.timestamp.valid()) {
      throw AnalysisError(AnalysisErrorCode::kInvalidTimestamp,
                          "occurrence " + std::to_string(occurrence) + " of '" +
                              std::string(event_id) +
                              "' has an invalid timestamp");
    }
    return e.timestamp.millis();
  }
  throw AnalysisError(AnalysisErrorCode::kNotFound,
                      "'" + std::string(event_id) + "' occurs " +
                          std::to_string(seen) + " time(s), occurrence " +
                          std::to_string(occurrence) + " requested");
}

std::int64_t interval(const EventStream& stream, std::string_view id_a,
                      std::size_t occ_a, std::string_view id_b,
                      std::size_t occ_b) {
  const auto a = nth_timestamp(stream, id_a, occ_a);
  const auto b = nth_timestamp(stream, id_b, occ_b);
  return a > b ? a - b : b - a;
}

std::vector<std::size_t> page_changing_clicks(const EventStream& stream) {
  std::vector<std::size_t> out;
  std::optional<std::size_t> pending_click;
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const auto& e = stream.events[i];
    if (!e.timestamp.valid()) continue;
    const auto kind = classify_event(e.id);
    if (is_click(kind)) {
      pending_click = i;
    } else if (std::holds_alternative<PageReady>(kind) && pending_click) {
      out.push_back(*pending_click);
      pending_click.reset();
    }
  }
  return out;
}

DwellResult dwell_times(const EventStream& stream) {
  DwellResult result;
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    if (!stream.events[i].timestamp.valid()) {
      result.findings.push_back({std::string(kRuleInvalidTimestamp), i,
                                 "event '" + stream.events[i].id +
                                     "' skipped: invalid timestamp"});
    }
  }
  const auto clicks = page_changing_clicks(stream);
  for (std::size_t k = 1; k < clicks.size(); ++k) {
    const auto from = clicks[k - 1];
    const auto to = clicks[k];
    const auto dwell = stream.events[to].timestamp.millis() -
                       stream.events[from].timestamp.millis();
    if (dwell < 0) {
      result.findings.push_back(
          {std::string(kRuleNonMonotonic), to,
           "page-changing click precedes its predecessor by " +
               std::to_string(-dwell) + " ms"});
      continue;
    }
    result.records.push_back({from, to, dwell});
  }
  return result;
}

std::string_view to_string(Plausibility value) {
  switch (value) {
    case Plausibility::kNoEvents:
      return "NoEvents";
    case Plausibility::kInvalidTimestamps:
      return "InvalidTimestamps";
    case Plausibility::kImplausibleOrder:
      return "ImplausibleOrder";
    case Plausibility::kValid:
      return "Valid";
  }
  return "Valid";
}

std::optional<Plausibility> parse_plausibility(std::string_view text) {
  for (auto p : {Plausibility::kNoEvents, Plausibility::kInvalidTimestamps,
                 Plausibility::kImplausibleOrder, Plausibility::kValid}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

PlausibilityReport plausibility_check(const EventStream& stream,
                                      const OrderRules& rules) {
  PlausibilityReport report;
  if (stream.empty()) {
    report.classification = Plausibility::kNoEvents;
    report.findings.push_back(
        {std::string(kRuleNoEvents), 0, "no events recorded"});
    return report;
  }

  bool any_invalid = false;
  bool any_order = false;
  std::optional<std::int64_t> last_ts;
  std::set<std::string, std::less<>> ready_pages;
  bool seen_ready = false;

  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const auto& e = stream.events[i];
    if (!e.timestamp.valid()) {
      any_invalid = true;
      report.findings.push_back({std::string(kRuleInvalidTimestamp), i,
                                 "event '" + e.id + "' has timestamp '" +
                                     "undefined'"});
    } else {
      const auto ts = e.timestamp.millis();
      if (rules.monotonic_timestamps && last_ts && ts < *last_ts) {
        any_order = true;
        report.findings.push_back(
            {std::string(kRuleNonMonotonic), i,
             "timestamp " + std::to_string(ts) + " is earlier than preceding " +
                 std::to_string(*last_ts)});
      }
      last_ts = ts;
    }

    const auto kind = classify_event(e.id);
    if (const auto* ready = std::get_if<PageReady>(&kind)) {
      ready_pages.insert(ready->page);
      seen_ready = true;
    } else if (const auto* load = std::get_if<PageLoad>(&kind)) {
      if (rules.load_requires_ready && !ready_pages.contains(load->page)) {
        any_order = true;
        report.findings.push_back({std::string(kRuleLoadWithoutReady), i,
                                   "load of '" + load->page +
                                       "' without a preceding ready event"});
      }
    } else if (rules.click_requires_ready && !seen_ready) {
      any_order = true;
      report.findings.push_back({std::string(kRuleClickBeforeReady), i,
                                 "click '" + e.id +
                                     "' before the first ready event"});
    }
  }

  if (any_invalid) {
    report.classification = Plausibility::kInvalidTimestamps;
  } else if (any_order) {
    report.classification = Plausibility::kImplausibleOrder;
  } else {
    report.classification = Plausibility::kValid;
  }
  return report;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw AnalysisError(AnalysisErrorCode::kBadArgument,
                        "percentile of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Quartiles quartiles(const std::vector<double>& values) {
  return {percentile(values, 0.25), percentile(values, 0.5),
          percentile(values, 0.75)};
}

std::size_t CorpusSummary::count_of(Plausibility p) const {
  switch (p) {
    case Plausibility::kNoEvents:
      return no_events;
    case Plausibility::kInvalidTimestamps:
      return invalid_timestamps;
    case Plausibility::kImplausibleOrder:
      return implausible_order;
    case Plausibility::kValid:
      return valid;
  }
  return 0;
}

namespace {

std::vector<Share> to_shares(const std::map<std::string, std::size_t>& counts,
                             std::size_t total) {
  std::vector<Share> shares;
  for (const auto& [category, count] : counts) {
    shares.push_back({category, count,
                      100.0 * static_cast<double>(count) /
                          static_cast<double>(total)});
  }
  std::stable_sort(shares.begin(), shares.end(),
                   [](const Share& a, const Share& b) { return a.count > b.count; });
  return shares;
}

std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

CorpusSummary corpus_summary(std::span<const ParticipantRecord> records,
                             const SummaryOptions& options) {
  CorpusSummary summary;
  summary.record_count = records.size();
  std::map<std::string, std::size_t> browsers;
  std::map<std::string, std::size_t> systems;
  std::vector<double> widths;
  std::vector<double> heights;
  std::vector<double> durations;

  for (const auto& record : records) {
    ++browsers[record.client.browser_type];
    ++systems[record.client.operating_system];
    if (const auto& res = record.client.screen_resolution) {
      widths.push_back(res->width);
      heights.push_back(res->height);
    } else {
      ++summary.resolution_unknown;
    }
    switch (plausibility_check(record.event_stream, options.order_rules)
                .classification) {
      case Plausibility::kNoEvents:
        ++summary.no_events;
        break;
      case Plausibility::kInvalidTimestamps:
        ++summary.invalid_timestamps;
        break;
      case Plausibility::kImplausibleOrder:
        ++summary.implausible_order;
        break;
      case Plausibility::kValid:
        ++summary.valid;
        break;
    }
    if (auto it = record.survey_fields.find(options.duration_field);
        it != record.survey_fields.end()) {
      if (auto d = parse_number(it->second)) durations.push_back(*d);
    }
  }

  if (!records.empty()) {
    summary.browser_shares = to_shares(browsers, records.size());
    summary.os_shares = to_shares(systems, records.size());
  }
  summary.resolution_known = widths.size();
  if (!widths.empty()) {
    summary.width = quartiles(widths);
    summary.height = quartiles(heights);
  }
  if (!durations.empty()) summary.median_duration = percentile(durations, 0.5);
  return summary;
}

}  // namespace clicktrail
