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

#include "clicktrail/harness.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "clicktrail/analysis.h"
#include "clicktrail/stream_parser.h"

namespace clicktrail::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() ||
      !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// A stamped tracker event waiting to be delivered.
struct Emission {
  std::int64_t stamp = 0;
  std::size_t seq = 0;
  std::string id;
};

class LatencySampler {
 public:
  LatencySampler(const LatencyModel& model, std::uint64_t seed)
      : model_(model), rng_(seed) {}

  double next() {
    switch (model_.kind) {
      case LatencyModel::Kind::kZero:
        return 0.0;
      case LatencyModel::Kind::kConstant:
        return model_.lo_ms;
      case LatencyModel::Kind::kUniform: {
        // 53 random mantissa bits; mt19937_64 output is fully specified,
        // so the stream is identical on every platform.
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return model_.lo_ms + (model_.hi_ms - model_.lo_ms) * u;
      }
    }
    return 0.0;
  }

 private:
  LatencyModel model_;
  std::mt19937_64 rng_;
};

}  // namespace

std::size_t InteractionPattern::click_count() const {
  return static_cast<std::size_t>(std::count_if(
      steps.begin(), steps.end(),
      [](const Step& s) { return std::holds_alternative<ClickOn>(s.action); }));
}

std::size_t InteractionPattern::navigation_count() const {
  return steps.size() - click_count();
}

std::int64_t InteractionPattern::total_wait_ms() const {
  std::int64_t total = 0;
  for (const auto& s : steps) total += s.wait_ms;
  return total;
}

void validate(const InteractionPattern& pattern) {
  if (pattern.steps.empty()) {
    throw HarnessError("interaction pattern needs at least one step");
  }
  for (std::size_t i = 0; i < pattern.steps.size(); ++i) {
    const auto& step = pattern.steps[i];
    const auto where = "step " + std::to_string(i + 1) + ": ";
    if (step.wait_ms < 0) throw HarnessError(where + "negative wait");
    if (const auto* click = std::get_if<ClickOn>(&step.action)) {
      if (!is_valid_event_id(click->element_id) ||
          !is_click(classify_event(click->element_id))) {
        throw HarnessError(where + "'" + click->element_id +
                           "' is not a usable element id");
      }
    } else {
      const auto& page = std::get<NavigateTo>(step.action).page;
      if (!is_valid_event_id(page)) {
        throw HarnessError(where + "'" + page + "' is not a usable page name");
      }
    }
  }
}

InteractionPattern parse_pattern(std::string_view text) {
  InteractionPattern pattern;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;

    const auto where = "pattern line " + std::to_string(line_no) + ": ";
    const auto sp1 = line.find_first_of(" \t");
    if (sp1 == std::string_view::npos) throw HarnessError(where + "expected 3 fields");
    auto rest = trim(line.substr(sp1));
    const auto sp2 = rest.find_first_of(" \t");
    if (sp2 == std::string_view::npos) throw HarnessError(where + "expected 3 fields");
    const auto verb = rest.substr(0, sp2);
    const auto arg = std::string(trim(rest.substr(sp2)));

    std::int64_t wait = 0;
    const auto wait_text = line.substr(0, sp1);
    auto [ptr, ec] =
        std::from_chars(wait_text.data(), wait_text.data() + wait_text.size(), wait);
    if (ec != std::errc() || ptr != wait_text.data() + wait_text.size()) {
      throw HarnessError(where + "bad wait '" + std::string(wait_text) + "'");
    }
    if (verb == "click") {
      pattern.steps.push_back({wait, ClickOn{arg}});
    } else if (verb == "goto") {
      pattern.steps.push_back({wait, NavigateTo{arg}});
    } else {
      throw HarnessError(where + "unknown action '" + std::string(verb) + "'");
    }
  }
  validate(pattern);
  return pattern;
}

std::string format_pattern(const InteractionPattern& pattern) {
  std::ostringstream out;
  for (const auto& step : pattern.steps) {
    out << step.wait_ms << ' ';
    if (const auto* click = std::get_if<ClickOn>(&step.action)) {
      out << "click " << click->element_id << '\n';
    } else {
      out << "goto " << std::get<NavigateTo>(step.action).page << '\n';
    }
  }
  return out.str();
}

InteractionPattern default_pattern() {
  InteractionPattern pattern;
  pattern.steps.push_back({0, NavigateTo{"page1.html"}});
  for (int k = 1; k <= 6; ++k) {
    pattern.steps.push_back({4500, ClickOn{"next" + std::to_string(k)}});
    pattern.steps.push_back(
        {0, NavigateTo{"page" + std::to_string(k + 1) + ".html"}});
  }
  return pattern;
}

void validate(const LatencyModel& latency) {
  if (latency.lo_ms < 0 || latency.hi_ms < latency.lo_ms ||
      !std::isfinite(latency.lo_ms) || !std::isfinite(latency.hi_ms)) {
    throw HarnessError("latency bounds must satisfy 0 <= lo <= hi");
  }
}

LatencyModel parse_latency(std::string_view text, std::uint64_t seed) {
  LatencyModel model;
  if (text == "zero") {
    model = LatencyModel::zero();
  } else if (text.starts_with("constant:")) {
    auto d = parse_double(text.substr(9));
    if (!d) throw HarnessError("bad constant latency '" + std::string(text) + "'");
    model = LatencyModel::constant(*d);
  } else if (text.starts_with("uniform:")) {
    const auto args = text.substr(8);
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) {
      throw HarnessError("uniform latency needs LO,HI");
    }
    auto lo = parse_double(args.substr(0, comma));
    auto hi = parse_double(args.substr(comma + 1));
    if (!lo || !hi) {
      throw HarnessError("bad uniform latency '" + std::string(text) + "'");
    }
    model = LatencyModel::uniform(*lo, *hi, seed);
  } else {
    throw HarnessError("latency must be zero, constant:D or uniform:LO,HI; got '" +
                       std::string(text) + "'");
  }
  validate(model);
  return model;
}

bool RunResult::order_preserved() const {
  if (recorded_stream.size() != expected_ids.size()) return false;
  for (std::size_t i = 0; i < expected_ids.size(); ++i) {
    if (recorded_stream.events[i].id != expected_ids[i]) return false;
  }
  return true;
}

namespace {

RunResult run_once(const InteractionPattern& pattern, LatencySampler& latency,
                   std::int64_t start_ms, collector::CollectorApi& collector,
                   const SimulationOptions& options) {
  RunResult result;
  std::vector<Emission> emissions;
  auto emit = [&](double true_time, const std::string& id) {
    const auto stamp = std::llround(true_time + latency.next());
    emissions.push_back({stamp, emissions.size(), id});
    result.expected_ids.push_back(id);
  };

  std::int64_t clock = start_ms;
  for (std::size_t i = 0; i < pattern.steps.size(); ++i) {
    const auto& step = pattern.steps[i];
    clock += step.wait_ms;
    if (const auto* click = std::get_if<ClickOn>(&step.action)) {
      const auto before = clock;
      clock += options.click_call_ms;
      const auto after = clock;
      const double truth = (static_cast<double>(before) + static_cast<double>(after)) / 2.0;

      // Page-changing iff the next step is a navigation.
      const bool page_changing =
          i + 1 < pattern.steps.size() &&
          std::holds_alternative<NavigateTo>(pattern.steps[i + 1].action);
      result.ground_truth_clicks.push_back({click->element_id, truth, page_changing});
      emit(truth, click->element_id);
    } else {
      const auto& page = std::get<NavigateTo>(step.action).page;
      emit(static_cast<double>(clock), std::string(kReadyPrefix) + page);
      clock += options.ready_to_load_ms;
      emit(static_cast<double>(clock), std::string(kLoadPrefix) + page);
    }
  }

  // Delivery order follows the tracker's stamps; equal stamps keep their
  // emission order.
  std::stable_sort(emissions.begin(), emissions.end(),
                   [](const Emission& a, const Emission& b) { return a.stamp < b.stamp; });

  result.session_id = collector.create_session();
  for (const auto& e : emissions) {
    collector.post_event(result.session_id, e.id, Timestamp::at(e.stamp));
  }
  result.recorded_stream =
      parse_stream(collector.finalize_session(result.session_id), {.strict = true})
          .stream;

  std::size_t k = 0;
  for (const auto& event : result.recorded_stream.events) {
    if (!is_click(classify_event(event.id))) continue;
    if (k >= result.ground_truth_clicks.size()) break;
    result.click_delays.push_back(static_cast<double>(event.timestamp.millis()) -
                                  result.ground_truth_clicks[k].time_ms);
    ++k;
  }

  std::vector<double> true_dwells;
  std::optional<double> previous;
  for (const auto& click : result.ground_truth_clicks) {
    if (!click.page_changing) continue;
    if (previous) true_dwells.push_back(click.time_ms - *previous);
    previous = click.time_ms;
  }
  const auto recorded = dwell_times(result.recorded_stream).records;
  const auto matched = std::min(recorded.size(), true_dwells.size());
  for (std::size_t d = 0; d < matched; ++d) {
    result.dwell_delays.push_back(static_cast<double>(recorded[d].dwell_ms) -
                                  true_dwells[d]);
  }
  return result;
}

}  // namespace

std::vector<RunResult> run_simulation(const InteractionPattern& pattern,
                                      const LatencyModel& latency,
                                      std::size_t runs,
                                      collector::CollectorApi& collector,
                                      const SimulationOptions& options) {
  validate(pattern);
  validate(latency);
  if (options.click_call_ms < 0 || options.ready_to_load_ms < 0) {
    throw HarnessError("simulation durations must be non-negative");
  }
  const std::int64_t run_length =
      pattern.total_wait_ms() +
      static_cast<std::int64_t>(pattern.steps.size()) *
          (options.click_call_ms + options.ready_to_load_ms) +
      static_cast<std::int64_t>(std::ceil(latency.hi_ms)) + 1;
  const auto spacing = std::max(options.run_spacing_ms, run_length);

  std::vector<RunResult> results;
  results.reserve(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    LatencySampler sampler(latency, latency.seed + i);
    results.push_back(run_once(pattern, sampler,
                               options.epoch_ms + static_cast<std::int64_t>(i) * spacing,
                               collector, options));
  }
  return results;
}

std::vector<RunResult> run_simulation(const InteractionPattern& pattern,
                                      const LatencyModel& latency,
                                      std::size_t runs,
                                      const SimulationOptions& options) {
  collector::CollectorConfig config;
  config.persistence_path.clear();
  config.limits.max_events_per_session =
      std::max<std::size_t>(config.limits.max_events_per_session,
                            pattern.steps.size() * 2);
  collector::SessionStore store(config);
  return run_simulation(pattern, latency, runs, store, options);
}

RunSummary summarize_run(const std::vector<RunResult>& results) {
  std::vector<double> clicks;
  std::vector<double> dwells;
  for (const auto& r : results) {
    clicks.insert(clicks.end(), r.click_delays.begin(), r.click_delays.end());
    dwells.insert(dwells.end(), r.dwell_delays.begin(), r.dwell_delays.end());
  }
  return {delay_stats(clicks), delay_stats(dwells)};
}

}  // namespace clicktrail::harness
