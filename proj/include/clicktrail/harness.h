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

// Deterministic click-bot simulation.
//
// A bot replays an InteractionPattern on a virtual millisecond clock. Before
// each step it waits; a click's ground-truth time is the midpoint of the
// clock readings taken just before and just after the simulated click call.
// A simulated tracker stamps each event with ground truth plus a latency
// sample and posts it to a collector in the order the stamped events would
// arrive. The recorded stream is read back from the collector and compared
// with ground truth:
//
//   click delay = recorded click ts - ground-truth click time
//   dwell delay = recorded dwell - ground-truth dwell
//
// Recorded clicks are matched to ground-truth clicks by order.

#ifndef CLICKTRAIL_HARNESS_H_
#define CLICKTRAIL_HARNESS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "clicktrail/collector.h"
#include "clicktrail/event_model.h"
#include "clicktrail/stats.h"

namespace clicktrail::harness {

class HarnessError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ClickOn {
  std::string element_id;
  friend bool operator==(const ClickOn&, const ClickOn&) = default;
};
struct NavigateTo {
  std::string page;
  friend bool operator==(const NavigateTo&, const NavigateTo&) = default;
};
using Action = std::variant<ClickOn, NavigateTo>;

struct Step {
  std::int64_t wait_ms = 0;
  Action action;
  friend bool operator==(const Step&, const Step&) = default;
};

struct InteractionPattern {
  std::vector<Step> steps;

  std::size_t click_count() const;
  std::size_t navigation_count() const;
  std::int64_t total_wait_ms() const;

  friend bool operator==(const InteractionPattern&,
                         const InteractionPattern&) = default;
};

// Throws HarnessError: empty pattern, negative wait, or an id that is not a
// valid event id (page names must also yield valid ready_/load_ ids).
void validate(const InteractionPattern& pattern);

// Lines "<wait_ms> click <id>" or "<wait_ms> goto <page>". Blank lines and
// lines starting with '#' are skipped.
InteractionPattern parse_pattern(std::string_view text);
std::string format_pattern(const InteractionPattern& pattern);

// Illustrative six-click pattern over 27 s: open page1.html, then six times
// wait 4500 ms, click "next<k>" and land on page<k+1>.html.
InteractionPattern default_pattern();

struct LatencyModel {
  enum class Kind { kZero, kConstant, kUniform };
  Kind kind = Kind::kZero;
  double lo_ms = 0.0;  // Constant uses lo_ms.
  double hi_ms = 0.0;
  std::uint64_t seed = 0;

  static LatencyModel zero() { return {}; }
  static LatencyModel constant(double d) { return {Kind::kConstant, d, d, 0}; }
  static LatencyModel uniform(double lo, double hi, std::uint64_t seed) {
    return {Kind::kUniform, lo, hi, seed};
  }
};

void validate(const LatencyModel& latency);

// "zero", "constant:D" or "uniform:LO,HI". The seed is supplied separately.
LatencyModel parse_latency(std::string_view text, std::uint64_t seed = 0);

struct SimulationOptions {
  // Duration of the bot's click call; the ground-truth click time is its
  // midpoint.
  std::int64_t click_call_ms = 0;
  // Gap between a page's ready and load events.
  std::int64_t ready_to_load_ms = 0;
  // Virtual epoch of the first run; each run starts a fixed offset later.
  std::int64_t epoch_ms = 1'630'841'029'899;
  std::int64_t run_spacing_ms = 60'000;
};

struct GroundTruthClick {
  std::string element_id;
  double time_ms = 0.0;
  bool page_changing = false;
};

struct RunResult {
  std::string session_id;
  std::vector<GroundTruthClick> ground_truth_clicks;
  EventStream recorded_stream;
  std::vector<double> click_delays;
  std::vector<double> dwell_delays;
  // Ground-truth action order as event ids (navigations expand to ready,
  // load).
  std::vector<std::string> expected_ids;

  bool lossless() const { return recorded_stream.size() == expected_ids.size(); }
  bool order_preserved() const;
};

// Seed of run `i` is latency.seed + i.
std::vector<RunResult> run_simulation(const InteractionPattern& pattern,
                                      const LatencyModel& latency,
                                      std::size_t runs,
                                      collector::CollectorApi& collector,
                                      const SimulationOptions& options = {});

// Same, against a private in-memory collector.
std::vector<RunResult> run_simulation(const InteractionPattern& pattern,
                                      const LatencyModel& latency,
                                      std::size_t runs,
                                      const SimulationOptions& options = {});

struct RunSummary {
  DelayStats click;
  DelayStats dwell;
};

// Pools every run's delays. Throws StatsError when no click or no dwell
// delay was produced.
RunSummary summarize_run(const std::vector<RunResult>& results);

}  // namespace clicktrail::harness

#endif  // CLICKTRAIL_HARNESS_H_
