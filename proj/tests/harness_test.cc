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

#include <gtest/gtest.h>

#include "clicktrail/analysis.h"
#include "clicktrail/collector_http.h"
#include "test_support.h"

namespace clicktrail::harness {
namespace {

TEST(Pattern, DefaultIsSixClicksOverTwentySevenSeconds) {
  const auto p = default_pattern();
  EXPECT_EQ(p.click_count(), 6u);
  EXPECT_EQ(p.navigation_count(), 7u);
  EXPECT_EQ(p.total_wait_ms(), 27000);
  EXPECT_EQ(p.steps.front(), (Step{0, NavigateTo{"page1.html"}}));
  EXPECT_EQ(p.steps[1], (Step{4500, ClickOn{"next1"}}));
}

TEST(Pattern, FormatParseRoundTrip) {
  const auto p = default_pattern();
  EXPECT_EQ(parse_pattern(format_pattern(p)), p);
}

TEST(Pattern, ParsesCommentsAndRejectsJunk) {
  const auto p = parse_pattern("# warmup\n0 goto a.html\n\n  250   click  My Button\n");
  ASSERT_EQ(p.steps.size(), 2u);
  EXPECT_EQ(p.steps[1], (Step{250, ClickOn{"My Button"}}));
  EXPECT_THROW(parse_pattern(""), HarnessError);
  EXPECT_THROW(parse_pattern("10 jump x\n"), HarnessError);
  EXPECT_THROW(parse_pattern("-5 click x\n"), HarnessError);
  EXPECT_THROW(parse_pattern("x click y\n"), HarnessError);
  EXPECT_THROW(parse_pattern("10 click\n"), HarnessError);
  EXPECT_THROW(parse_pattern("10 click a;b\n"), HarnessError);
}

TEST(Latency, Parse) {
  EXPECT_EQ(parse_latency("zero").kind, LatencyModel::Kind::kZero);
  const auto c = parse_latency("constant:5");
  EXPECT_EQ(c.kind, LatencyModel::Kind::kConstant);
  EXPECT_EQ(c.lo_ms, 5.0);
  const auto u = parse_latency("uniform:0,10", 9);
  EXPECT_EQ(u.kind, LatencyModel::Kind::kUniform);
  EXPECT_EQ(u.hi_ms, 10.0);
  EXPECT_EQ(u.seed, 9u);
  for (const char* bad : {"", "fast", "constant:", "constant:-1", "uniform:5",
                          "uniform:10,0", "uniform:a,b"}) {
    EXPECT_THROW(parse_latency(bad), HarnessError) << bad;
  }
}

TEST(Simulation, ZeroLatencyIsExact) {
  const auto results = run_simulation(default_pattern(), LatencyModel::zero(), 50);
  ASSERT_EQ(results.size(), 50u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.lossless());
    EXPECT_TRUE(r.order_preserved());
    ASSERT_EQ(r.click_delays.size(), 6u);
    ASSERT_EQ(r.dwell_delays.size(), 5u);
    for (double d : r.click_delays) EXPECT_EQ(d, 0.0);
    for (double d : r.dwell_delays) EXPECT_EQ(d, 0.0);
    EXPECT_EQ(plausibility_check(r.recorded_stream).classification,
              Plausibility::kValid);
  }
  const auto s = summarize_run(results);
  EXPECT_EQ(s.click.mean, 0.0);
  EXPECT_EQ(s.click.sd, 0.0);
  EXPECT_EQ(s.dwell.mean, 0.0);
}

TEST(Simulation, ConstantLatencyCancelsInDwell) {
  const auto results = run_simulation(default_pattern(), LatencyModel::constant(5), 20);
  for (const auto& r : results) {
    EXPECT_TRUE(r.order_preserved());
    for (double d : r.click_delays) EXPECT_EQ(d, 5.0);
    for (double d : r.dwell_delays) EXPECT_EQ(d, 0.0);
  }
  const auto s = summarize_run(results);
  EXPECT_EQ(s.click.n, 120u);
  EXPECT_EQ(s.click.mean, 5.0);
  EXPECT_EQ(s.click.sd, 0.0);
  EXPECT_EQ(s.dwell.mean, 0.0);
}

TEST(Simulation, ClickCallMidpoint) {
  SimulationOptions opt;
  opt.click_call_ms = 4;
  const auto r = run_simulation(default_pattern(), LatencyModel::zero(), 1, opt).front();
  EXPECT_EQ(r.ground_truth_clicks[0].time_ms,
            static_cast<double>(opt.epoch_ms + 4500 + 2));
  for (double d : r.click_delays) EXPECT_EQ(d, 0.0);
  for (double d : r.dwell_delays) EXPECT_EQ(d, 0.0);
}

TEST(Simulation, UniformIsDeterministicAndBounded) {
  const auto latency = LatencyModel::uniform(0, 10, 1234);
  const auto a = run_simulation(default_pattern(), latency, 30);
  const auto b = run_simulation(default_pattern(), latency, 30);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].recorded_stream, b[i].recorded_stream);
    EXPECT_EQ(a[i].click_delays, b[i].click_delays);
    EXPECT_EQ(a[i].dwell_delays, b[i].dwell_delays);
    EXPECT_TRUE(a[i].lossless());
    for (double d : a[i].click_delays) {
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 10.0);
    }
  }
  const auto other = run_simulation(default_pattern(), LatencyModel::uniform(0, 10, 99), 30);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    differs |= a[i].click_delays != other[i].click_delays;
  }
  EXPECT_TRUE(differs);
}

// Analytic mean of U(0,10) is 5 and sd 10/sqrt(12); at n = 6000 the 95%
// half-width is about 0.073, well inside the 0.3 band.
TEST(Simulation, UniformMeanNearFive) {
  const auto results =
      run_simulation(default_pattern(), LatencyModel::uniform(0, 10, 42), 1000);
  const auto s = summarize_run(results);
  EXPECT_EQ(s.click.n, 6000u);
  EXPECT_NEAR(s.click.mean, 5.0, 0.3);
  EXPECT_NEAR(s.click.sd, 10.0 / std::sqrt(12.0), 0.2);
}

TEST(Simulation, ThroughHttpCollector) {
  collector::CollectorConfig config;
  config.bind_address = "127.0.0.1:0";
  collector::SessionStore store(config);
  collector::CollectorServer server(store, config);
  ASSERT_TRUE(server.bind());
  server.start();
  collector::CollectorClient client("http://127.0.0.1:" + std::to_string(server.port()));
  const auto results =
      run_simulation(default_pattern(), LatencyModel::constant(5), 5, client);
  server.stop();
  ASSERT_EQ(results.size(), 5u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.order_preserved());
    EXPECT_EQ(store.events(r.session_id), r.recorded_stream);
    EXPECT_TRUE(store.info(r.session_id).finalized);
  }
  const auto s = summarize_run(results);
  EXPECT_EQ(s.click.mean, 5.0);
  EXPECT_EQ(s.dwell.mean, 0.0);
}

TEST(Simulation, Validation) {
  EXPECT_THROW(run_simulation(InteractionPattern{}, LatencyModel::zero(), 1), HarnessError);
  SimulationOptions opt;
  opt.click_call_ms = -1;
  EXPECT_THROW(run_simulation(default_pattern(), LatencyModel::zero(), 1, opt),
               HarnessError);
  // A pattern without page changes yields no dwell delays to summarize.
  const auto r = run_simulation(parse_pattern("0 goto a.html\n100 click x\n"),
                                LatencyModel::zero(), 1);
  EXPECT_THROW(summarize_run(r), StatsError);
}

}  // namespace
}  // namespace clicktrail::harness
