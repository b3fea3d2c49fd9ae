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

#include "clicktrail/cli.h"

#include <signal.h>

#include <charconv>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "clicktrail/analysis.h"
#include "clicktrail/collector.h"
#include "clicktrail/collector_http.h"
#include "clicktrail/csv.h"
#include "clicktrail/harness.h"
#include "clicktrail/ingest.h"
#include "clicktrail/stream_parser.h"

namespace clicktrail::cli {

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  while (true) {
    const auto pos = s.find(sep);
    out.emplace_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

std::size_t parse_occurrence(std::string_view s, std::string_view expr) {
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || n == 0) {
    throw UsageError("occurrence must be a positive integer in '" +
                     std::string(expr) + "'");
  }
  return n;
}

void require_ids(const std::vector<std::string>& ids, std::string_view expr) {
  for (const auto& id : ids) {
    if (!is_valid_event_id(id)) {
      throw UsageError("invalid event id '" + id + "' in '" +
                       std::string(expr) + "'");
    }
  }
}

}  // namespace

Expression parse_expression(std::string_view text) {
  Expression expr;
  expr.text = std::string(text);
  const auto space = text.find(' ');
  const auto name = text.substr(0, space);
  auto arg = space == std::string_view::npos ? std::string_view{}
                                             : text.substr(space + 1);
  while (!arg.empty() && arg.front() == ' ') arg.remove_prefix(1);

  if (name == "dwell" && arg.empty()) {
    expr.kind = Expression::Kind::kDwell;
  } else if (name == "countEvent" && !arg.empty()) {
    expr.kind = Expression::Kind::kCountEvent;
    expr.ids = {std::string(arg)};
  } else if ((name == "countPattern" || name == "countEventPattern") &&
             !arg.empty()) {
    expr.kind = Expression::Kind::kCountPattern;
    expr.ids = split(arg, ',');
  } else if (name == "timestamp" && !arg.empty()) {
    expr.kind = Expression::Kind::kTimestamp;
    const auto last = arg.rfind(' ');
    if (last == std::string_view::npos) {
      throw UsageError("timestamp needs ID N: '" + expr.text + "'");
    }
    expr.ids = {std::string(arg.substr(0, last))};
    expr.occurrences = {parse_occurrence(arg.substr(last + 1), text)};
  } else if (name == "interval" && !arg.empty()) {
    expr.kind = Expression::Kind::kInterval;
    const auto parts = split(arg, ',');
    if (parts.size() != 4) {
      throw UsageError("interval needs IDa,Na,IDb,Nb: '" + expr.text + "'");
    }
    expr.ids = {parts[0], parts[2]};
    expr.occurrences = {parse_occurrence(parts[1], text),
                        parse_occurrence(parts[3], text)};
  } else {
    throw UsageError("unknown expression '" + expr.text + "'");
  }
  require_ids(expr.ids, text);
  return expr;
}

std::string evaluate(const Expression& expr, const EventStream& stream,
                     bool gaps_allowed) {
  try {
    switch (expr.kind) {
      case Expression::Kind::kCountEvent:
        return std::to_string(count_event(stream, expr.ids[0]));
      case Expression::Kind::kCountPattern:
        return std::to_string(count_event_pattern(
            stream, expr.ids,
            gaps_allowed ? PatternMatch::kGapsAllowed : PatternMatch::kContiguous));
      case Expression::Kind::kTimestamp:
        return format_ms(nth_timestamp(stream, expr.ids[0], expr.occurrences[0]));
      case Expression::Kind::kInterval:
        return format_ms(interval(stream, expr.ids[0], expr.occurrences[0],
                                  expr.ids[1], expr.occurrences[1]));
      case Expression::Kind::kDwell: {
        std::string out;
        for (const auto& d : dwell_times(stream).records) {
          if (!out.empty()) out.push_back(' ');
          out += format_ms(d.dwell_ms);
        }
        return out;
      }
    }
  } catch (const AnalysisError&) {
  }
  return "NA";
}

namespace {

struct MappingFlags {
  std::string input;
  std::string output;
  std::string id_col;
  std::string stream_col;
  std::string mapping_file;
  std::vector<std::string> meta;
  std::string delimiter;
  bool strict = false;
  bool porcelain = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--input", input, "Survey export (csv)")->required();
    cmd.add_option("--output", output, "Write results to this csv file");
    cmd.add_option("--id-col", id_col, "Participant id column [ResponseId]");
    cmd.add_option("--stream-col", stream_col, "Event stream column [eventStream]");
    cmd.add_option("--mapping", mapping_file, "key = value column mapping file");
    cmd.add_option("--meta", meta,
                   "Client metadata column, FIELD=COLUMN (repeatable)");
    cmd.add_option("--delimiter", delimiter, "Field delimiter, or 'tab'");
    cmd.add_flag("--strict", strict, "Reject malformed event streams");
    cmd.add_flag("--porcelain", porcelain, "Machine-readable stdout");
  }

  ColumnMapping mapping() const {
    ColumnMapping m;
    if (!mapping_file.empty()) {
      m = parse_mapping_config(csv::read_file(mapping_file), m);
    }
    if (!id_col.empty()) m.participant_id_column = id_col;
    if (!stream_col.empty()) m.event_stream_column = stream_col;
    for (const auto& kv : meta) {
      const auto eq = kv.find('=');
      const auto field = parse_metadata_field(kv.substr(0, eq));
      if (eq == std::string::npos || !field) {
        throw UsageError("--meta expects FIELD=COLUMN with FIELD one of "
                         "browser_type, browser_version, operating_system, "
                         "screen_resolution, java_support, user_agent; got '" +
                         kv + "'");
      }
      m.metadata_columns[*field] = kv.substr(eq + 1);
    }
    if (delimiter == "tab") {
      m.delimiter = '\t';
    } else if (delimiter.size() == 1) {
      m.delimiter = delimiter[0];
    } else if (!delimiter.empty()) {
      throw UsageError("--delimiter must be a single character or 'tab'");
    }
    if (strict) m.strict = true;
    validate(m);
    return m;
  }
};

// Aligned columns for humans, csv with --porcelain.
void print_table(std::ostream& out, const csv::Table& table, bool porcelain) {
  if (porcelain) {
    out << csv::format_table(table);
    return;
  }
  std::vector<std::size_t> widths(table.header.size(), 0);
  auto measure = [&](const csv::Row& row) {
    for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  };
  measure(table.header);
  for (const auto& row : table.rows) measure(row);
  auto emit = [&](const csv::Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i];
      if (i + 1 < row.size()) out << std::string(widths[i] - row[i].size() + 2, ' ');
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
}

void maybe_write(const std::string& path, const csv::Table& table) {
  if (!path.empty()) write_results(path, table);
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  return csv::read_file(path);
}

int cmd_parse(const std::string& input, bool strict, bool porcelain,
              std::ostream& out) {
  const auto report = parse_stream(read_input(input), {.strict = strict});
  csv::Table table;
  table.header = {"index", "timestamp", "event_id", "kind"};
  for (std::size_t i = 0; i < report.stream.size(); ++i) {
    const auto& e = report.stream.events[i];
    const auto kind = classify_event(e.id);
    const char* kind_name = std::holds_alternative<PageReady>(kind)   ? "ready"
                            : std::holds_alternative<PageLoad>(kind)  ? "load"
                            : std::holds_alternative<UndefinedClick>(kind)
                                ? "undefined_click"
                                : "click";
    table.rows.push_back({std::to_string(i),
                          e.timestamp.valid() ? format_ms(e.timestamp.millis())
                                              : std::string(kInvalidTimestampLiteral),
                          e.id, kind_name});
  }
  print_table(out, table, porcelain);
  if (!porcelain) {
    out << "events: " << report.stream.size()
        << "  invalid timestamps: " << report.invalid_timestamp_count << '\n';
    if (report.trailing_garbage) {
      out << "trailing garbage: '" << *report.trailing_garbage << "'\n";
    }
  }
  return kExitOk;
}

int cmd_analyze(const MappingFlags& flags, const std::vector<std::string>& exprs,
                bool gaps_allowed, std::ostream& out) {
  std::vector<Expression> parsed;
  for (const auto& e : exprs) parsed.push_back(parse_expression(e));
  const auto mapping = flags.mapping();
  const auto records = load_survey_export(flags.input, mapping);

  csv::Table table;
  table.header = {"participant_id"};
  for (const auto& e : parsed) table.header.push_back(e.text);
  for (const auto& r : records) {
    csv::Row row = {r.participant_id};
    for (const auto& e : parsed) {
      row.push_back(evaluate(e, r.event_stream, gaps_allowed));
    }
    table.rows.push_back(std::move(row));
  }
  maybe_write(flags.output, table);
  print_table(out, table, flags.porcelain);
  return kExitOk;
}

OrderRules order_rules(const std::vector<std::string>& disabled) {
  OrderRules rules;
  for (const auto& name : disabled) {
    if (name == kRuleNonMonotonic) {
      rules.monotonic_timestamps = false;
    } else if (name == kRuleLoadWithoutReady) {
      rules.load_requires_ready = false;
    } else if (name == kRuleClickBeforeReady) {
      rules.click_requires_ready = false;
    } else {
      throw UsageError("unknown order rule '" + name + "'");
    }
  }
  return rules;
}

int cmd_plausibility(const MappingFlags& flags,
                     const std::vector<std::string>& disabled, std::ostream& out) {
  const auto rules = order_rules(disabled);
  const auto mapping = flags.mapping();
  const auto records = load_survey_export(flags.input, mapping);
  const auto table = plausibility_table(records, rules);
  maybe_write(flags.output, table);

  std::map<std::string, std::size_t> counts;
  for (const auto& row : table.rows) ++counts[row[1]];
  csv::Table totals;
  totals.header = {"classification", "count"};
  bool findings = false;
  for (auto p : {Plausibility::kNoEvents, Plausibility::kInvalidTimestamps,
                 Plausibility::kImplausibleOrder, Plausibility::kValid}) {
    const auto n = counts[std::string(to_string(p))];
    if (p != Plausibility::kValid && n > 0) findings = true;
    totals.rows.push_back({std::string(to_string(p)), std::to_string(n)});
  }
  print_table(out, totals, flags.porcelain);
  return findings ? kExitFindings : kExitOk;
}

int cmd_summary(const MappingFlags& flags, const std::string& duration_col,
                std::ostream& out) {
  const auto mapping = flags.mapping();
  const auto records = load_survey_export(flags.input, mapping);
  SummaryOptions options;
  if (!duration_col.empty()) options.duration_field = duration_col;
  const auto table = summary_table(corpus_summary(records, options));
  maybe_write(flags.output, table);
  print_table(out, table, flags.porcelain);
  return kExitOk;
}

struct ServeFlags {
  std::string bind = "127.0.0.1:8080";
  std::string origins = "*";
  std::string data;
  std::size_t max_id_length = 256;
  std::size_t max_events = 10'000;
  bool no_fsync = false;
  bool verbose = false;
};

int cmd_serve(const ServeFlags& flags, std::ostream& out, std::ostream& err) {
  collector::CollectorConfig config;
  config.bind_address = flags.bind;
  config.allowed_origins = split(flags.origins, ',');
  config.persistence_path = flags.data;
  config.limits.max_event_id_length = flags.max_id_length;
  config.limits.max_events_per_session = flags.max_events;
  config.sync_writes = !flags.no_fsync;
  try {
    collector::validate(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (flags.verbose) spdlog::set_level(spdlog::level::debug);

  // Worker threads inherit the mask; only this thread takes the signals.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  collector::SessionStore store(config);
  collector::CollectorServer server(store, config);
  if (!server.bind()) {
    err << "error: cannot bind " << config.bind_address << '\n';
    return kExitIo;
  }
  const auto host = collector::parse_bind_address(config.bind_address).host;
  out << "listening on http://" << host << ':' << server.port() << std::endl;
  server.start();
  int received = 0;
  sigwait(&signals, &received);
  spdlog::info("signal {}, shutting down", received);
  server.stop();
  return kExitOk;
}

struct SimulateFlags {
  std::string pattern;
  std::string latency = "zero";
  std::size_t runs = 1000;
  std::uint64_t seed = 0;
  std::string output;
  std::string collector_url;
  std::int64_t click_call_ms = 0;
  std::int64_t ready_to_load_ms = 0;
  bool porcelain = false;
};

int cmd_simulate(const SimulateFlags& flags, std::ostream& out) {
  const auto pattern = flags.pattern.empty()
                           ? harness::default_pattern()
                           : harness::parse_pattern(csv::read_file(flags.pattern));
  const auto latency = harness::parse_latency(flags.latency, flags.seed);
  harness::SimulationOptions options;
  options.click_call_ms = flags.click_call_ms;
  options.ready_to_load_ms = flags.ready_to_load_ms;

  std::vector<harness::RunResult> results;
  if (flags.collector_url.empty()) {
    results = harness::run_simulation(pattern, latency, flags.runs, options);
  } else {
    collector::CollectorClient client(flags.collector_url);
    results = harness::run_simulation(pattern, latency, flags.runs, client, options);
  }
  const auto summary = harness::summarize_run(results);
  const std::vector<NamedDelayStats> named = {{"click_delay_ms", summary.click},
                                              {"dwell_delay_ms", summary.dwell}};
  const auto table = delay_stats_table(named);
  maybe_write(flags.output, table);
  print_table(out, table, flags.porcelain);
  if (!flags.porcelain) {
    std::size_t lossless = 0;
    std::size_t ordered = 0;
    for (const auto& r : results) {
      lossless += r.lossless() ? 1 : 0;
      ordered += r.order_preserved() ? 1 : 0;
    }
    out << "runs: " << results.size() << "  lossless: " << lossless
        << "  order preserved: " << ordered << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Clickstream study toolkit: parse, analyze and collect event streams",
               "clicktrail"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "clicktrail 0.1.0");

  auto* parse = app.add_subcommand("parse", "Parse one event stream and list its events");
  std::string parse_input;
  bool parse_strict = false;
  bool parse_porcelain = false;
  parse->add_option("--input", parse_input, "File with the stream text, '-' for stdin")
      ->required();
  parse->add_flag("--strict", parse_strict, "Fail on garbage or invalid timestamps");
  parse->add_flag("--porcelain", parse_porcelain, "Machine-readable stdout");

  auto* analyze = app.add_subcommand("analyze", "Evaluate expressions per participant");
  MappingFlags analyze_flags;
  analyze_flags.add_to(*analyze);
  std::vector<std::string> exprs;
  bool gaps_allowed = false;
  analyze->add_option("--expr", exprs, "Expression (repeatable)")->required();
  analyze->add_flag("--gaps-allowed", gaps_allowed,
                    "countPattern matches subsequences instead of runs");

  auto* plaus = app.add_subcommand("plausibility", "Classify recordings; exit 1 on findings");
  MappingFlags plaus_flags;
  plaus_flags.add_to(*plaus);
  std::vector<std::string> disabled_rules;
  plaus->add_option("--disable-rule", disabled_rules,
                    "Turn off an order rule: non_monotonic_timestamp, "
                    "load_without_ready, click_before_ready");

  auto* summary = app.add_subcommand("summary", "Corpus-level client and quality summary");
  MappingFlags summary_flags;
  summary_flags.add_to(*summary);
  std::string duration_col;
  summary->add_option("--duration-col", duration_col,
                      "Completion time column [Duration (in seconds)]");

  auto* serve = app.add_subcommand("serve", "Run the event collector");
  ServeFlags serve_flags;
  serve->add_option("--bind", serve_flags.bind, "HOST:PORT")
      ->envname("CLICKTRAIL_BIND")
      ->capture_default_str();
  serve->add_option("--origins", serve_flags.origins, "Allowed origins, comma separated, or *")
      ->envname("CLICKTRAIL_ORIGINS")
      ->capture_default_str();
  serve->add_option("--data", serve_flags.data, "Persistence directory")
      ->envname("CLICKTRAIL_DATA");
  serve->add_option("--max-event-id-length", serve_flags.max_id_length)
      ->envname("CLICKTRAIL_MAX_EVENT_ID_LENGTH")
      ->capture_default_str();
  serve->add_option("--max-events", serve_flags.max_events, "Per session")
      ->envname("CLICKTRAIL_MAX_EVENTS")
      ->capture_default_str();
  serve->add_flag("--no-fsync", serve_flags.no_fsync,
                  "Do not fsync the session log before acknowledging");
  serve->add_flag("--verbose", serve_flags.verbose, "Log every request");

  auto* simulate = app.add_subcommand("simulate", "Replay a click pattern and report delays");
  SimulateFlags sim;
  simulate->add_option("--pattern", sim.pattern, "Pattern file [built-in six-click pattern]");
  simulate->add_option("--latency", sim.latency, "zero | constant:D | uniform:LO,HI")
      ->capture_default_str();
  simulate->add_option("--runs", sim.runs)->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--output", sim.output, "Write the stats table to this csv file");
  simulate->add_option("--collector", sim.collector_url,
                       "Post through a running collector, e.g. http://127.0.0.1:8080");
  simulate->add_option("--click-call-ms", sim.click_call_ms)->capture_default_str();
  simulate->add_option("--ready-to-load-ms", sim.ready_to_load_ms)->capture_default_str();
  simulate->add_flag("--porcelain", sim.porcelain, "Machine-readable stdout");

  std::vector<std::string> argv_storage = {"clicktrail"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*parse) return cmd_parse(parse_input, parse_strict, parse_porcelain, out);
    if (*analyze) return cmd_analyze(analyze_flags, exprs, gaps_allowed, out);
    if (*plaus) return cmd_plausibility(plaus_flags, disabled_rules, out);
    if (*summary) return cmd_summary(summary_flags, duration_col, out);
    if (*serve) return cmd_serve(serve_flags, out, err);
    if (*simulate) return cmd_simulate(sim, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IngestError& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == IngestErrorCode::kMalformed ? kExitFindings : kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFindings;
  } catch (const harness::HarnessError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const csv::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const csv::CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const collector::CollectorError& e) {
    err << "error: collector: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace clicktrail::cli
