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

#include "clicktrail/ingest.h"

#include <cstdio>
#include <set>

#include "clicktrail/stream_parser.h"

namespace clicktrail {

namespace {

constexpr MetadataField kAllMetadataFields[] = {
    MetadataField::kBrowserType,      MetadataField::kBrowserVersion,
    MetadataField::kOperatingSystem,  MetadataField::kScreenResolution,
    MetadataField::kJavaSupport,      MetadataField::kUserAgent,
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string text_or_unknown(const std::string& cell) {
  auto t = trim(cell);
  return t.empty() ? std::string(kUnknown) : std::string(t);
}

void set_metadata(ClientMetadata& client, MetadataField field,
                  const std::string& cell) {
  switch (field) {
    case MetadataField::kBrowserType:
      client.browser_type = text_or_unknown(cell);
      break;
    case MetadataField::kBrowserVersion:
      client.browser_version = text_or_unknown(cell);
      break;
    case MetadataField::kOperatingSystem:
      client.operating_system = text_or_unknown(cell);
      break;
    case MetadataField::kScreenResolution:
      client.screen_resolution = parse_resolution(cell);
      break;
    case MetadataField::kJavaSupport:
      client.java_support = parse_tristate(cell);
      break;
    case MetadataField::kUserAgent:
      client.user_agent = text_or_unknown(cell);
      break;
  }
}

std::string get_metadata(const ClientMetadata& client, MetadataField field) {
  switch (field) {
    case MetadataField::kBrowserType:
      return client.browser_type;
    case MetadataField::kBrowserVersion:
      return client.browser_version;
    case MetadataField::kOperatingSystem:
      return client.operating_system;
    case MetadataField::kScreenResolution:
      return format_resolution(client.screen_resolution);
    case MetadataField::kJavaSupport:
      return std::string(to_string(client.java_support));
    case MetadataField::kUserAgent:
      return client.user_agent;
  }
  return std::string(kUnknown);
}

std::size_t require_column(const csv::Table& table, const std::string& name,
                           std::string_view role) {
  if (auto idx = table.column(name)) return *idx;
  throw IngestError(IngestErrorCode::kMissingColumn,
                    "missing " + std::string(role) + " column '" + name + "'");
}

}  // namespace

std::string_view to_string(MetadataField field) {
  switch (field) {
    case MetadataField::kBrowserType:
      return "browser_type";
    case MetadataField::kBrowserVersion:
      return "browser_version";
    case MetadataField::kOperatingSystem:
      return "operating_system";
    case MetadataField::kScreenResolution:
      return "screen_resolution";
    case MetadataField::kJavaSupport:
      return "java_support";
    case MetadataField::kUserAgent:
      return "user_agent";
  }
  return "";
}

std::optional<MetadataField> parse_metadata_field(std::string_view text) {
  for (auto f : kAllMetadataFields) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

void validate(const ColumnMapping& mapping) {
  if (mapping.participant_id_column.empty() ||
      mapping.event_stream_column.empty()) {
    throw IngestError(IngestErrorCode::kBadMapping,
                      "participant id and event stream columns must be named");
  }
  if (mapping.participant_id_column == mapping.event_stream_column) {
    throw IngestError(IngestErrorCode::kBadMapping,
                      "participant id and event stream columns must differ ('" +
                          mapping.event_stream_column + "')");
  }
}

ColumnMapping parse_mapping_config(std::string_view text, ColumnMapping base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw IngestError(IngestErrorCode::kBadMapping,
                        "mapping line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = std::string(trim(line.substr(eq + 1)));
    if (key == "id") {
      base.participant_id_column = value;
    } else if (key == "stream") {
      base.event_stream_column = value;
    } else if (key == "delimiter") {
      if (value == "tab") {
        base.delimiter = '\t';
      } else if (value.size() == 1) {
        base.delimiter = value[0];
      } else {
        throw IngestError(IngestErrorCode::kBadMapping,
                          "mapping line " + std::to_string(line_no) +
                              ": delimiter must be one character or 'tab'");
      }
    } else if (key == "passthrough") {
      base.passthrough = split_list(value);
    } else if (key == "strict") {
      base.strict = parse_tristate(value) == Tristate::kYes;
    } else if (auto field = parse_metadata_field(key)) {
      base.metadata_columns[*field] = value;
    } else {
      throw IngestError(IngestErrorCode::kBadMapping,
                        "mapping line " + std::to_string(line_no) +
                            ": unknown key '" + std::string(key) + "'");
    }
  }
  validate(base);
  return base;
}

std::vector<ParticipantRecord> records_from_table(const csv::Table& table,
                                                  const ColumnMapping& mapping) {
  validate(mapping);
  if (table.header.empty()) return {};
  const auto id_col =
      require_column(table, mapping.participant_id_column, "participant id");
  const auto stream_col =
      require_column(table, mapping.event_stream_column, "event stream");

  std::vector<std::pair<MetadataField, std::size_t>> meta_cols;
  std::set<std::size_t> mapped = {id_col, stream_col};
  for (const auto& [field, name] : mapping.metadata_columns) {
    const auto idx = require_column(table, name, to_string(field));
    meta_cols.emplace_back(field, idx);
    mapped.insert(idx);
  }

  std::vector<std::pair<std::string, std::size_t>> pass_cols;
  if (mapping.passthrough) {
    for (const auto& name : *mapping.passthrough) {
      pass_cols.emplace_back(name, require_column(table, name, "passthrough"));
    }
  } else {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (!mapped.contains(i)) pass_cols.emplace_back(table.header[i], i);
    }
  }

  std::vector<ParticipantRecord> records;
  records.reserve(table.rows.size());
  std::set<std::string> seen;
  std::set<std::string> duplicates;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ParticipantRecord record;
    record.participant_id = row[id_col];
    if (!seen.insert(record.participant_id).second) {
      duplicates.insert(record.participant_id);
    }
    try {
      auto report = parse_stream(row[stream_col], {.strict = mapping.strict});
      record.stream_diagnostics = report.diagnostics();
      record.event_stream = std::move(report.stream);
    } catch (const ParseError& e) {
      throw IngestError(IngestErrorCode::kMalformed,
                        "row " + std::to_string(r + 2) + " (participant '" +
                            record.participant_id + "'): " + e.what());
    }
    for (const auto& [field, idx] : meta_cols) {
      set_metadata(record.client, field, row[idx]);
    }
    for (const auto& [name, idx] : pass_cols) {
      record.survey_fields[name] = row[idx];
    }
    records.push_back(std::move(record));
  }

  if (!duplicates.empty()) {
    std::string list;
    for (const auto& id : duplicates) {
      if (!list.empty()) list += ", ";
      list += "'" + id + "'";
    }
    throw IngestError(IngestErrorCode::kDuplicateParticipant,
                      "duplicate participant ids: " + list);
  }
  return records;
}

std::vector<ParticipantRecord> load_survey_export(
    const std::filesystem::path& path, const ColumnMapping& mapping) {
  validate(mapping);
  const auto table = csv::read_table(path, mapping.delimiter);
  try {
    return records_from_table(table, mapping);
  } catch (const IngestError& e) {
    throw IngestError(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_ms(std::int64_t ms) { return std::to_string(ms); }

std::string format_stat(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string out = buf;
  if (out == "-0.00") out = "0.00";
  return out;
}

csv::Table records_table(std::span<const ParticipantRecord> records,
                         const ColumnMapping& mapping) {
  csv::Table table;
  table.header = {mapping.participant_id_column, mapping.event_stream_column};
  for (const auto& [field, name] : mapping.metadata_columns) {
    table.header.push_back(name);
  }
  std::set<std::string> survey_names;
  for (const auto& r : records) {
    for (const auto& [name, value] : r.survey_fields) survey_names.insert(name);
  }
  for (const auto& name : survey_names) table.header.push_back(name);

  for (const auto& r : records) {
    csv::Row row = {r.participant_id, serialize_stream(r.event_stream) +
                                          r.stream_diagnostics.trailing_garbage
                                              .value_or("")};
    for (const auto& [field, name] : mapping.metadata_columns) {
      row.push_back(get_metadata(r.client, field));
    }
    for (const auto& name : survey_names) {
      auto it = r.survey_fields.find(name);
      row.push_back(it == r.survey_fields.end() ? "" : it->second);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

csv::Table summary_table(const CorpusSummary& summary) {
  csv::Table table;
  table.header = {"metric", "category", "value"};
  auto add = [&](std::string metric, std::string category, std::string value) {
    table.rows.push_back(
        {std::move(metric), std::move(category), std::move(value)});
  };
  add("records", "all", std::to_string(summary.record_count));
  for (const auto& s : summary.browser_shares) {
    add("browser_share_pct", s.category, format_stat(s.percent));
  }
  for (const auto& s : summary.os_shares) {
    add("os_share_pct", s.category, format_stat(s.percent));
  }
  add("resolution", "known", std::to_string(summary.resolution_known));
  add("resolution", "unknown", std::to_string(summary.resolution_unknown));
  if (summary.width) {
    add("window_width_px", "p25", format_stat(summary.width->p25));
    add("window_width_px", "median", format_stat(summary.width->median));
    add("window_width_px", "p75", format_stat(summary.width->p75));
    add("window_height_px", "p25", format_stat(summary.height->p25));
    add("window_height_px", "median", format_stat(summary.height->median));
    add("window_height_px", "p75", format_stat(summary.height->p75));
  }
  for (auto p : {Plausibility::kNoEvents, Plausibility::kInvalidTimestamps,
                 Plausibility::kImplausibleOrder, Plausibility::kValid}) {
    add("plausibility", std::string(to_string(p)),
        std::to_string(summary.count_of(p)));
  }
  if (summary.median_duration) {
    add("completion_time", "median", format_stat(*summary.median_duration));
  }
  return table;
}

csv::Table plausibility_table(std::span<const ParticipantRecord> records,
                              const OrderRules& rules) {
  csv::Table table;
  table.header = {"participant_id", "classification", "finding_count",
                  "findings"};
  for (const auto& r : records) {
    const auto report = plausibility_check(r.event_stream, rules);
    std::string findings;
    for (const auto& f : report.findings) {
      if (!findings.empty()) findings += " | ";
      findings += f.rule + "@" + std::to_string(f.event_index);
    }
    table.rows.push_back({r.participant_id,
                          std::string(to_string(report.classification)),
                          std::to_string(report.findings.size()), findings});
  }
  return table;
}

csv::Table delay_stats_table(std::span<const NamedDelayStats> stats) {
  csv::Table table;
  table.header = {"metric", "n",       "mean",    "sd",
                  "ci_low", "ci_high", "outliers"};
  for (const auto& [name, s] : stats) {
    table.rows.push_back({name, std::to_string(s.n), format_stat(s.mean),
                          format_stat(s.sd), format_stat(s.ci_low),
                          format_stat(s.ci_high),
                          std::to_string(s.outliers.size())});
  }
  return table;
}

void write_results(const std::filesystem::path& path, const csv::Table& table,
                   char delimiter) {
  csv::write_table(path, table, delimiter);
}

}  // namespace clicktrail
