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

// Survey-export ingestion and result tables.

#ifndef CLICKTRAIL_INGEST_H_
#define CLICKTRAIL_INGEST_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clicktrail/analysis.h"
#include "clicktrail/csv.h"
#include "clicktrail/event_model.h"
#include "clicktrail/stats.h"

namespace clicktrail {

enum class MetadataField {
  kBrowserType,
  kBrowserVersion,
  kOperatingSystem,
  kScreenResolution,
  kJavaSupport,
  kUserAgent,
};

std::string_view to_string(MetadataField field);
std::optional<MetadataField> parse_metadata_field(std::string_view text);

enum class IngestErrorCode { kMissingColumn, kDuplicateParticipant, kBadMapping, kMalformed };

class IngestError : public std::runtime_error {
 public:
  IngestError(IngestErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  IngestErrorCode code() const { return code_; }

 private:
  IngestErrorCode code_;
};

struct ColumnMapping {
  std::string participant_id_column = "ResponseId";
  std::string event_stream_column = "eventStream";
  std::map<MetadataField, std::string> metadata_columns;
  // Survey columns copied verbatim into survey_fields. nullopt keeps every
  // column that is not otherwise mapped.
  std::optional<std::vector<std::string>> passthrough;
  char delimiter = ',';
  // Parse streams strictly; a malformed stream aborts the load.
  bool strict = false;
};

// Throws IngestError(kBadMapping) when the two key columns are empty or equal.
void validate(const ColumnMapping& mapping);

// Reads "key = value" lines ('#' starts a comment). Keys: id, stream,
// delimiter ("tab" allowed), passthrough (comma list), strict, and any
// metadata field name (browser_type, ..., user_agent). Unset keys keep the
// values already in `base`.
ColumnMapping parse_mapping_config(std::string_view text,
                                   ColumnMapping base = {});

std::vector<ParticipantRecord> records_from_table(const csv::Table& table,
                                                  const ColumnMapping& mapping);

std::vector<ParticipantRecord> load_survey_export(
    const std::filesystem::path& path, const ColumnMapping& mapping);

// Fixed precision used by every result table.
std::string format_ms(std::int64_t ms);
std::string format_stat(double value);  // 2 decimals

// Inverse of load_survey_export() for the mapped columns: id, stream,
// mapped metadata, then survey fields in name order. The stream cell is the
// canonical serialization followed by any trailing garbage.
csv::Table records_table(std::span<const ParticipantRecord> records,
                         const ColumnMapping& mapping);

// Long format: metric, category, value.
csv::Table summary_table(const CorpusSummary& summary);

// participant_id, classification, finding_count, findings.
csv::Table plausibility_table(std::span<const ParticipantRecord> records,
                              const OrderRules& rules = {});

struct NamedDelayStats {
  std::string name;
  DelayStats stats;
};

// metric, n, mean, sd, ci_low, ci_high, outliers.
csv::Table delay_stats_table(std::span<const NamedDelayStats> stats);

// Throws csv::IoError with the path in the message.
void write_results(const std::filesystem::path& path, const csv::Table& table,
                   char delimiter = ',');

}  // namespace clicktrail

#endif  // CLICKTRAIL_INGEST_H_
