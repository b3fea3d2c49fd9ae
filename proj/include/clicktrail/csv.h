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

// Delimited text tables with the usual quoting convention: a field that
// contains the delimiter, a quote, CR or LF is wrapped in double quotes and
// embedded quotes are doubled.

#ifndef CLICKTRAIL_CSV_H_
#define CLICKTRAIL_CSV_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clicktrail::csv {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;

  // Index of `name` in the header, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

// Parses a whole document. A leading UTF-8 byte-order mark is skipped.
// Accepts LF and CRLF line ends; a final line end is optional. Throws
// CsvError on an unterminated quoted field.
std::vector<Row> parse(std::string_view text, char delimiter = ',');

// First row becomes the header. Empty input yields an empty table. Short
// rows are padded with empty cells; a row longer than the header throws.
Table parse_table(std::string_view text, char delimiter = ',');

std::string quote_field(std::string_view field, char delimiter = ',');
std::string format_row(const Row& row, char delimiter = ',');
// LF line ends, no byte-order mark.
std::string format_table(const Table& table, char delimiter = ',');

// Throw IoError naming the path on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

Table read_table(const std::filesystem::path& path, char delimiter = ',');
void write_table(const std::filesystem::path& path, const Table& table,
                 char delimiter = ',');

}  // namespace clicktrail::csv

#endif  // CLICKTRAIL_CSV_H_
