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

#include "clicktrail/csv.h"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace clicktrail::csv {

namespace {
constexpr std::string_view kBom = "\xEF\xBB\xBF";
}  // namespace

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<Row> parse(std::string_view text, char delimiter) {
  if (text.starts_with(kBom)) text.remove_prefix(kBom.size());

  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  // Whether anything (even an empty quoted field) was seen on this line.
  bool line_started = false;

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      line_started = true;
    } else if (c == delimiter) {
      row.push_back(std::move(field));
      field.clear();
      line_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      line_started = false;
    } else {
      field.push_back(c);
      line_started = true;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted field");
  if (line_started) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

Table parse_table(std::string_view text, char delimiter) {
  auto rows = parse(text, delimiter);
  Table table;
  if (rows.empty()) return table;
  table.header = std::move(rows.front());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    // Blank lines between records carry no data.
    if (row.size() == 1 && row[0].empty() && table.header.size() > 1) continue;
    if (row.size() > table.header.size()) {
      throw CsvError("line " + std::to_string(r + 1) + " has " +
                     std::to_string(row.size()) + " fields, header has " +
                     std::to_string(table.header.size()));
    }
    row.resize(table.header.size());
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string quote_field(std::string_view field, char delimiter) {
  const bool needs_quotes =
      field.find_first_of(std::string{delimiter, '"', '\r', '\n'}) !=
      std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_row(const Row& row, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out.push_back(delimiter);
    out += quote_field(row[i], delimiter);
  }
  return out;
}

std::string format_table(const Table& table, char delimiter) {
  std::string out = format_row(table.header, delimiter);
  out.push_back('\n');
  for (const auto& row : table.rows) {
    out += format_row(row, delimiter);
    out.push_back('\n');
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() +
                  "' for reading: " + std::strerror(errno));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return std::move(buffer).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() +
                  "' for writing: " + std::strerror(errno));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

Table read_table(const std::filesystem::path& path, char delimiter) {
  const auto text = read_file(path);
  try {
    return parse_table(text, delimiter);
  } catch (const CsvError& e) {
    throw CsvError(path.string() + ": " + e.what());
  }
}

void write_table(const std::filesystem::path& path, const Table& table,
                 char delimiter) {
  write_file(path, format_table(table, delimiter));
}

}  // namespace clicktrail::csv
