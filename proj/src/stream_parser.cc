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

#include "clicktrail/stream_parser.h"

#include <cctype>
#include <charconv>

namespace clicktrail {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

// Tries to match one token at the start of `rest`. On success returns the
// event and sets `consumed` to the token length including the ';'.
std::optional<Event> match_token(std::string_view rest, std::size_t& consumed) {
  std::size_t pos = 0;
  Timestamp ts;
  if (rest.starts_with(kInvalidTimestampLiteral)) {
    pos = kInvalidTimestampLiteral.size();
  } else {
    while (pos < rest.size() && is_digit(rest[pos])) ++pos;
    if (pos == 0) return std::nullopt;
    std::int64_t ms = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + pos, ms);
    // Digit runs beyond the int64 range cannot be represented.
    if (ec != std::errc()) return std::nullopt;
    ts = Timestamp::at(ms);
  }
  if (pos >= rest.size() || rest[pos] != '#') return std::nullopt;
  ++pos;
  const std::size_t id_begin = pos;
  while (pos < rest.size() && rest[pos] != ';' && rest[pos] != '#') ++pos;
  if (pos == id_begin || pos >= rest.size() || rest[pos] != ';') {
    return std::nullopt;
  }
  consumed = pos + 1;
  return Event{ts, std::string(rest.substr(id_begin, pos - id_begin))};
}

}  // namespace

ParseReport parse_stream(std::string_view text, ParseOptions options) {
  ParseReport report;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t consumed = 0;
    auto event = match_token(text.substr(pos), consumed);
    if (!event) {
      report.trailing_garbage = std::string(text.substr(pos));
      break;
    }
    if (!event->timestamp.valid()) ++report.invalid_timestamp_count;
    report.stream.events.push_back(std::move(*event));
    pos += consumed;
    while (pos < text.size() && is_space(text[pos])) ++pos;
  }

  if (options.strict) {
    if (report.trailing_garbage) {
      throw ParseError("unparseable input at offset " +
                       std::to_string(text.size() -
                                      report.trailing_garbage->size()) +
                       ": '" + report.trailing_garbage->substr(0, 40) + "'");
    }
    if (report.invalid_timestamp_count > 0) {
      throw ParseError(std::to_string(report.invalid_timestamp_count) +
                       " event(s) with invalid timestamp");
    }
  }
  return report;
}

std::string serialize_event(const Event& event) {
  if (!is_valid_event_id(event.id)) {
    throw ModelError("cannot serialize invalid event id '" + event.id + "'");
  }
  std::string out = event.timestamp.valid()
                        ? std::to_string(event.timestamp.millis())
                        : std::string(kInvalidTimestampLiteral);
  out += '#';
  out += event.id;
  out += ';';
  return out;
}

std::string serialize_stream(const EventStream& stream) {
  std::string out;
  for (const auto& event : stream.events) out += serialize_event(event);
  return out;
}

}  // namespace clicktrail
