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

// Event-stream wire format.
//
//   stream := token*
//   token  := ts '#' id ';' ws*
//   ts     := [0-9]+ | "undefined"
//   id     := [^#;]+
//
// Whitespace is only tolerated after a ';'. The first position where no
// token matches starts the trailing garbage. Serialization is canonical:
// no whitespace between tokens.

#ifndef CLICKTRAIL_STREAM_PARSER_H_
#define CLICKTRAIL_STREAM_PARSER_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "clicktrail/event_model.h"

namespace clicktrail {

inline constexpr std::string_view kInvalidTimestampLiteral = "undefined";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  // Turn trailing garbage and invalid timestamps into a ParseError.
  bool strict = false;
};

struct ParseReport {
  EventStream stream;
  std::size_t invalid_timestamp_count = 0;
  std::optional<std::string> trailing_garbage;

  StreamDiagnostics diagnostics() const {
    return {invalid_timestamp_count, trailing_garbage};
  }
};

ParseReport parse_stream(std::string_view text, ParseOptions options = {});

// Throws ModelError if an event id is not wire-safe.
std::string serialize_stream(const EventStream& stream);

// A single "<ts>#<id>;" token.
std::string serialize_event(const Event& event);

}  // namespace clicktrail

#endif  // CLICKTRAIL_STREAM_PARSER_H_
