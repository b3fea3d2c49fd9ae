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

#ifndef CLICKTRAIL_EVENT_MODEL_H_
#define CLICKTRAIL_EVENT_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace clicktrail {

// Thrown whenever a value would violate an invariant of the event model.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Milliseconds since 1970-01-01T00:00:00 UTC, or the Invalid marker that the
// wire format spells "undefined".
class Timestamp {
 public:
  // Invalid by default.
  constexpr Timestamp() = default;

  static Timestamp at(std::int64_t epoch_ms);
  static constexpr Timestamp invalid() { return Timestamp(); }

  constexpr bool valid() const { return valid_; }
  // Precondition: valid().
  std::int64_t millis() const;

  friend constexpr bool operator==(const Timestamp&, const Timestamp&) = default;

 private:
  constexpr explicit Timestamp(std::int64_t ms) : ms_(ms), valid_(true) {}

  std::int64_t ms_ = 0;
  bool valid_ = false;
};

// True iff `id` is non-empty and contains neither '#' nor ';'.
bool is_valid_event_id(std::string_view id);

// One tracking record. Construct through make_event() to get validation.
struct Event {
  Timestamp timestamp;
  std::string id;

  friend bool operator==(const Event&, const Event&) = default;
};

// Throws ModelError if `id` is not a valid event id.
Event make_event(Timestamp timestamp, std::string id);
Event make_event(std::int64_t epoch_ms, std::string id);

struct PageReady {
  std::string page;
  friend bool operator==(const PageReady&, const PageReady&) = default;
};
struct PageLoad {
  std::string page;
  friend bool operator==(const PageLoad&, const PageLoad&) = default;
};
struct ElementClick {
  std::string element;
  friend bool operator==(const ElementClick&, const ElementClick&) = default;
};
struct UndefinedClick {
  friend bool operator==(const UndefinedClick&, const UndefinedClick&) = default;
};

using EventKind = std::variant<PageReady, PageLoad, ElementClick, UndefinedClick>;

inline constexpr std::string_view kReadyPrefix = "ready_";
inline constexpr std::string_view kLoadPrefix = "load_";
inline constexpr std::string_view kUndefinedClickId = "Undefined";

// Pure prefix rule: "ready_<page>" and "load_<page>" are page events when the
// page name is non-empty, "Undefined" is a click on an element without an
// id, and everything else is a click on the element with that id. Element
// ids must therefore not start with "ready_" or "load_".
// Throws ModelError on an invalid id.
EventKind classify_event(std::string_view event_id);

// Inverse of classify_event().
std::string event_id_of(const EventKind& kind);

bool is_click(const EventKind& kind);

struct EventStream {
  std::vector<Event> events;

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

// Embedded study fields describing the stimulus window.
struct StudyConfig {
  std::string window_url;
  int window_border = 0;
  int window_height = 640;
  int window_width = 480;
  bool window_scroll = true;
};

// True for "<scheme>://<host>[...]" with an RFC 3986 scheme.
bool is_absolute_url(std::string_view text);

// Throws ModelError describing the first violated field.
void validate(const StudyConfig& config);

enum class Tristate { kUnknown, kNo, kYes };

struct ScreenResolution {
  int width = 0;
  int height = 0;
  friend bool operator==(const ScreenResolution&,
                         const ScreenResolution&) = default;
};

// Accepts "1440x900", "1440 X 900" and "1440×900". Returns nullopt for
// anything else, including non-positive dimensions.
std::optional<ScreenResolution> parse_resolution(std::string_view text);
std::string format_resolution(const std::optional<ScreenResolution>& res);

inline constexpr std::string_view kUnknown = "unknown";

struct ClientMetadata {
  std::string browser_type{kUnknown};
  std::string browser_version{kUnknown};
  std::string operating_system{kUnknown};
  std::optional<ScreenResolution> screen_resolution;
  Tristate java_support = Tristate::kUnknown;
  std::string user_agent{kUnknown};

  friend bool operator==(const ClientMetadata&,
                         const ClientMetadata&) = default;
};

Tristate parse_tristate(std::string_view text);
std::string_view to_string(Tristate value);

// Problems found while turning the raw stream cell into an EventStream.
struct StreamDiagnostics {
  std::size_t invalid_timestamp_count = 0;
  std::optional<std::string> trailing_garbage;

  friend bool operator==(const StreamDiagnostics&,
                         const StreamDiagnostics&) = default;
};

struct ParticipantRecord {
  std::string participant_id;
  EventStream event_stream;
  StreamDiagnostics stream_diagnostics;
  ClientMetadata client;
  std::map<std::string, std::string> survey_fields;

  friend bool operator==(const ParticipantRecord&,
                         const ParticipantRecord&) = default;
};

}  // namespace clicktrail

#endif  // CLICKTRAIL_EVENT_MODEL_H_
