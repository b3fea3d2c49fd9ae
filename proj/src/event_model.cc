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

#include "clicktrail/event_model.h"

#include <cctype>
#include <charconv>

namespace clicktrail {

Timestamp Timestamp::at(std::int64_t epoch_ms) {
  if (epoch_ms < 0) {
    throw ModelError("timestamp must be non-negative, got " +
                     std::to_string(epoch_ms));
  }
  return Timestamp(epoch_ms);
}

std::int64_t Timestamp::millis() const {
  if (!valid_) throw ModelError("timestamp is invalid");
  return ms_;
}

bool is_valid_event_id(std::string_view id) {
  return !id.empty() && id.find_first_of("#;") == std::string_view::npos;
}

Event make_event(Timestamp timestamp, std::string id) {
  if (!is_valid_event_id(id)) {
    throw ModelError("invalid event id '" + id +
                     "': must be non-empty without '#' or ';'");
  }
  return Event{timestamp, std::move(id)};
}

Event make_event(std::int64_t epoch_ms, std::string id) {
  return make_event(Timestamp::at(epoch_ms), std::move(id));
}

EventKind classify_event(std::string_view event_id) {
  if (!is_valid_event_id(event_id)) {
    throw ModelError("cannot classify invalid event id '" +
                     std::string(event_id) + "'");
  }
  if (event_id.size() > kReadyPrefix.size() &&
      event_id.starts_with(kReadyPrefix)) {
    return PageReady{std::string(event_id.substr(kReadyPrefix.size()))};
  }
  if (event_id.size() > kLoadPrefix.size() &&
      event_id.starts_with(kLoadPrefix)) {
    return PageLoad{std::string(event_id.substr(kLoadPrefix.size()))};
  }
  if (event_id == kUndefinedClickId) return UndefinedClick{};
  return ElementClick{std::string(event_id)};
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::string event_id_of(const EventKind& kind) {
  return std::visit(
      Overloaded{
          [](const PageReady& k) { return std::string(kReadyPrefix) + k.page; },
          [](const PageLoad& k) { return std::string(kLoadPrefix) + k.page; },
          [](const ElementClick& k) { return k.element; },
          [](const UndefinedClick&) { return std::string(kUndefinedClickId); },
      },
      kind);
}

bool is_click(const EventKind& kind) {
  return std::holds_alternative<ElementClick>(kind) ||
         std::holds_alternative<UndefinedClick>(kind);
}

bool is_absolute_url(std::string_view text) {
  const auto sep = text.find("://");
  if (sep == std::string_view::npos || sep == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(text[0]))) return false;
  for (char c : text.substr(0, sep)) {
    const auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '+' && c != '-' && c != '.') return false;
  }
  const auto rest = text.substr(sep + 3);
  const auto host = rest.substr(0, rest.find_first_of("/?#"));
  if (host.empty()) return false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

void validate(const StudyConfig& config) {
  if (!is_absolute_url(config.window_url)) {
    throw ModelError("window_url is not an absolute URL: '" +
                     config.window_url + "'");
  }
  if (config.window_border < 0) {
    throw ModelError("window_border must be >= 0");
  }
  if (config.window_height <= 0) {
    throw ModelError("window_height must be > 0");
  }
  if (config.window_width <= 0) {
    throw ModelError("window_width must be > 0");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<int> parse_dimension(std::string_view s) {
  s = trim(s);
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (s.empty() || ec != std::errc() || ptr != end || value <= 0) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

std::optional<ScreenResolution> parse_resolution(std::string_view text) {
  static constexpr std::string_view kTimes = "\xC3\x97";  // U+00D7
  std::size_t sep = text.find(kTimes);
  std::size_t sep_len = kTimes.size();
  if (sep == std::string_view::npos) {
    sep = text.find_first_of("xX");
    sep_len = 1;
  }
  if (sep == std::string_view::npos) return std::nullopt;
  auto width = parse_dimension(text.substr(0, sep));
  auto height = parse_dimension(text.substr(sep + sep_len));
  if (!width || !height) return std::nullopt;
  return ScreenResolution{*width, *height};
}

std::string format_resolution(const std::optional<ScreenResolution>& res) {
  if (!res) return std::string(kUnknown);
  return std::to_string(res->width) + "x" + std::to_string(res->height);
}

Tristate parse_tristate(std::string_view text) {
  text = trim(text);
  std::string lower;
  for (char c : text) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "yes" || lower == "true" || lower == "1") return Tristate::kYes;
  if (lower == "no" || lower == "false" || lower == "0") return Tristate::kNo;
  return Tristate::kUnknown;
}

std::string_view to_string(Tristate value) {
  switch (value) {
    case Tristate::kYes:
      return "yes";
    case Tristate::kNo:
      return "no";
    case Tristate::kUnknown:
      break;
  }
  return kUnknown;
}

}  // namespace clicktrail
