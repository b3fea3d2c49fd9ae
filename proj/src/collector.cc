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

#include "clicktrail/collector.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <random>

#include <spdlog/spdlog.h>

#include "clicktrail/csv.h"
#include "clicktrail/stream_parser.h"

namespace clicktrail::collector {

namespace {

constexpr std::string_view kCreatedTag = "!created ";
constexpr std::string_view kFinalizedTag = "!finalized";
constexpr std::string_view kLogSuffix = ".log";
constexpr std::string_view kIdAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
constexpr std::size_t kGeneratedIdLength = 22;

std::int64_t system_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string errno_text() { return std::strerror(errno); }

// Writes all of `data`, retrying on short writes and EINTR.
bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const auto n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
      return "unknown_session";
    case ErrorCode::kSessionFinalized:
      return "session_finalized";
    case ErrorCode::kInvalidEventId:
      return "invalid_event_id";
    case ErrorCode::kInvalidTimestamp:
      return "invalid_timestamp";
    case ErrorCode::kSessionFull:
      return "session_full";
    case ErrorCode::kBadRequest:
      return "bad_request";
    case ErrorCode::kOriginNotAllowed:
      return "origin_not_allowed";
    case ErrorCode::kStorage:
      return "storage_error";
  }
  return "storage_error";
}

std::optional<ErrorCode> parse_error_code(std::string_view text) {
  for (auto c : {ErrorCode::kUnknownSession, ErrorCode::kSessionFinalized,
                 ErrorCode::kInvalidEventId, ErrorCode::kInvalidTimestamp,
                 ErrorCode::kSessionFull, ErrorCode::kBadRequest,
                 ErrorCode::kOriginNotAllowed, ErrorCode::kStorage}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSession:
      return 404;
    case ErrorCode::kSessionFinalized:
      return 409;
    case ErrorCode::kInvalidEventId:
    case ErrorCode::kInvalidTimestamp:
    case ErrorCode::kBadRequest:
      return 400;
    case ErrorCode::kSessionFull:
      return 413;
    case ErrorCode::kOriginNotAllowed:
      return 403;
    case ErrorCode::kStorage:
      return 500;
  }
  return 500;
}

HostPort parse_bind_address(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw std::invalid_argument("bind address must be HOST:PORT, got '" +
                                std::string(text) + "'");
  }
  const auto port = parse_int(text.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535) {
    throw std::invalid_argument("invalid port in bind address '" +
                                std::string(text) + "'");
  }
  auto host = std::string(text.substr(0, colon));
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  return {host, static_cast<int>(*port)};
}

void validate(const CollectorConfig& config) {
  if (config.limits.max_event_id_length == 0 ||
      config.limits.max_events_per_session == 0) {
    throw std::invalid_argument("collector limits must be > 0");
  }
  parse_bind_address(config.bind_address);
}

bool is_valid_session_id(std::string_view id) {
  return id.size() >= 8 && id.size() <= 64 &&
         id.find_first_not_of(kIdAlphabet) == std::string_view::npos;
}

struct SessionStore::Session {
  std::string id;
  std::int64_t created_at = 0;
  std::filesystem::path log_path;

  mutable std::mutex mutex;
  bool finalized = false;
  EventStream stream;
  std::vector<std::int64_t> received_at;
};

SessionStore::SessionStore(CollectorConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(clock ? std::move(clock) : Clock(system_now_ms)) {
  if (config_.limits.max_event_id_length == 0 ||
      config_.limits.max_events_per_session == 0) {
    throw std::invalid_argument("collector limits must be > 0");
  }
  if (!config_.persistence_path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config_.persistence_path, ec);
    if (ec) {
      throw csv::IoError("cannot create persistence directory '" +
                         config_.persistence_path.string() +
                         "': " + ec.message());
    }
    replay();
  }
}

SessionStore::~SessionStore() = default;

void SessionStore::replay() {
  std::size_t replayed_events = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(config_.persistence_path)) {
    const auto& path = entry.path();
    if (!entry.is_regular_file() || path.extension() != kLogSuffix) continue;
    const auto id = path.stem().string();
    if (!is_valid_session_id(id)) continue;

    auto session = std::make_shared<Session>();
    session->id = id;
    session->log_path = path;
    std::string_view text;
    const auto contents = csv::read_file(path);
    text = contents;
    while (!text.empty()) {
      const auto nl = text.find('\n');
      if (nl == std::string_view::npos) {
        spdlog::warn("{}: ignoring torn final line", path.string());
        break;
      }
      const auto line = text.substr(0, nl);
      text.remove_prefix(nl + 1);
      if (line.starts_with(kCreatedTag)) {
        session->created_at =
            parse_int(line.substr(kCreatedTag.size())).value_or(0);
        continue;
      }
      if (line == kFinalizedTag) {
        session->finalized = true;
        continue;
      }
      const auto tab = line.rfind('\t');
      const auto report = parse_stream(line.substr(0, tab));
      if (report.stream.size() != 1 || report.trailing_garbage) {
        spdlog::warn("{}: skipping malformed log line '{}'", path.string(),
                     line);
        continue;
      }
      session->stream.events.push_back(report.stream.events.front());
      session->received_at.push_back(
          tab == std::string_view::npos
              ? 0
              : parse_int(line.substr(tab + 1)).value_or(0));
      ++replayed_events;
    }
    sessions_.emplace(id, std::move(session));
  }
  if (!sessions_.empty()) {
    spdlog::info("replayed {} session(s), {} event(s) from {}",
                 sessions_.size(), replayed_events,
                 config_.persistence_path.string());
  }
}

void SessionStore::append_log(const Session& session, std::string_view line) {
  if (session.log_path.empty()) return;
  const int fd = ::open(session.log_path.c_str(),
                        O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw CollectorError(ErrorCode::kStorage,
                         "cannot open session log: " + errno_text());
  }
  const bool ok = write_all(fd, line) && (!config_.sync_writes || ::fsync(fd) == 0);
  const auto saved = errno;
  ::close(fd);
  if (!ok) {
    errno = saved;
    throw CollectorError(ErrorCode::kStorage,
                         "cannot write session log: " + errno_text());
  }
}

std::shared_ptr<SessionStore::Session> SessionStore::find(
    const std::string& session_id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw CollectorError(ErrorCode::kUnknownSession,
                         "no session '" + session_id + "'");
  }
  return it->second;
}

std::string SessionStore::create_session() {
  auto session = std::make_shared<Session>();
  session->created_at = clock_();

  std::unique_lock lock(mutex_);
  static std::random_device device;
  std::uniform_int_distribution<std::size_t> pick(0, kIdAlphabet.size() - 1);
  do {
    session->id.clear();
    for (std::size_t i = 0; i < kGeneratedIdLength; ++i) {
      session->id.push_back(kIdAlphabet[pick(device)]);
    }
  } while (sessions_.contains(session->id));

  if (!config_.persistence_path.empty()) {
    session->log_path =
        config_.persistence_path / (session->id + std::string(kLogSuffix));
    append_log(*session, std::string(kCreatedTag) +
                             std::to_string(session->created_at) + "\n");
  }
  sessions_.emplace(session->id, session);
  return session->id;
}

std::size_t SessionStore::post_event(const std::string& session_id,
                                     const std::string& event_id,
                                     Timestamp timestamp) {
  if (!is_valid_event_id(event_id)) {
    throw CollectorError(ErrorCode::kInvalidEventId,
                         "event id must be non-empty without '#' or ';'");
  }
  if (std::any_of(event_id.begin(), event_id.end(), [](unsigned char c) {
        return c < 0x20 || c == 0x7f;
      })) {
    throw CollectorError(ErrorCode::kInvalidEventId,
                         "event id must not contain control characters");
  }
  if (event_id.size() > config_.limits.max_event_id_length) {
    throw CollectorError(
        ErrorCode::kInvalidEventId,
        "event id longer than " +
            std::to_string(config_.limits.max_event_id_length) + " bytes");
  }
  auto session = find(session_id);
  const auto received = clock_();

  std::lock_guard lock(session->mutex);
  if (session->finalized) {
    throw CollectorError(ErrorCode::kSessionFinalized,
                         "session '" + session_id + "' is finalized");
  }
  if (session->stream.size() >= config_.limits.max_events_per_session) {
    throw CollectorError(
        ErrorCode::kSessionFull,
        "session '" + session_id + "' holds the maximum of " +
            std::to_string(config_.limits.max_events_per_session) + " events");
  }
  Event event{timestamp, event_id};
  append_log(*session, serialize_event(event) + "\t" +
                           std::to_string(received) + "\n");
  session->stream.events.push_back(std::move(event));
  session->received_at.push_back(received);
  spdlog::debug("session {} event {} ts={} received={}", session_id,
                session->stream.size(),
                timestamp.valid() ? std::to_string(timestamp.millis())
                                  : std::string("undefined"),
                received);
  return session->stream.size();
}

std::string SessionStore::get_stream(const std::string& session_id) {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return serialize_stream(session->stream);
}

std::string SessionStore::finalize_session(const std::string& session_id) {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  if (!session->finalized) {
    append_log(*session, std::string(kFinalizedTag) + "\n");
    session->finalized = true;
  }
  return serialize_stream(session->stream);
}

EventStream SessionStore::events(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return session->stream;
}

std::vector<std::int64_t> SessionStore::receipt_times(
    const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return session->received_at;
}

SessionInfo SessionStore::info(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mutex);
  return {session->id, session->created_at, session->finalized,
          session->stream.size()};
}

std::size_t SessionStore::session_count() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

}  // namespace clicktrail::collector
