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

// Session store for tracker events.
//
// Each session is an append-only event list. With a persistence directory,
// every session owns "<dir>/<session_id>.log":
//
//   !created <epoch_ms>
//   <ts>#<id>;<TAB><receipt_epoch_ms>     one line per accepted event
//   !finalized
//
// The log line is written before an append is acknowledged, and all logs
// are replayed when a store is opened on the same directory. A final line
// without a newline (torn write) is ignored on replay.

#ifndef CLICKTRAIL_COLLECTOR_H_
#define CLICKTRAIL_COLLECTOR_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clicktrail/event_model.h"

namespace clicktrail::collector {

enum class ErrorCode {
  kUnknownSession,
  kSessionFinalized,
  kInvalidEventId,
  kInvalidTimestamp,
  kSessionFull,
  kBadRequest,
  kOriginNotAllowed,
  kStorage,
};

// Machine-readable code, e.g. "unknown_session".
std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> parse_error_code(std::string_view text);
int http_status(ErrorCode code);

class CollectorError : public std::runtime_error {
 public:
  CollectorError(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Limits {
  std::size_t max_event_id_length = 256;
  std::size_t max_events_per_session = 10'000;
};

struct CollectorConfig {
  std::string bind_address = "127.0.0.1:8080";
  // Origins answered with CORS headers. "*" allows every origin.
  std::vector<std::string> allowed_origins = {"*"};
  // Empty keeps sessions in memory only.
  std::filesystem::path persistence_path;
  Limits limits;
  // fsync each log line before acknowledging.
  bool sync_writes = true;
};

// Throws std::invalid_argument on zero limits or an unparsable bind address.
void validate(const CollectorConfig& config);

struct HostPort {
  std::string host;
  int port = 0;
};
HostPort parse_bind_address(std::string_view text);

// 8 to 64 characters from [A-Za-z0-9_-].
bool is_valid_session_id(std::string_view id);

// The operations a tracker (or the validation bot) needs. Implemented
// in-process by SessionStore and over HTTP by CollectorClient.
class CollectorApi {
 public:
  virtual ~CollectorApi() = default;

  virtual std::string create_session() = 0;
  // Returns the session's event count after the append.
  virtual std::size_t post_event(const std::string& session_id,
                                 const std::string& event_id,
                                 Timestamp timestamp) = 0;
  virtual std::string get_stream(const std::string& session_id) = 0;
  // Idempotent; returns the canonical stream.
  virtual std::string finalize_session(const std::string& session_id) = 0;
};

struct SessionInfo {
  std::string session_id;
  std::int64_t created_at = 0;
  bool finalized = false;
  std::size_t event_count = 0;
};

class SessionStore : public CollectorApi {
 public:
  using Clock = std::function<std::int64_t()>;

  explicit SessionStore(CollectorConfig config, Clock clock = {});
  ~SessionStore() override;

  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  std::string create_session() override;
  std::size_t post_event(const std::string& session_id,
                         const std::string& event_id,
                         Timestamp timestamp) override;
  std::string get_stream(const std::string& session_id) override;
  std::string finalize_session(const std::string& session_id) override;

  EventStream events(const std::string& session_id) const;
  // Server receipt times, parallel to events(). Diagnostic only.
  std::vector<std::int64_t> receipt_times(const std::string& session_id) const;
  SessionInfo info(const std::string& session_id) const;
  std::size_t session_count() const;

  const CollectorConfig& config() const { return config_; }

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& session_id) const;
  void replay();
  void append_log(const Session& session, std::string_view line);

  CollectorConfig config_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace clicktrail::collector

#endif  // CLICKTRAIL_COLLECTOR_H_
