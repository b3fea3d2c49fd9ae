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

// HTTP front end for SessionStore.
//
//   POST /session             -> {"session": "<id>"}
//   POST /event               {"session": s, "id": text, "ts": int|"undefined"}
//                             -> {"accepted": true, "count": n}
//   GET  /event?session=&id=&ts=   beacon variant of POST /event
//   GET  /stream/<session>    -> text/plain wire format
//   POST /finalize/<session>  -> text/plain wire format
//
// Errors: 4xx/5xx with {"error": "<code>", "detail": "<text>"}.

#ifndef CLICKTRAIL_COLLECTOR_HTTP_H_
#define CLICKTRAIL_COLLECTOR_HTTP_H_

#include <memory>
#include <string>
#include <thread>

#include "clicktrail/collector.h"

namespace clicktrail::collector {

class CollectorServer {
 public:
  CollectorServer(SessionStore& store, CollectorConfig config);
  ~CollectorServer();

  CollectorServer(const CollectorServer&) = delete;
  CollectorServer& operator=(const CollectorServer&) = delete;

  // Binds config.bind_address; port 0 picks a free port. Returns false if
  // the address cannot be bound.
  bool bind();
  int port() const { return port_; }

  // Blocks until stop().
  void listen();
  // bind() must have succeeded. Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
  std::thread thread_;
};

// Blocking client for the endpoints above. Errors returned by the server are
// rethrown as CollectorError with the server's code; transport failures
// throw CollectorError(kStorage).
class CollectorClient : public CollectorApi {
 public:
  // base_url like "http://127.0.0.1:8080".
  explicit CollectorClient(const std::string& base_url);
  ~CollectorClient() override;

  std::string create_session() override;
  std::size_t post_event(const std::string& session_id,
                         const std::string& event_id,
                         Timestamp timestamp) override;
  // GET beacon variant of post_event.
  std::size_t post_event_beacon(const std::string& session_id,
                                const std::string& event_id,
                                Timestamp timestamp);
  std::string get_stream(const std::string& session_id) override;
  std::string finalize_session(const std::string& session_id) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clicktrail::collector

#endif  // CLICKTRAIL_COLLECTOR_HTTP_H_
