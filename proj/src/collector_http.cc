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

#include "clicktrail/collector_http.h"

#include <algorithm>
#include <charconv>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <nlohmann/json.hpp>

#include "clicktrail/stream_parser.h"

namespace clicktrail::collector {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxBodyBytes = 64 * 1024;
constexpr std::size_t kWorkerThreads = 64;

void send_error(httplib::Response& res, ErrorCode code,
                const std::string& detail) {
  res.status = http_status(code);
  res.set_content(json{{"error", to_string(code)}, {"detail", detail}}.dump(),
                  "application/json");
}

Timestamp timestamp_from_text(std::string_view text) {
  if (text == kInvalidTimestampLiteral) return Timestamp::invalid();
  std::int64_t ms = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), ms);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      ms < 0) {
    throw CollectorError(ErrorCode::kInvalidTimestamp,
                         "ts must be a non-negative integer or \"undefined\"");
  }
  return Timestamp::at(ms);
}

Timestamp timestamp_from_json(const json& ts) {
  if (ts.is_number_unsigned()) {
    const auto v = ts.get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(INT64_MAX)) {
      throw CollectorError(ErrorCode::kInvalidTimestamp, "ts out of range");
    }
    return Timestamp::at(static_cast<std::int64_t>(v));
  }
  if (ts.is_number_integer()) {
    const auto v = ts.get<std::int64_t>();
    if (v < 0) {
      throw CollectorError(ErrorCode::kInvalidTimestamp,
                           "ts must be non-negative");
    }
    return Timestamp::at(v);
  }
  if (ts.is_string() && ts.get<std::string>() == kInvalidTimestampLiteral) {
    return Timestamp::invalid();
  }
  throw CollectorError(ErrorCode::kInvalidTimestamp,
                       "ts must be a non-negative integer or \"undefined\"");
}

std::string require_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw CollectorError(ErrorCode::kBadRequest,
                         std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

bool origin_allowed(const std::vector<std::string>& allowed,
                    const std::string& origin) {
  return std::any_of(allowed.begin(), allowed.end(), [&](const std::string& o) {
    return o == "*" || o == origin;
  });
}

// Runs `handler`, turning CollectorError into the JSON error body.
template <class F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const CollectorError& e) {
    send_error(res, e.code(), e.what());
  } catch (const std::exception& e) {
    send_error(res, ErrorCode::kStorage, e.what());
  }
}

}  // namespace

struct CollectorServer::Impl {
  SessionStore& store;
  CollectorConfig config;
  httplib::Server server;

  Impl(SessionStore& s, CollectorConfig c) : store(s), config(std::move(c)) {}

  void install_routes();
  void accept_event(httplib::Response& res, const std::string& session,
                    const std::string& id, Timestamp ts);
};

void CollectorServer::Impl::accept_event(httplib::Response& res,
                                         const std::string& session,
                                         const std::string& id, Timestamp ts) {
  const auto count = store.post_event(session, id, ts);
  res.set_content(json{{"accepted", true}, {"count", count}}.dump(),
                  "application/json");
}

void CollectorServer::Impl::install_routes() {
  server.new_task_queue = [] { return new httplib::ThreadPool(kWorkerThreads); };
  server.set_payload_max_length(kMaxBodyBytes);
  server.set_tcp_nodelay(true);
  // SO_REUSEADDR only; no port sharing.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  server.set_pre_routing_handler(
      [this](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_header("Origin")) return httplib::Server::HandlerResponse::Unhandled;
        const auto origin = req.get_header_value("Origin");
        if (!origin_allowed(config.allowed_origins, origin)) {
          send_error(res, ErrorCode::kOriginNotAllowed,
                     "origin '" + origin + "' is not allowed");
          return httplib::Server::HandlerResponse::Handled;
        }
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Vary", "Origin");
        return httplib::Server::HandlerResponse::Unhandled;
      });

  server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });

  server.Post("/session", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      res.status = 201;
      res.set_content(json{{"session", store.create_session()}}.dump(),
                      "application/json");
    });
  });

  // Content-Type is not checked: sendBeacon posts JSON as text/plain.
  server.Post("/event", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object()) {
        throw CollectorError(ErrorCode::kBadRequest, "body must be a JSON object");
      }
      const auto session = require_string(body, "session");
      auto id_it = body.find("id");
      if (id_it == body.end() || !id_it->is_string()) {
        throw CollectorError(ErrorCode::kInvalidEventId,
                             "missing string field 'id'");
      }
      auto ts_it = body.find("ts");
      if (ts_it == body.end()) {
        throw CollectorError(ErrorCode::kInvalidTimestamp, "missing field 'ts'");
      }
      accept_event(res, session, id_it->get<std::string>(),
                   timestamp_from_json(*ts_it));
    });
  });

  server.Get("/event", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      for (const char* key : {"session", "id", "ts"}) {
        if (!req.has_param(key)) {
          throw CollectorError(ErrorCode::kBadRequest,
                               std::string("missing query parameter '") + key + "'");
        }
      }
      accept_event(res, req.get_param_value("session"),
                   req.get_param_value("id"),
                   timestamp_from_text(req.get_param_value("ts")));
    });
  });

  server.Get(R"(/stream/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 res.set_content(store.get_stream(req.matches[1]),
                                 "text/plain; charset=utf-8");
               });
             });

  server.Post(R"(/finalize/([^/]+))",
              [this](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  res.set_content(store.finalize_session(req.matches[1]),
                                  "text/plain; charset=utf-8");
                });
              });

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(json{{"error", to_string(ErrorCode::kBadRequest)},
                         {"detail", "no route for " + req.method + " " + req.path}}
                        .dump(),
                    "application/json");
  });

  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

CollectorServer::CollectorServer(SessionStore& store, CollectorConfig config)
    : impl_(std::make_unique<Impl>(store, std::move(config))) {
  impl_->install_routes();
}

CollectorServer::~CollectorServer() { stop(); }

bool CollectorServer::bind() {
  const auto addr = parse_bind_address(impl_->config.bind_address);
  if (addr.port == 0) {
    port_ = impl_->server.bind_to_any_port(addr.host);
  } else {
    port_ = impl_->server.bind_to_port(addr.host, addr.port) ? addr.port : -1;
  }
  return port_ > 0;
}

void CollectorServer::listen() { impl_->server.listen_after_bind(); }

void CollectorServer::start() {
  thread_ = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
}

void CollectorServer::stop() {
  if (impl_) impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

struct CollectorClient::Impl {
  httplib::Client client;
  explicit Impl(const std::string& base_url) : client(base_url) {
    client.set_keep_alive(true);
    client.set_tcp_nodelay(true);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
  }

  // Throws on transport failure or a non-2xx status.
  static httplib::Response check(const httplib::Result& result) {
    if (!result) {
      throw CollectorError(ErrorCode::kStorage,
                           "transport failure: " + httplib::to_string(result.error()));
    }
    const auto& res = *result;
    if (res.status >= 200 && res.status < 300) return res;
    const auto body = json::parse(res.body, nullptr, false);
    ErrorCode code = ErrorCode::kBadRequest;
    std::string detail = "HTTP " + std::to_string(res.status);
    if (body.is_object()) {
      if (auto it = body.find("error"); it != body.end() && it->is_string()) {
        code = parse_error_code(it->get<std::string>()).value_or(code);
      }
      if (auto it = body.find("detail"); it != body.end() && it->is_string()) {
        detail = it->get<std::string>();
      }
    }
    throw CollectorError(code, detail);
  }
};

CollectorClient::CollectorClient(const std::string& base_url)
    : impl_(std::make_unique<Impl>(base_url)) {}

CollectorClient::~CollectorClient() = default;

std::string CollectorClient::create_session() {
  const auto res = Impl::check(impl_->client.Post("/session"));
  return json::parse(res.body).at("session").get<std::string>();
}

std::size_t CollectorClient::post_event(const std::string& session_id,
                                        const std::string& event_id,
                                        Timestamp timestamp) {
  json body{{"session", session_id}, {"id", event_id}};
  if (timestamp.valid()) {
    body["ts"] = timestamp.millis();
  } else {
    body["ts"] = kInvalidTimestampLiteral;
  }
  const auto res = Impl::check(
      impl_->client.Post("/event", body.dump(), "application/json"));
  return json::parse(res.body).at("count").get<std::size_t>();
}

std::size_t CollectorClient::post_event_beacon(const std::string& session_id,
                                               const std::string& event_id,
                                               Timestamp timestamp) {
  httplib::Params params{
      {"session", session_id},
      {"id", event_id},
      {"ts", timestamp.valid() ? std::to_string(timestamp.millis())
                               : std::string(kInvalidTimestampLiteral)}};
  const auto res =
      Impl::check(impl_->client.Get("/event", params, httplib::Headers{}));
  return json::parse(res.body).at("count").get<std::size_t>();
}

std::string CollectorClient::get_stream(const std::string& session_id) {
  return Impl::check(impl_->client.Get("/stream/" + session_id)).body;
}

std::string CollectorClient::finalize_session(const std::string& session_id) {
  return Impl::check(impl_->client.Post("/finalize/" + session_id)).body;
}

}  // namespace clicktrail::collector
