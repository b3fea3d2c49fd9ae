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

// Shared test helpers: random generators, brute-force oracles, scratch
// directories and a child-process wrapper for the CLI binary.

#ifndef CLICKTRAIL_TESTS_TEST_SUPPORT_H_
#define CLICKTRAIL_TESTS_TEST_SUPPORT_H_

#include <signal.h>
#include <stdlib.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "clicktrail/event_model.h"

namespace clicktrail::testing {

inline constexpr std::string_view kExampleStream =
    "1630841029899#ready_demo.html; 1630841029900#load_demo.html; "
    "1630841031050#MyLink;";
inline constexpr std::string_view kExampleCanonical =
    "1630841029899#ready_demo.html;1630841029900#load_demo.html;"
    "1630841031050#MyLink;";

// Ten ids covering every event kind.
inline const std::vector<std::string>& id_alphabet() {
  static const std::vector<std::string> ids = {
      "ready_a.html", "load_a.html", "ready_b.html", "load_b.html", "MyLink",
      "MyLink1",      "MyLink2",     "Undefined",    "btn_ok",      "nav"};
  return ids;
}

// Random wire-safe id: 1..12 bytes from a mix of ASCII, whitespace,
// punctuation and UTF-8 multibyte sequences; never '#' or ';'.
inline std::string random_wire_id(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "a", "Z", "0", "9", "_", "-", ".", " ", "\t", "=", "?", "/", "&",
      "\"", ",", "ready_", "load_", "undefined", "\xC3\xA9", "\xE2\x82\xAC"};
  std::uniform_int_distribution<std::size_t> len(1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string id;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) id += pieces[pick(rng)];
  return id;
}

struct StreamGenOptions {
  std::size_t max_events = 100;
  bool alphabet_ids = true;        // false: random wire ids
  double invalid_ts_probability = 0.0;
};

inline EventStream random_stream(std::mt19937_64& rng,
                                 const StreamGenOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> len(0, opt.max_events);
  std::uniform_int_distribution<std::size_t> pick(0, id_alphabet().size() - 1);
  std::uniform_int_distribution<std::int64_t> ts(0, 4'000'000'000'000LL);
  std::bernoulli_distribution invalid(opt.invalid_ts_probability);
  EventStream s;
  const auto n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    Event e;
    e.id = opt.alphabet_ids ? id_alphabet()[pick(rng)] : random_wire_id(rng);
    e.timestamp = invalid(rng) ? Timestamp::invalid() : Timestamp::at(ts(rng));
    s.events.push_back(std::move(e));
  }
  return s;
}

// ---- Brute-force oracles. Deliberately naive and independent of the
// ---- library's scanning code.

inline std::size_t oracle_count_event(const EventStream& s,
                                      const std::string& id) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (s.events[i].id.size() == id.size() &&
        s.events[i].id.compare(0, id.size(), id) == 0) {
      ++n;
    }
  }
  return n;
}

// Joins ids with a unit separator and counts overlapping substring hits.
inline std::size_t oracle_count_pattern(const EventStream& s,
                                        const std::vector<std::string>& pattern) {
  const char kSep = '\x1f';
  std::string hay(1, kSep);
  for (const auto& e : s.events) hay += e.id + kSep;
  std::string needle(1, kSep);
  for (const auto& p : pattern) needle += p + kSep;
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

// nullopt when fewer occurrences exist; Timestamp may be invalid.
inline std::optional<Timestamp> oracle_nth_timestamp(const EventStream& s,
                                                     const std::string& id,
                                                     std::size_t occurrence) {
  std::vector<Timestamp> hits;
  for (const auto& e : s.events) {
    if (e.id == id) hits.push_back(e.timestamp);
  }
  if (occurrence == 0 || occurrence > hits.size()) return std::nullopt;
  return hits[occurrence - 1];
}

struct TwoPassStats {
  double mean = 0;
  double sd = 0;
};

inline TwoPassStats oracle_two_pass(const std::vector<double>& v) {
  long double sum = 0;
  for (double x : v) sum += x;
  const long double mean = sum / static_cast<long double>(v.size());
  long double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const long double var =
      v.size() > 1 ? ss / static_cast<long double>(v.size() - 1) : 0;
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(var))};
}

// Rescales `v` in place to the exact sample mean and sd requested.
inline void standardize(std::vector<double>& v, double mean, double sd) {
  const auto s = oracle_two_pass(v);
  for (double& x : v) x = mean + (x - s.mean) * (sd / s.sd);
}

// ---- Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "clicktrail-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// ---- `clicktrail serve` in a child process.
#ifdef CLICKTRAIL_BINARY
class ServeProcess {
 public:
  explicit ServeProcess(std::vector<std::string> extra_args) {
    int out_pipe[2];
    if (::pipe(out_pipe) != 0) throw std::runtime_error("pipe failed");
    pid_ = ::fork();
    if (pid_ < 0) throw std::runtime_error("fork failed");
    if (pid_ == 0) {
      ::dup2(out_pipe[1], STDOUT_FILENO);
      ::close(out_pipe[0]);
      ::close(out_pipe[1]);
      std::vector<std::string> args = {CLICKTRAIL_BINARY, "serve", "--bind",
                                       "127.0.0.1:0"};
      args.insert(args.end(), extra_args.begin(), extra_args.end());
      std::vector<char*> argv;
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      ::execv(argv[0], argv.data());
      ::_exit(127);
    }
    ::close(out_pipe[1]);
    out_ = ::fdopen(out_pipe[0], "r");
    char line[256] = {};
    if (std::fgets(line, sizeof(line), out_) == nullptr) {
      throw std::runtime_error("serve exited before listening");
    }
    const std::string text = line;
    const auto colon = text.rfind(':');
    port_ = std::stoi(text.substr(colon + 1));
  }

  ~ServeProcess() { stop(SIGTERM); }

  int port() const { return port_; }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  // Returns the exit status, or -signal if killed by one.
  int stop(int sig) {
    if (pid_ <= 0) return status_;
    ::kill(pid_, sig);
    int wstatus = 0;
    ::waitpid(pid_, &wstatus, 0);
    pid_ = -1;
    if (out_) std::fclose(out_);
    out_ = nullptr;
    status_ = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -WTERMSIG(wstatus);
    return status_;
  }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  int port_ = 0;
  int status_ = 0;
};
#endif

}  // namespace clicktrail::testing

#endif  // CLICKTRAIL_TESTS_TEST_SUPPORT_H_
