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

#ifndef CLICKTRAIL_CLI_H_
#define CLICKTRAIL_CLI_H_

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clicktrail/event_model.h"

namespace clicktrail::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFindings = 1,
  kExitUsage = 2,
  kExitIo = 3,
};

// One per-record expression of `analyze`.
struct Expression {
  enum class Kind { kCountEvent, kCountPattern, kTimestamp, kInterval, kDwell };
  Kind kind = Kind::kCountEvent;
  std::string text;                 // as given, used as the column name
  std::vector<std::string> ids;     // event ids in argument order
  std::vector<std::size_t> occurrences;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Grammar:
//   countEvent ID
//   countPattern ID1,ID2,...      (alias: countEventPattern)
//   timestamp ID N
//   interval IDa,Na,IDb,Nb
//   dwell
// Throws UsageError on anything else.
Expression parse_expression(std::string_view text);

// Evaluates one expression on one stream. Lookup failures render as "NA";
// dwell renders the dwell times separated by spaces.
std::string evaluate(const Expression& expr, const EventStream& stream,
                     bool gaps_allowed);

// Entry point; args exclude the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace clicktrail::cli

#endif  // CLICKTRAIL_CLI_H_
