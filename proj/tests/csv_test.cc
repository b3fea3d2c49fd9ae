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

#include "clicktrail/csv.h"

#include <gtest/gtest.h>

#include "test_support.h"

namespace clicktrail::csv {
namespace {

TEST(Csv, QuotedFieldsAndLineEndings) {
  const auto rows = parse("a,\"b,c\",\"d\"\"e\"\r\n1,\"multi\nline\",\r\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (Row{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rows[1], (Row{"1", "multi\nline", ""}));
}

TEST(Csv, ByteOrderMarkIsSkipped) {
  const auto t = parse_table("\xEF\xBB\xBFResponseId,eventStream\nR_1,1#A;\n");
  EXPECT_EQ(t.header[0], "ResponseId");
  EXPECT_EQ(t.column("eventStream"), 1u);
}

TEST(Csv, NoTrailingNewline) {
  const auto rows = parse("x,y\n1,2");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (Row{"1", "2"}));
}

TEST(Csv, UnterminatedQuoteIsAnError) {
  EXPECT_THROW(parse("a,\"b\n"), CsvError);
}

TEST(Csv, ShortRowsArePaddedLongRowsRejected) {
  const auto t = parse_table("a,b,c\n1\n");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0], (Row{"1", "", ""}));
  EXPECT_THROW(parse_table("a,b\n1,2,3\n"), CsvError);
}

TEST(Csv, HeaderOnly) {
  const auto t = parse_table("a,b\n");
  EXPECT_EQ(t.header, (Row{"a", "b"}));
  EXPECT_TRUE(t.rows.empty());
  EXPECT_TRUE(parse_table("").header.empty());
}

TEST(Csv, TabDelimiter) {
  const auto t = parse_table("a\tb\n1,2\t3\n", '\t');
  EXPECT_EQ(t.rows[0], (Row{"1,2", "3"}));
  EXPECT_EQ(format_row({"x\ty", "z"}, '\t'), "\"x\ty\"\tz");
}

TEST(Csv, QuoteOnlyWhenNeeded) {
  EXPECT_EQ(quote_field("plain"), "plain");
  EXPECT_EQ(quote_field("1#A; 2#B;"), "1#A; 2#B;");
  EXPECT_EQ(quote_field("a,b"), "\"a,b\"");
  EXPECT_EQ(quote_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, FormatParseRoundTrip) {
  std::mt19937_64 rng(41);
  const std::vector<std::string> pieces = {"a", ",", "\"", "\n", "\r\n", " ",
                                           "\t", "#", ";", "\xC3\xA9", ""};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::uniform_int_distribution<std::size_t> len(0, 5);
  for (int i = 0; i < 500; ++i) {
    Table t;
    t.header = {"h1", "h2", "h3"};
    for (int r = 0; r < 5; ++r) {
      Row row;
      for (int c = 0; c < 3; ++c) {
        std::string cell;
        for (auto n = len(rng); n > 0; --n) cell += pieces[pick(rng)];
        row.push_back(cell);
      }
      t.rows.push_back(row);
    }
    const auto back = parse_table(format_table(t));
    ASSERT_EQ(back.header, t.header);
    ASSERT_EQ(back.rows, t.rows);
  }
}

TEST(Csv, FileRoundTripAndMissingFile) {
  testing::TempDir dir;
  Table t{{"a", "b"}, {{"1", "x,y"}, {"2", ""}}};
  write_table(dir / "t.csv", t);
  const auto back = read_table(dir / "t.csv");
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_THROW(read_table(dir / "missing.csv"), IoError);
  EXPECT_THROW(write_table(dir / "no/such/dir/t.csv", t), IoError);
}

}  // namespace
}  // namespace clicktrail::csv
