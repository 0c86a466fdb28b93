// Copyright 2026 The minimapred Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "minimapred.hpp"
#include "oracle.hpp"
#include "test_support.hpp"

namespace minimapred {
namespace {

using testing_util::Gen;
using testing_util::read_parts;

using Pairs = std::vector<std::pair<std::string, std::int64_t>>;

TEST(WordcountMapTest, Examples) {
  EXPECT_EQ(jobs::wordcount_map(0, "Algorithm Accent Ajax"),
            (Pairs{{"Algorithm", 1}, {"Accent", 1}, {"Ajax", 1}}));
  EXPECT_TRUE(jobs::wordcount_map(0, "").empty());
  EXPECT_EQ(jobs::wordcount_map(0, "x x x"), (Pairs{{"x", 1}, {"x", 1}, {"x", 1}}));
  EXPECT_EQ(jobs::wordcount_map(0, " \t a\tb  \r"), (Pairs{{"a", 1}, {"b", 1}}));
}

TEST(WordcountReduceTest, Examples) {
  const std::vector<std::string> two = {"1", "1"};
  EXPECT_EQ(jobs::wordcount_reduce("Algorithm", two), (std::pair<std::string, std::int64_t>{"Algorithm", 2}));
  const std::vector<std::string> one = {"1"};
  EXPECT_EQ(jobs::wordcount_reduce("Ajax", one), (std::pair<std::string, std::int64_t>{"Ajax", 1}));
  const std::vector<std::string> bad = {"1", "x"};
  EXPECT_THROW(jobs::wordcount_reduce("k", bad), JobError);
}

TEST(UservisitsMapTest, Examples) {
  auto kv = jobs::uservisits_map(0, "10.0.0.1|shop.example/p7|3.50|UA-1|widget|12");
  ASSERT_TRUE(kv.has_value());
  EXPECT_EQ(kv->first, "10.0.0.1");
  EXPECT_DOUBLE_EQ(kv->second, 3.50);
  kv = jobs::uservisits_map(0, "a|b|0|c|d|0");
  ASSERT_TRUE(kv.has_value());
  EXPECT_EQ(kv->first, "a");
  EXPECT_EQ(kv->second, 0.0);
  EXPECT_FALSE(jobs::uservisits_map(0, "a|b").has_value());
  EXPECT_FALSE(jobs::uservisits_map(0, "a|b|notanumber|c").has_value());
  EXPECT_FALSE(jobs::uservisits_map(0, "").has_value());
  EXPECT_TRUE(jobs::uservisits_map(0, "a|b|1.5").has_value());
}

TEST(UservisitsReduceTest, Examples) {
  const std::vector<double> v = {3.50, 1.25};
  EXPECT_DOUBLE_EQ(jobs::uservisits_reduce(v), 4.75);
  const std::vector<double> single = {0.1};
  EXPECT_EQ(jobs::uservisits_reduce(single), 0.1);
  const std::vector<std::string> text = {"3.5", "1.25"};
  EXPECT_DOUBLE_EQ(jobs::uservisits_reduce_text("ip", text), 4.75);
}

TEST(UservisitsJobTest, SkipsMalformedLinesAndCountsThem) {
  Dfs dfs(ClusterConfig{3, 64, 2, 1});
  const std::string text = "a|x|1.5|u|w|1\nbroken\nb|y|2|u|w|1\nalso|broken\na|z|0.25|u|w|3\n";
  dfs.put_file("/uv", text);
  const auto r = submit_job(dfs, jobs::uservisits_spec("uv", "/uv", "/out", 1), jobs::builtin_registry());
  std::map<std::string, std::string> parsed;
  ASSERT_TRUE(oracle::parse_parts(read_parts(dfs, r), parsed));
  EXPECT_EQ(parsed, (std::map<std::string, std::string>{{"a", "1.75"}, {"b", "2"}}));
  EXPECT_EQ(r.counters.at(std::string(jobs::kSkippedCounter)), 2);
}

TEST(GenerateUservisitsTest, ZeroRowsAndDeterminism) {
  EXPECT_EQ(jobs::generate_uservisits(0, 1), "");
  EXPECT_EQ(jobs::generate_uservisits(500, 9), jobs::generate_uservisits(500, 9));
  EXPECT_NE(jobs::generate_uservisits(500, 9), jobs::generate_uservisits(500, 10));
  Dfs dfs(ClusterConfig{2, 1024, 1, 1});
  const FileMeta m = jobs::generate_uservisits(dfs, "/uv", 0, 3);
  EXPECT_EQ(m.size, 0u);
}

TEST(GenerateUservisitsTest, EveryRowParsesAndFieldsFit) {
  const std::string text = jobs::generate_uservisits(5000, 42);
  const auto lines = oracle::lines(text);
  ASSERT_EQ(lines.size(), 5000u);
  std::set<std::string> ips;
  for (const auto& line : lines) {
    auto kv = jobs::uservisits_map(0, line);
    ASSERT_TRUE(kv.has_value()) << line;
    ips.insert(std::string(kv->first));
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto bar = line.find('|', start);
      fields.push_back(line.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    ASSERT_EQ(fields.size(), 6u);
    EXPECT_LE(fields[0].size(), 16u);
    EXPECT_LE(fields[1].size(), 100u);
    EXPECT_LE(fields[3].size(), 64u);
    EXPECT_LE(fields[4].size(), 32u);
  }
  // Keys repeat, which is what makes the aggregation meaningful.
  EXPECT_LT(ips.size(), 2500u);
  EXPECT_GT(ips.size(), 100u);

  Dfs dfs(ClusterConfig{3, 32 * 1024, 2, 1});
  dfs.put_file("/uv", text);
  const auto r = submit_job(dfs, jobs::uservisits_spec("uv", "/uv", "/out", 2), jobs::builtin_registry());
  EXPECT_FALSE(r.counters.contains(std::string(jobs::kSkippedCounter)));
}

TEST(GenerateUservisitsTest, ByteTarget) {
  const std::string text = jobs::generate_uservisits_bytes(100000, 3);
  EXPECT_LE(text.size(), 100000u);
  EXPECT_GT(text.size(), 99000u);
  EXPECT_EQ(text.back(), '\n');
}

TEST(GenerateTokensTest, Basics) {
  EXPECT_EQ(bench::generate_tokens(0, 100, 1), "");
  EXPECT_EQ(bench::generate_tokens(50000, 100, 5), bench::generate_tokens(50000, 100, 5));
  const std::string one = bench::generate_tokens(20000, 1, 5);
  EXPECT_EQ(oracle::word_counts(one).size(), 1u);
  const std::string t = bench::generate_tokens(1 << 20, 10000, 42);
  EXPECT_LE(t.size(), 1u << 20);
  EXPECT_GT(t.size(), (1u << 20) - 16);
  EXPECT_EQ(t.back(), '\n');
  for (const auto& line : oracle::lines(t)) EXPECT_LE(line.size(), 4096u);
  EXPECT_GT(oracle::word_counts(t).size(), 5000u);
  EXPECT_THROW(bench::generate_tokens(10, 0, 1), InvalidConfig);
}

TEST(WordcountJobTest, OneMegabyteMatchesOracle) {
  const std::string text = bench::generate_tokens(1 << 20, 10000, 42);
  for (std::uint32_t reducers : {1u, 3u}) {
    Dfs dfs(ClusterConfig{4, 128 * 1024, 2, 42});
    dfs.put_file("/in", text);
    const auto r = submit_job(dfs, jobs::wordcount_spec("wc", "/in", "/out", {reducers, true}),
                              jobs::builtin_registry());
    std::map<std::string, std::string> parsed;
    ASSERT_TRUE(oracle::parse_parts(read_parts(dfs, r), parsed));
    const auto expected = oracle::word_counts(text);
    ASSERT_EQ(parsed.size(), expected.size());
    for (const auto& [k, v] : expected) ASSERT_EQ(parsed.at(k), std::to_string(v)) << k;
  }
}

TEST(UservisitsJobTest, MatchesOracleWithinRelativeTolerance) {
  const std::string text = jobs::generate_uservisits(50000, 11);
  Dfs dfs(ClusterConfig{4, 256 * 1024, 2, 42});
  dfs.put_file("/uv", text);
  const auto r = submit_job(dfs, jobs::uservisits_spec("uv", "/uv", "/out", 3), jobs::builtin_registry());
  std::map<std::string, std::string> parsed;
  ASSERT_TRUE(oracle::parse_parts(read_parts(dfs, r), parsed));
  const auto expected = oracle::revenue_by_ip(text);
  ASSERT_EQ(parsed.size(), expected.size());
  for (const auto& [ip, sum] : expected) {
    const double got = std::stod(parsed.at(ip));
    ASSERT_LE(std::abs(got - sum), 1e-9 * std::max(1.0, std::abs(sum))) << ip;
  }
}

TEST(UservisitsJobTest, ApproximateModeStaysClose) {
  const std::string text = jobs::generate_uservisits(20000, 12);
  Dfs dfs(ClusterConfig{4, 64 * 1024, 2, 42});
  dfs.put_file("/uv", text);
  const auto r =
      submit_job(dfs, jobs::uservisits_spec("uv", "/uv", "/out", 2, true), jobs::builtin_registry());
  std::map<std::string, std::string> parsed;
  ASSERT_TRUE(oracle::parse_parts(read_parts(dfs, r), parsed));
  const auto expected = oracle::revenue_by_ip(text);
  ASSERT_EQ(parsed.size(), expected.size());
  for (const auto& [ip, sum] : expected) {
    EXPECT_NEAR(std::stod(parsed.at(ip)), sum, 1e-6 * std::max(1.0, sum)) << ip;
  }
}

TEST(JobSpecTest, BuiltinIds) {
  const auto wc = jobs::wordcount_spec("a", "/i", "/o");
  EXPECT_EQ(wc.combiner_id, std::optional<std::string>("wordcount.combine"));
  EXPECT_EQ(wc.num_reducers, 2u);
  EXPECT_FALSE(jobs::wordcount_spec("a", "/i", "/o", {1, false}).combiner_id.has_value());
  EXPECT_FALSE(jobs::uservisits_spec("a", "/i", "/o").combiner_id.has_value());
  const auto& reg = jobs::builtin_registry();
  EXPECT_NE(reg.mapper("uservisits.map"), nullptr);
  EXPECT_NE(reg.reducer("uservisits.reduce"), nullptr);
  EXPECT_EQ(reg.mapper("nope"), nullptr);
}

TEST(ParsePartTest, RoundTrip) {
  std::vector<KeyValue> pairs = {{"a", "1"}, {"b", "x y"}};
  EXPECT_EQ(jobs::parse_part(Dfs::format_pairs(pairs)), pairs);
  EXPECT_TRUE(jobs::parse_part("").empty());
  EXPECT_THROW(jobs::parse_part("no tab\n"), Error);
}

}  // namespace
}  // namespace minimapred
