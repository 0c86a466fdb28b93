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

// Built-in jobs: word frequency count over whitespace-separated tokens, and
// total revenue per source IP over "|"-separated UserVisits rows
// (sourceIP|destIP|revnuSum|userAgent|searchWord|duration).

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"
#include "minimapred/task.hpp"

namespace minimapred::jobs {

inline constexpr std::string_view kWordcountMap = "wordcount.map";
inline constexpr std::string_view kWordcountReduce = "wordcount.reduce";
inline constexpr std::string_view kWordcountCombine = "wordcount.combine";
inline constexpr std::string_view kUservisitsMap = "uservisits.map";
inline constexpr std::string_view kUservisitsReduce = "uservisits.reduce";
// Partial sums per map task. Float addition is not associative, so this is
// only offered as an opt-in approximate mode.
inline constexpr std::string_view kUservisitsCombineApprox = "uservisits.combine";
inline constexpr std::string_view kSkippedCounter = "uservisits.skipped";

// --- wordcount ---------------------------------------------------------------

// Calls fn(token) for each maximal run of non-whitespace bytes.
template <typename Fn>
void for_each_token(std::string_view line, Fn&& fn) {
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && is_ascii_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < n && !is_ascii_space(line[i])) ++i;
    if (i > start) fn(line.substr(start, i - start));
  }
}

inline std::vector<std::pair<std::string, std::int64_t>> wordcount_map(std::uint64_t /*offset*/,
                                                                       std::string_view line) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  for_each_token(line, [&](std::string_view tok) { out.emplace_back(std::string(tok), 1); });
  return out;
}

inline std::pair<std::string, std::int64_t> wordcount_reduce(std::string_view token,
                                                             std::span<const std::string> counts) {
  std::int64_t sum = 0;
  for (const auto& c : counts) {
    auto v = parse_int64(c);
    if (!v) {
      throw JobError("wordcount: non-integer count '" + c + "' for token '" + std::string(token) + "'");
    }
    sum += *v;
  }
  return {std::string(token), sum};
}

// --- uservisits --------------------------------------------------------------

struct UserVisitRecord {
  std::string source_ip;    // <= 16 chars
  std::string dest_ip;      // <= 100 chars
  double revnu_sum = 0;
  std::string user_agent;   // <= 64 chars
  std::string search_word;  // <= 32 chars
  std::int64_t duration = 0;

  std::string to_line() const {
    char rev[32];
    std::snprintf(rev, sizeof(rev), "%.2f", revnu_sum);
    return source_ip + "|" + dest_ip + "|" + rev + "|" + user_agent + "|" + search_word + "|" +
           std::to_string(duration);
  }
};

// (sourceIP, revnuSum) from fields 0 and 2; nullopt for a line with fewer
// than three fields or a non-finite/unparseable field 2.
inline std::optional<std::pair<std::string_view, double>> uservisits_map(std::uint64_t /*offset*/,
                                                                         std::string_view line) {
  std::array<std::string_view, 3> fields;
  std::size_t found = 0;
  std::size_t start = 0;
  while (found < 3) {
    const auto bar = line.find('|', start);
    if (bar == std::string_view::npos) {
      fields[found++] = line.substr(start);
      break;
    }
    fields[found++] = line.substr(start, bar - start);
    start = bar + 1;
  }
  if (found < 3) return std::nullopt;
  auto rev = parse_double(fields[2]);
  if (!rev || !std::isfinite(*rev)) return std::nullopt;
  return std::make_pair(fields[0], *rev);
}

// Left-to-right sum in the order the values arrive.
inline double uservisits_reduce(std::span<const double> values) {
  double sum = 0;
  for (double v : values) sum += v;
  return sum;
}

inline double uservisits_reduce_text(std::string_view ip, std::span<const std::string> values) {
  double sum = 0;
  for (const auto& s : values) {
    auto v = parse_double(s);
    if (!v) throw JobError("uservisits: bad revenue '" + s + "' for '" + std::string(ip) + "'");
    sum += *v;
  }
  return sum;
}

// Deterministic synthetic UserVisits rows. Source IPs come from a pool of
// `ip_pool` addresses so keys repeat.
class UserVisitsGenerator {
 public:
  explicit UserVisitsGenerator(std::uint64_t seed, std::uint32_t ip_pool = 2048)
      : rng_(seed ^ 0x5553455256495354ull), ip_pool_(ip_pool == 0 ? 1 : ip_pool) {}

  UserVisitRecord next() {
    static constexpr std::array<std::string_view, 8> kAgents = {
        "Mozilla/5.0 (X11; Linux x86_64)", "Mozilla/5.0 (Windows NT 10.0)",
        "Mozilla/5.0 (Macintosh)",        "Opera/9.80", "curl/8.1", "Wget/1.21",
        "Googlebot/2.1",                   "Mozilla/5.0 (iPhone; CPU OS 17)"};
    static constexpr std::array<std::string_view, 10> kWords = {
        "widget", "gadget", "shoes", "laptop", "coffee", "camera", "guitar", "lamp", "tent",
        "bicycle"};
    UserVisitRecord r;
    const std::uint64_t ip = splitmix64(rng_.below(ip_pool_) + 1);
    r.source_ip = std::to_string(10 + ip % 200) + "." + std::to_string((ip >> 8) % 256) + "." +
                  std::to_string((ip >> 16) % 256) + "." + std::to_string((ip >> 24) % 256);
    r.dest_ip = "site" + std::to_string(rng_.below(5000)) + ".example/p" + std::to_string(rng_.below(100000));
    r.revnu_sum = static_cast<double>(rng_.below(100000)) / 100.0;
    r.user_agent = std::string(kAgents[rng_.below(kAgents.size())]) + " UA-" +
                   std::to_string(rng_.below(1000));
    r.search_word = std::string(kWords[rng_.below(kWords.size())]);
    r.duration = static_cast<std::int64_t>(rng_.between(1, 600));
    return r;
  }

 private:
  Rng rng_;
  std::uint32_t ip_pool_;
};

inline std::string generate_uservisits(std::uint64_t rows, std::uint64_t seed) {
  UserVisitsGenerator gen(seed);
  std::string out;
  out.reserve(rows * 96);
  for (std::uint64_t i = 0; i < rows; ++i) {
    out.append(gen.next().to_line());
    out.push_back('\n');
  }
  return out;
}

// Rows until the next one would pass target_bytes.
inline std::string generate_uservisits_bytes(std::uint64_t target_bytes, std::uint64_t seed) {
  UserVisitsGenerator gen(seed);
  std::string out;
  out.reserve(target_bytes);
  for (;;) {
    std::string line = gen.next().to_line();
    if (out.size() + line.size() + 1 > target_bytes) break;
    out.append(line);
    out.push_back('\n');
  }
  return out;
}

inline FileMeta generate_uservisits(Dfs& dfs, std::string_view path, std::uint64_t rows,
                                    std::uint64_t seed) {
  return dfs.put_file(path, generate_uservisits(rows, seed));
}

// --- registration ------------------------------------------------------------

inline void register_builtin(Registry& reg) {
  reg.add_mapper(std::string(kWordcountMap), [](std::uint64_t, std::string_view line, Emitter& out) {
    for_each_token(line, [&](std::string_view tok) { out.emit(tok, "1"); });
  });
  const ReduceFn sum_counts = [](std::string_view key, std::span<const std::string> values,
                                 Emitter& out) {
    out.emit(key, std::to_string(wordcount_reduce(key, values).second));
  };
  reg.add_reducer(std::string(kWordcountReduce), sum_counts);
  reg.add_reducer(std::string(kWordcountCombine), sum_counts);

  reg.add_mapper(std::string(kUservisitsMap), [](std::uint64_t off, std::string_view line, Emitter& out) {
    auto kv = uservisits_map(off, line);
    if (!kv) {
      out.count(kSkippedCounter);
      return;
    }
    out.emit(kv->first, format_double(kv->second));
  });
  const ReduceFn sum_revenue = [](std::string_view key, std::span<const std::string> values,
                                  Emitter& out) {
    out.emit(key, format_double(uservisits_reduce_text(key, values)));
  };
  reg.add_reducer(std::string(kUservisitsReduce), sum_revenue);
  reg.add_reducer(std::string(kUservisitsCombineApprox), sum_revenue);
}

inline const Registry& builtin_registry() {
  static const Registry reg = [] {
    Registry r;
    register_builtin(r);
    return r;
  }();
  return reg;
}

struct JobOptions {
  std::uint32_t reducers = 2;
  bool combiner = true;  // wordcount: exact. uservisits: approximate mode.
};

inline JobSpec wordcount_spec(std::string job_id, std::string input, std::string output,
                              JobOptions o = {}) {
  JobSpec s;
  s.job_id = std::move(job_id);
  s.input_path = std::move(input);
  s.output_path = std::move(output);
  s.mapper_id = std::string(kWordcountMap);
  s.reducer_id = std::string(kWordcountReduce);
  if (o.combiner) s.combiner_id = std::string(kWordcountCombine);
  s.num_reducers = o.reducers;
  return s;
}

// Combiner off unless approximate partial sums are explicitly requested.
inline JobSpec uservisits_spec(std::string job_id, std::string input, std::string output,
                               std::uint32_t reducers = 2, bool approximate = false) {
  JobSpec s;
  s.job_id = std::move(job_id);
  s.input_path = std::move(input);
  s.output_path = std::move(output);
  s.mapper_id = std::string(kUservisitsMap);
  s.reducer_id = std::string(kUservisitsReduce);
  if (approximate) s.combiner_id = std::string(kUservisitsCombineApprox);
  s.num_reducers = reducers;
  return s;
}

// Parses part-file text ("key\tvalue\n" lines) into pairs, in file order.
inline std::vector<KeyValue> parse_part(std::string_view text) {
  std::vector<KeyValue> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw Error("malformed part line: " + std::string(line));
    out.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1))});
    pos = nl + 1;
  }
  return out;
}

}  // namespace minimapred::jobs
