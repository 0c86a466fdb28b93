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

#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace minimapred {

using NodeId = std::uint32_t;
using Tick = std::uint64_t;

inline constexpr std::uint64_t kKiB = 1024;
inline constexpr std::uint64_t kMiB = 1024 * kKiB;
inline constexpr std::uint64_t kGiB = 1024 * kMiB;

// ---------------------------------------------------------------------------
// Errors. Everything user-visible derives from Error; ContractViolation marks
// internal misuse (e.g. feeding an unsorted stream to the grouper).

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& what) : Error("not found: " + what) {}
};

class AlreadyExists : public Error {
 public:
  explicit AlreadyExists(const std::string& what) : Error("already exists: " + what) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& what) : Error("invalid config: " + what) {}
};

class ChunkUnavailable : public Error {
 public:
  ChunkUnavailable(std::string path, std::uint64_t chunk_index)
      : Error("chunk unavailable: " + path + " chunk " + std::to_string(chunk_index)),
        path_(std::move(path)),
        chunk_index_(chunk_index) {}

  const std::string& path() const { return path_; }
  std::uint64_t chunk_index() const { return chunk_index_; }

 private:
  std::string path_;
  std::uint64_t chunk_index_;
};

class UnknownFunction : public Error {
 public:
  explicit UnknownFunction(const std::string& id) : Error("unknown function: " + id) {}
};

class UnknownInput : public Error {
 public:
  explicit UnknownInput(const std::string& path) : Error("unknown input: " + path) {}
};

class InvalidPlan : public Error {
 public:
  explicit InvalidPlan(const std::string& what) : Error("invalid failure plan: " + what) {}
};

class ReportError : public Error {
 public:
  explicit ReportError(const std::string& what) : Error("report error: " + what) {}
};

// Raised by user map/reduce functions on bad input.
class JobError : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Intermediate and output pairs. Keys order bytewise (std::string compares
// as unsigned char).
struct KeyValue {
  std::string key;
  std::string value;

  auto operator<=>(const KeyValue&) const = default;
};

// ---------------------------------------------------------------------------
// Task identity: "map-3", "reduce-0".

enum class TaskKind : std::uint8_t { kMap, kReduce };

struct TaskId {
  TaskKind kind = TaskKind::kMap;
  std::uint32_t index = 0;

  static TaskId map(std::uint32_t i) { return {TaskKind::kMap, i}; }
  static TaskId reduce(std::uint32_t i) { return {TaskKind::kReduce, i}; }

  std::string to_string() const {
    return (kind == TaskKind::kMap ? "map-" : "reduce-") + std::to_string(index);
  }

  static std::optional<TaskId> parse(std::string_view s) {
    TaskKind kind;
    if (s.starts_with("map-")) {
      kind = TaskKind::kMap;
      s.remove_prefix(4);
    } else if (s.starts_with("reduce-")) {
      kind = TaskKind::kReduce;
      s.remove_prefix(7);
    } else {
      return std::nullopt;
    }
    std::uint32_t index = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), index);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return TaskId{kind, index};
  }

  auto operator<=>(const TaskId&) const = default;
};

class ShuffleSourceLost : public Error {
 public:
  ShuffleSourceLost(TaskId source, NodeId node)
      : Error("shuffle source lost: " + source.to_string() + " on node " + std::to_string(node)),
        source_(source),
        node_(node) {}

  TaskId source() const { return source_; }
  NodeId node() const { return node_; }

 private:
  TaskId source_;
  NodeId node_;
};

class AttemptsExhausted : public Error {
 public:
  explicit AttemptsExhausted(TaskId task)
      : Error("task " + task.to_string() + " exceeded max attempts"), task_(task) {}
  TaskId task() const { return task_; }

 private:
  TaskId task_;
};

// ---------------------------------------------------------------------------
// Hashing and randomness.

inline constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Small, fast and platform-independent generator (xoshiro256**). The standard
// distributions are implementation-defined, so generators in this project
// draw from this directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) {
      x = splitmix64(x);
      s = x;
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  std::uint64_t operator()() { return next(); }
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

inline std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Value text encoding: counts as decimal integers, floats as the shortest
// decimal string that round-trips.

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.starts_with('+')) s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int64(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Accepts plain byte counts and K/M/G (binary) suffixes: "128M", "4096", "2G".
inline std::optional<std::uint64_t> parse_size(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t mult = 1;
  switch (s.back()) {
    case 'k': case 'K': mult = kKiB; break;
    case 'm': case 'M': mult = kMiB; break;
    case 'g': case 'G': mult = kGiB; break;
    default: break;
  }
  if (mult != 1) s.remove_suffix(1);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v * mult;
}

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

}  // namespace minimapred
