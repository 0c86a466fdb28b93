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

// Sorted runs of key/value pairs: the on-store encoding, a streaming reader,
// a k-way merger and a streaming group-by-key.
//
// Encoding: a sequence of <varint key_len><key><varint value_len><value>.

#pragma once

#include <algorithm>
#include <cstring>
#include <memory>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"

namespace minimapred {

class RunWriter {
 public:
  void append(std::string_view key, std::string_view value) {
    put_varint(key.size());
    buf_.append(key);
    put_varint(value.size());
    buf_.append(value);
    ++records_;
  }

  std::uint64_t records() const { return records_; }
  std::size_t bytes() const { return buf_.size(); }
  std::string take() {
    records_ = 0;
    return std::move(buf_);
  }

 private:
  void put_varint(std::uint64_t v) {
    while (v >= 0x80) {
      buf_.push_back(static_cast<char>((v & 0x7f) | 0x80));
      v >>= 7;
    }
    buf_.push_back(static_cast<char>(v));
  }

  std::string buf_;
  std::uint64_t records_ = 0;
};

// Streams pairs out of a ByteSource through a fixed buffer, so memory use is
// independent of run length.
class RunReader {
 public:
  explicit RunReader(std::unique_ptr<ByteSource> src, std::size_t buffer_size = 64 * kKiB)
      : src_(std::move(src)), buf_(buffer_size) {}

  // Advances to the next pair; false at end of run.
  bool next() {
    std::uint64_t klen = 0;
    if (!read_varint(klen, /*allow_eof=*/true)) return false;
    read_bytes(key_, klen);
    std::uint64_t vlen = 0;
    read_varint(vlen, /*allow_eof=*/false);
    read_bytes(value_, vlen);
    return true;
  }

  const std::string& key() const { return key_; }
  const std::string& value() const { return value_; }

 private:
  bool fill() {
    if (pos_ < len_) return true;
    len_ = src_->read(buf_.data(), buf_.size());
    pos_ = 0;
    return len_ > 0;
  }

  bool read_varint(std::uint64_t& out, bool allow_eof) {
    out = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (!fill()) {
        if (allow_eof && shift == 0) return false;
        throw Error("truncated run");
      }
      const auto byte = static_cast<unsigned char>(buf_[pos_++]);
      out |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
      if (!(byte & 0x80)) return true;
    }
    throw Error("corrupt run varint");
  }

  void read_bytes(std::string& out, std::uint64_t n) {
    out.clear();
    while (n > 0) {
      if (!fill()) throw Error("truncated run");
      const std::size_t take = std::min<std::uint64_t>(n, len_ - pos_);
      out.append(buf_.data() + pos_, take);
      pos_ += take;
      n -= take;
    }
  }

  std::unique_ptr<ByteSource> src_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  std::string key_;
  std::string value_;
};

inline std::vector<KeyValue> read_run(std::unique_ptr<ByteSource> src) {
  std::vector<KeyValue> out;
  RunReader reader(std::move(src));
  while (reader.next()) out.push_back({reader.key(), reader.value()});
  return out;
}

inline std::string encode_run(std::span<const KeyValue> pairs) {
  RunWriter w;
  for (const auto& kv : pairs) w.append(kv.key, kv.value);
  return w.take();
}

// k-way merge of key-sorted runs. Output is ordered by key, then by source
// index, then by position within the source, which makes it a deterministic
// function of the inputs.
class MergeStream {
 public:
  explicit MergeStream(std::vector<std::unique_ptr<RunReader>> sources)
      : sources_(std::move(sources)) {
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      if (sources_[i]->next()) heap_.push(i);
    }
  }

  // The heap comparator points at sources_.
  MergeStream(const MergeStream&) = delete;
  MergeStream& operator=(const MergeStream&) = delete;

  bool next() {
    if (current_ != kNone) {
      if (sources_[current_]->next()) heap_.push(current_);
      current_ = kNone;
    }
    if (heap_.empty()) return false;
    current_ = heap_.top();
    heap_.pop();
    return true;
  }

  const std::string& key() const { return sources_[current_]->key(); }
  const std::string& value() const { return sources_[current_]->value(); }
  std::size_t source() const { return current_; }

 private:
  static constexpr std::size_t kNone = ~std::size_t{0};

  struct Later {
    const std::vector<std::unique_ptr<RunReader>>* sources;
    bool operator()(std::size_t a, std::size_t b) const {
      const int c = (*sources)[a]->key().compare((*sources)[b]->key());
      if (c != 0) return c > 0;
      return a > b;
    }
  };

  std::vector<std::unique_ptr<RunReader>> sources_;
  std::priority_queue<std::size_t, std::vector<std::size_t>, Later> heap_{Later{&sources_}};
  std::size_t current_ = kNone;
};

// Stream adapter over an in-memory pair list.
class VectorStream {
 public:
  explicit VectorStream(std::span<const KeyValue> pairs) : pairs_(pairs) {}
  bool next() { return ++pos_ <= pairs_.size(); }
  const std::string& key() const { return pairs_[pos_ - 1].key; }
  const std::string& value() const { return pairs_[pos_ - 1].value; }

 private:
  std::span<const KeyValue> pairs_;
  std::size_t pos_ = 0;
};

// Streaming group-by-key over any key-sorted stream exposing next()/key()/
// value(). Holds one group at a time. Throws ContractViolation if the input
// goes backwards.
template <typename Stream>
class GroupReader {
 public:
  explicit GroupReader(Stream& in) : in_(in) { has_pending_ = in_.next(); }

  bool next_group() {
    if (!has_pending_) return false;
    key_ = in_.key();
    values_.clear();
    values_.emplace_back(in_.value());
    while ((has_pending_ = in_.next())) {
      const int c = std::string_view(in_.key()).compare(key_);
      if (c < 0) {
        throw ContractViolation("group_by_key: input not sorted at key '" +
                                std::string(in_.key()) + "'");
      }
      if (c > 0) break;
      values_.emplace_back(in_.value());
    }
    return true;
  }

  const std::string& key() const { return key_; }
  std::span<const std::string> values() const { return values_; }

 private:
  Stream& in_;
  bool has_pending_ = false;
  std::string key_;
  std::vector<std::string> values_;
};

struct Group {
  std::string key;
  std::vector<std::string> values;

  bool operator==(const Group&) const = default;
};

inline std::vector<Group> group_by_key(std::span<const KeyValue> sorted) {
  VectorStream stream(sorted);
  GroupReader reader(stream);
  std::vector<Group> out;
  while (reader.next_group()) {
    out.push_back({reader.key(), {reader.values().begin(), reader.values().end()}});
  }
  return out;
}

}  // namespace minimapred
