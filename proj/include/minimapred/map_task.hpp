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

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"
#include "minimapred/runs.hpp"
#include "minimapred/task.hpp"

namespace minimapred {

// FNV-1a 64 of the key bytes, modulo R.
inline std::uint32_t partition(std::string_view key, std::uint32_t num_reducers) {
  return static_cast<std::uint32_t>(fnv1a64(key) % num_reducers);
}

// Node-local name of one run: <job>.m<task>.a<attempt>.p<partition>[.s<spill>]
inline std::string run_handle(std::string_view job_key, std::uint32_t map_index,
                              std::uint32_t attempt, std::uint32_t part) {
  return std::string(job_key) + ".m" + std::to_string(map_index) + ".a" + std::to_string(attempt) +
         ".p" + std::to_string(part);
}

// Keeps only characters that are safe in a flat file name.
inline std::string job_store_key(std::string_view job_id) {
  std::string out = "job-";
  for (char c : job_id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_';
    out.push_back(safe ? c : '_');
  }
  return out + "-" + hex64(fnv1a64(job_id)).substr(0, 8);
}

// In-memory sort buffer for map output. Pairs are packed into one arena as
// <u32 klen><u32 vlen><key><value>; the index carries the partition, the
// first 8 key bytes (big-endian) and the arena offset. Arena offsets grow
// with emission order, so they double as the stable-sort tie-break.
class MapOutputBuffer {
 public:
  explicit MapOutputBuffer(std::uint32_t num_partitions) : num_partitions_(num_partitions) {}

  void add(std::string_view key, std::string_view value, std::uint32_t part) {
    const auto off = static_cast<std::uint32_t>(arena_.size());
    const auto klen = static_cast<std::uint32_t>(key.size());
    const auto vlen = static_cast<std::uint32_t>(value.size());
    arena_.append(reinterpret_cast<const char*>(&klen), 4);
    arena_.append(reinterpret_cast<const char*>(&vlen), 4);
    arena_.append(key);
    arena_.append(value);
    entries_.push_back({key_prefix(key), part, off});
  }

  std::size_t footprint() const { return arena_.size() + entries_.size() * sizeof(Entry); }
  std::size_t arena_bytes() const { return arena_.size(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void sort() {
    std::sort(entries_.begin(), entries_.end(), [this](const Entry& a, const Entry& b) {
      if (a.part != b.part) return a.part < b.part;
      if (a.prefix != b.prefix) return a.prefix < b.prefix;
      const int c = key_at(a).compare(key_at(b));
      if (c != 0) return c < 0;
      return a.off < b.off;
    });
    bounds_.assign(num_partitions_ + 1, 0);
    std::size_t i = 0;
    for (std::uint32_t p = 0; p < num_partitions_; ++p) {
      bounds_[p] = i;
      while (i < entries_.size() && entries_[i].part == p) ++i;
    }
    bounds_[num_partitions_] = i;
  }

  void clear() {
    arena_.clear();
    entries_.clear();
    bounds_.clear();
  }

  // Sorted view of one partition; valid after sort() until clear().
  class PartitionStream {
   public:
    PartitionStream(const MapOutputBuffer& buf, std::size_t begin, std::size_t end)
        : buf_(buf), pos_(begin), end_(end) {}

    bool next() {
      if (started_) ++pos_;
      started_ = true;
      return pos_ < end_;
    }
    std::string_view key() const { return buf_.key_at(buf_.entries_[pos_]); }
    std::string_view value() const { return buf_.value_at(buf_.entries_[pos_]); }

   private:
    const MapOutputBuffer& buf_;
    std::size_t pos_;
    std::size_t end_;
    bool started_ = false;
  };

  PartitionStream partition_stream(std::uint32_t p) const {
    return PartitionStream(*this, bounds_[p], bounds_[p + 1]);
  }

 private:
  struct Entry {
    std::uint64_t prefix;
    std::uint32_t part;
    std::uint32_t off;
  };

  static std::uint64_t key_prefix(std::string_view key) {
    std::uint64_t p = 0;
    const std::size_t n = std::min<std::size_t>(8, key.size());
    for (std::size_t i = 0; i < n; ++i) {
      p |= static_cast<std::uint64_t>(static_cast<unsigned char>(key[i])) << (56 - 8 * i);
    }
    return p;
  }

  std::uint32_t u32_at(std::size_t off) const {
    std::uint32_t v;
    std::memcpy(&v, arena_.data() + off, 4);
    return v;
  }
  std::string_view key_at(const Entry& e) const {
    return std::string_view(arena_.data() + e.off + 8, u32_at(e.off));
  }
  std::string_view value_at(const Entry& e) const {
    return std::string_view(arena_.data() + e.off + 8 + u32_at(e.off), u32_at(e.off + 4));
  }

  std::uint32_t num_partitions_;
  std::string arena_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> bounds_;
};

struct MapTaskOptions {
  // Sort-buffer budget; beyond it the buffer is spilled as sorted runs to the
  // node's local store and merged when the split is exhausted.
  std::uint64_t spill_bytes = 64 * kMiB;
  JobObserver* observer = nullptr;
};

struct MapTaskResult {
  std::vector<RunLocation> locations;  // exactly one per partition
  Counters counters;
  std::uint64_t records_read = 0;
  std::uint64_t pairs_emitted = 0;
  std::uint32_t spills = 0;
};

namespace detail {

// Emitter handed to combiners/reducers: checks the key and forwards the
// value to a sink.
template <typename Sink>
class GroupEmitter final : public Emitter {
 public:
  GroupEmitter(std::string_view what, Sink sink) : what_(what), sink_(std::move(sink)) {}
  void set_key(std::string_view key) { key_ = key; }

  void emit(std::string_view key, std::string_view value) override {
    if (key != key_) {
      throw ContractViolation(std::string(what_) + " emitted key '" + std::string(key) +
                              "' inside group '" + std::string(key_) + "'");
    }
    sink_(key, value);
  }

 private:
  std::string_view what_;
  std::string_view key_;
  Sink sink_;
};

// Writes a sorted stream into a run, folding each key group through the
// combiner when one is given.
template <typename Stream>
void write_run(Stream& in, const ReduceFn* combiner, RunWriter& out, Counters& counters) {
  if (!combiner) {
    while (in.next()) out.append(in.key(), in.value());
    return;
  }
  GroupEmitter em("combiner", [&out](std::string_view k, std::string_view v) { out.append(k, v); });
  GroupReader<Stream> groups(in);
  while (groups.next_group()) {
    em.set_key(groups.key());
    (*combiner)(groups.key(), groups.values(), em);
  }
  merge_counters(counters, em.counters());
}

class MapEmitter final : public Emitter {
 public:
  MapEmitter(MapOutputBuffer& buf, std::uint32_t num_partitions) : buf_(buf), r_(num_partitions) {}

  void emit(std::string_view key, std::string_view value) override {
    if (key.size() > 0xffffffffu || value.size() > 0xffffffffu) {
      throw JobError("map output pair too large");
    }
    buf_.add(key, value, partition(key, r_));
    ++emitted_;
    if (observer_) observer_->on_map_emit(task_, attempt_, key, value);
    if (on_full_ && (buf_.footprint() >= limit_ || buf_.arena_bytes() >= 0xf0000000u)) on_full_();
  }

  void observe(JobObserver* obs, TaskId task, std::uint32_t attempt) {
    observer_ = obs;
    task_ = task;
    attempt_ = attempt;
  }
  void on_full(std::uint64_t limit, std::function<void()> fn) {
    limit_ = limit;
    on_full_ = std::move(fn);
  }
  std::uint64_t emitted() const { return emitted_; }

 private:
  MapOutputBuffer& buf_;
  std::uint32_t r_;
  std::uint64_t emitted_ = 0;
  std::uint64_t limit_ = 0;
  std::function<void()> on_full_;
  JobObserver* observer_ = nullptr;
  TaskId task_;
  std::uint32_t attempt_ = 0;
};

}  // namespace detail

// Runs one map task on `node`: every record of the split goes through the
// mapper, output pairs are routed by partition(), sorted by key within each
// partition (stable), optionally combined per key, and stored as one run per
// partition in the node's local store. Nothing is written to the DFS.
inline MapTaskResult run_map_task(Dfs& dfs, NodeId node, std::string_view job_key,
                                  const TaskDescriptor& task, const MapFn& mapper,
                                  const ReduceFn* combiner, std::uint32_t num_reducers,
                                  const MapTaskOptions& opts = {}) {
  if (num_reducers < 1) throw InvalidConfig("num_reducers must be >= 1");
  MapTaskResult result;
  MapOutputBuffer buffer(num_reducers);
  detail::MapEmitter emitter(buffer, num_reducers);
  emitter.observe(opts.observer, task.id, task.attempt);

  const std::string base = run_handle(job_key, task.id.index, task.attempt, 0);
  const std::string handle_stem = base.substr(0, base.size() - 3);  // strip ".p0"
  std::vector<std::vector<std::string>> spill_handles(num_reducers);

  auto spill = [&] {
    buffer.sort();
    for (std::uint32_t p = 0; p < num_reducers; ++p) {
      RunWriter w;
      auto stream = buffer.partition_stream(p);
      detail::write_run(stream, nullptr, w, result.counters);
      std::string h = handle_stem + ".p" + std::to_string(p) + ".s" + std::to_string(result.spills);
      dfs.put_local(node, h, w.take());
      spill_handles[p].push_back(std::move(h));
    }
    buffer.clear();
    ++result.spills;
  };
  emitter.on_full(opts.spill_bytes, spill);

  dfs.for_each_record(task.split(), [&](std::uint64_t offset, std::string_view line) {
    ++result.records_read;
    mapper(offset, line, emitter);
  });
  result.pairs_emitted = emitter.emitted();
  merge_counters(result.counters, emitter.counters());

  if (result.spills > 0 && !buffer.empty()) spill();
  if (result.spills == 0) buffer.sort();

  for (std::uint32_t p = 0; p < num_reducers; ++p) {
    RunWriter w;
    if (result.spills == 0) {
      auto stream = buffer.partition_stream(p);
      detail::write_run(stream, combiner, w, result.counters);
    } else {
      std::vector<std::unique_ptr<RunReader>> readers;
      for (const auto& h : spill_handles[p]) {
        auto src = dfs.open_local(node, h);
        if (!src) throw Error("spill run vanished: " + h);
        readers.push_back(std::make_unique<RunReader>(std::move(src)));
      }
      MergeStream merged(std::move(readers));
      detail::write_run(merged, combiner, w, result.counters);
    }
    RunLocation loc;
    loc.node = node;
    loc.handle = handle_stem + ".p" + std::to_string(p);
    loc.records = w.records();
    loc.bytes = w.bytes();
    dfs.put_local(node, loc.handle, w.take());
    result.locations.push_back(std::move(loc));
  }
  for (const auto& hs : spill_handles) {
    for (const auto& h : hs) dfs.erase_local(node, h);
  }
  return result;
}

}  // namespace minimapred
