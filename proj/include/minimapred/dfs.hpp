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

// Simulated distributed file system. Files are cut into equal-sized chunks,
// each chunk is replicated onto `replication` distinct nodes, and every node
// also has a local scratch store that map tasks use for intermediate runs.
// A killed node's chunks and scratch data become unreadable.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "minimapred/common.hpp"

namespace minimapred {

struct ClusterConfig {
  std::uint32_t num_nodes = 4;
  std::uint64_t chunk_size = 16 * kMiB;
  std::uint32_t replication = 2;
  std::uint64_t seed = 42;

  void validate() const {
    if (num_nodes < 1) throw InvalidConfig("num_nodes must be >= 1");
    if (chunk_size < 1) throw InvalidConfig("chunk_size must be >= 1");
    if (replication < 1 || replication > num_nodes) {
      throw InvalidConfig("replication " + std::to_string(replication) + " must be in [1, " +
                          std::to_string(num_nodes) + "]");
    }
  }

  bool operator==(const ClusterConfig&) const = default;
};

struct Chunk {
  std::string file_id;
  std::uint64_t index = 0;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::vector<NodeId> replicas;

  bool operator==(const Chunk&) const = default;
};

struct FileMeta {
  std::string path;
  std::string file_id;
  std::uint64_t size = 0;
  std::uint64_t chunk_size = 0;
  std::vector<Chunk> chunks;

  bool operator==(const FileMeta&) const = default;
};

struct InputSplit {
  std::string file_id;
  std::string path;
  std::uint64_t split_index = 0;
  std::uint64_t start = 0;
  std::uint64_t end = 0;  // exclusive
  std::vector<NodeId> preferred_nodes;

  bool operator==(const InputSplit&) const = default;
};

// One newline-delimited line and the byte offset of its first byte.
struct Record {
  std::uint64_t offset = 0;
  std::string line;

  bool operator==(const Record&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ClusterConfig, num_nodes, chunk_size, replication, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Chunk, file_id, index, offset, length, replicas)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FileMeta, path, file_id, size, chunk_size, chunks)

// ---------------------------------------------------------------------------
// Sequential byte reader over a stored blob.

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  // Reads up to n bytes; returns 0 at end of data.
  virtual std::size_t read(char* dst, std::size_t n) = 0;
};

class BlobSource final : public ByteSource {
 public:
  explicit BlobSource(std::shared_ptr<const std::string> blob) : blob_(std::move(blob)) {}

  std::size_t read(char* dst, std::size_t n) override {
    const std::size_t take = std::min(n, blob_->size() - pos_);
    std::memcpy(dst, blob_->data() + pos_, take);
    pos_ += take;
    return take;
  }

 private:
  std::shared_ptr<const std::string> blob_;
  std::size_t pos_ = 0;
};

class FileSource final : public ByteSource {
 public:
  explicit FileSource(const std::filesystem::path& p) : in_(p, std::ios::binary) {}
  bool ok() const { return static_cast<bool>(in_); }

  std::size_t read(char* dst, std::size_t n) override {
    in_.read(dst, static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in_.gcount());
  }

 private:
  std::ifstream in_;
};

// ---------------------------------------------------------------------------
// Per-node storage. Blobs are immutable once written; put() with an existing
// name replaces the blob.

class NodeStore {
 public:
  virtual ~NodeStore() = default;
  virtual void put(const std::string& name, std::shared_ptr<const std::string> bytes) = 0;
  // nullptr when absent.
  virtual std::shared_ptr<const std::string> get(const std::string& name) const = 0;
  virtual std::unique_ptr<ByteSource> open(const std::string& name) const = 0;
  virtual bool erase(const std::string& name) = 0;
  virtual std::vector<std::string> list(std::string_view prefix) const = 0;
};

class MemoryNodeStore final : public NodeStore {
 public:
  void put(const std::string& name, std::shared_ptr<const std::string> bytes) override {
    std::unique_lock lock(mu_);
    blobs_[name] = std::move(bytes);
  }

  std::shared_ptr<const std::string> get(const std::string& name) const override {
    std::shared_lock lock(mu_);
    auto it = blobs_.find(name);
    return it == blobs_.end() ? nullptr : it->second;
  }

  std::unique_ptr<ByteSource> open(const std::string& name) const override {
    auto blob = get(name);
    if (!blob) return nullptr;
    return std::make_unique<BlobSource>(std::move(blob));
  }

  bool erase(const std::string& name) override {
    std::unique_lock lock(mu_);
    return blobs_.erase(name) > 0;
  }

  std::vector<std::string> list(std::string_view prefix) const override {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& [name, blob] : blobs_) {
      if (std::string_view(name).starts_with(prefix)) out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const std::string>> blobs_;
};

// Layout: <root>/node<N>/<name>. Writes go through a temp file and rename so
// readers never see a partial blob.
class DiskNodeStore final : public NodeStore {
 public:
  explicit DiskNodeStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void put(const std::string& name, std::shared_ptr<const std::string> bytes) override {
    const auto final_path = dir_ / name;
    auto tmp = final_path;
    tmp += ".tmp" + std::to_string(tmp_counter_.fetch_add(1));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(bytes->data(), static_cast<std::streamsize>(bytes->size()));
      if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path);
  }

  std::shared_ptr<const std::string> get(const std::string& name) const override {
    std::ifstream in(dir_ / name, std::ios::binary);
    if (!in) return nullptr;
    auto out = std::make_shared<std::string>(std::istreambuf_iterator<char>(in),
                                             std::istreambuf_iterator<char>());
    return out;
  }

  std::unique_ptr<ByteSource> open(const std::string& name) const override {
    auto src = std::make_unique<FileSource>(dir_ / name);
    if (!src->ok()) return nullptr;
    return src;
  }

  bool erase(const std::string& name) override {
    std::error_code ec;
    return std::filesystem::remove(dir_ / name, ec);
  }

  std::vector<std::string> list(std::string_view prefix) const override {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir_, ec)) {
      auto name = entry.path().filename().string();
      if (std::string_view(name).starts_with(prefix) && name.find(".tmp") == std::string::npos) {
        out.push_back(std::move(name));
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::atomic<std::uint64_t> tmp_counter_{0};
};

// ---------------------------------------------------------------------------

class Dfs {
 public:
  // In-memory cluster when store_root is empty; otherwise chunks and scratch
  // data live under <store_root>/node<N>/ and file metadata in
  // <store_root>/meta.json, so a later Dfs over the same root sees the files.
  explicit Dfs(ClusterConfig cfg, std::optional<std::filesystem::path> store_root = std::nullopt)
      : cfg_(cfg), root_(std::move(store_root)) {
    cfg_.validate();
    alive_ = std::make_unique<std::atomic<bool>[]>(cfg_.num_nodes);
    for (std::uint32_t n = 0; n < cfg_.num_nodes; ++n) {
      alive_[n].store(true);
      if (root_) {
        stores_.push_back(std::make_unique<DiskNodeStore>(*root_ / ("node" + std::to_string(n))));
      } else {
        stores_.push_back(std::make_unique<MemoryNodeStore>());
      }
    }
    if (root_) load_meta();
  }

  Dfs(const Dfs&) = delete;
  Dfs& operator=(const Dfs&) = delete;

  const ClusterConfig& config() const { return cfg_; }
  bool on_disk() const { return root_.has_value(); }

  // --- files -------------------------------------------------------------

  FileMeta put_file(std::string_view path, std::string_view data) {
    const std::string p(path);
    {
      std::unique_lock lock(meta_mu_);
      if (files_.contains(p) || reserved_.contains(p)) throw AlreadyExists(p);
      reserved_.insert(p);
    }
    FileMeta meta;
    try {
      meta = store_chunks(p, data, next_generation(p));
    } catch (...) {
      std::unique_lock lock(meta_mu_);
      reserved_.erase(p);
      throw;
    }
    {
      std::unique_lock lock(meta_mu_);
      reserved_.erase(p);
      files_[p] = std::make_shared<const FileMeta>(meta);
      persist_locked();
    }
    return meta;
  }

  // Writes or atomically replaces `path`. Readers holding the old FileMeta
  // keep reading the old chunks until they are dropped.
  FileMeta replace_file(std::string_view path, std::string_view data) {
    const std::string p(path);
    auto path_lock = lock_path(p);
    {
      std::shared_lock lock(meta_mu_);
      if (reserved_.contains(p)) throw AlreadyExists(p);
    }
    FileMeta meta = store_chunks(p, data, next_generation(p));
    std::shared_ptr<const FileMeta> old;
    {
      std::unique_lock lock(meta_mu_);
      auto it = files_.find(p);
      if (it != files_.end()) old = std::move(it->second);
      files_[p] = std::make_shared<const FileMeta>(meta);
      persist_locked();
    }
    if (old) drop_chunks(*old);
    return meta;
  }

  std::string get_file(std::string_view path) const {
    const auto meta_ptr = stat_shared(path);
    const FileMeta& meta = *meta_ptr;
    std::string out;
    out.reserve(meta.size);
    for (const auto& chunk : meta.chunks) {
      auto bytes = fetch_chunk(meta, chunk);
      out.append(*bytes);
    }
    return out;
  }

  FileMeta stat(std::string_view path) const { return *stat_shared(path); }

  // Shared, immutable snapshot of the metadata; no copy of the chunk list.
  std::shared_ptr<const FileMeta> stat_shared(std::string_view path) const {
    std::shared_lock lock(meta_mu_);
    auto it = files_.find(std::string(path));
    if (it == files_.end()) throw NotFound(std::string(path));
    return it->second;
  }

  bool exists(std::string_view path) const {
    std::shared_lock lock(meta_mu_);
    return files_.contains(std::string(path));
  }

  // Files whose path starts with prefix, ordered by path.
  std::vector<FileMeta> list(std::string_view prefix = {}) const {
    std::shared_lock lock(meta_mu_);
    std::vector<FileMeta> out;
    for (const auto& [path, meta] : files_) {
      if (std::string_view(path).starts_with(prefix)) out.push_back(*meta);
    }
    return out;
  }

  bool remove(std::string_view path) {
    std::shared_ptr<const FileMeta> old;
    {
      std::unique_lock lock(meta_mu_);
      auto it = files_.find(std::string(path));
      if (it == files_.end()) return false;
      old = std::move(it->second);
      files_.erase(it);
      persist_locked();
    }
    drop_chunks(*old);
    return true;
  }

  // --- splits ------------------------------------------------------------

  // One split per chunk; split i covers exactly chunk i's byte range.
  std::vector<InputSplit> make_splits(const FileMeta& meta) const {
    std::vector<InputSplit> splits;
    splits.reserve(meta.chunks.size());
    for (const auto& chunk : meta.chunks) {
      splits.push_back(InputSplit{meta.file_id, meta.path, chunk.index, chunk.offset,
                                  chunk.offset + chunk.length, chunk.replicas});
    }
    return splits;
  }

  std::vector<InputSplit> make_splits(std::string_view path) const { return make_splits(stat(path)); }

  // Calls fn(offset, line) for every record whose first byte lies in
  // [split.start, split.end). The line view is only valid during the call.
  // A record running past split.end is read to completion from the following
  // chunks; the next split skips it.
  template <typename Fn>
  void for_each_record(const InputSplit& split, Fn&& fn) const {
    const auto meta_ptr = stat_shared(split.path);
    const FileMeta& meta = *meta_ptr;
    if (meta.file_id != split.file_id) throw NotFound(split.path + " (file replaced)");
    SplitCursor cursor(*this, meta);
    const std::uint64_t size = meta.size;

    std::uint64_t pos = split.start;
    if (pos > 0) {
      // The record containing byte start-1 belongs to an earlier split, so
      // ownership begins right after the first newline at or after start-1.
      const std::uint64_t nl = cursor.find_newline(pos - 1);
      if (nl == kNpos) return;
      pos = nl + 1;
    }
    std::string spill;
    while (pos < split.end && pos < size) {
      const std::uint64_t nl = cursor.find_newline(pos);
      const std::uint64_t line_end = nl == kNpos ? size : nl;
      fn(pos, cursor.view(pos, line_end, spill));
      pos = line_end + 1;
    }
  }

  std::vector<Record> read_split(const InputSplit& split) const {
    std::vector<Record> out;
    for_each_record(split, [&](std::uint64_t off, std::string_view line) {
      out.push_back(Record{off, std::string(line)});
    });
    return out;
  }

  // --- reducer output ----------------------------------------------------

  static std::string part_name(std::uint32_t partition) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "part-r-%05u", partition);
    return buf;
  }

  static std::string part_path(std::string_view output_dir, std::uint32_t partition) {
    std::string out(output_dir);
    if (!out.empty() && out.back() != '/') out.push_back('/');
    return out + part_name(partition);
  }

  static std::string format_pairs(std::span<const KeyValue> pairs) {
    std::string text;
    for (const auto& kv : pairs) {
      text.append(kv.key);
      text.push_back('\t');
      text.append(kv.value);
      text.push_back('\n');
    }
    return text;
  }

  // Stores one reducer's output as <output_dir>/part-r-NNNNN, one
  // "key<TAB>value<LF>" line per pair. A later attempt for the same
  // partition replaces the file.
  FileMeta write_output(std::string_view output_dir, std::uint32_t partition,
                        std::uint32_t num_partitions, std::span<const KeyValue> pairs) {
    if (partition >= num_partitions) {
      throw InvalidConfig("partition " + std::to_string(partition) + " out of range [0, " +
                          std::to_string(num_partitions) + ")");
    }
    return replace_file(part_path(output_dir, partition), format_pairs(pairs));
  }

  // --- liveness ----------------------------------------------------------

  void kill_node(NodeId n) {
    check_node(n);
    alive_[n].store(false, std::memory_order_release);
  }

  bool alive(NodeId n) const {
    return n < cfg_.num_nodes && alive_[n].load(std::memory_order_acquire);
  }

  std::vector<NodeId> live_nodes() const {
    std::vector<NodeId> out;
    for (NodeId n = 0; n < cfg_.num_nodes; ++n) {
      if (alive(n)) out.push_back(n);
    }
    return out;
  }

  // --- node-local scratch (intermediate runs) ------------------------------

  void put_local(NodeId n, const std::string& name, std::string bytes) {
    check_node(n);
    if (!alive(n)) throw Error("node " + std::to_string(n) + " is dead");
    stores_[n]->put(name, std::make_shared<const std::string>(std::move(bytes)));
  }

  // nullptr when the node is dead or the blob is missing.
  std::unique_ptr<ByteSource> open_local(NodeId n, const std::string& name) const {
    if (!alive(n)) return nullptr;
    return stores_[n]->open(name);
  }

  bool has_local(NodeId n, const std::string& name) const {
    if (!alive(n)) return false;
    return stores_[n]->open(name) != nullptr;
  }

  void erase_local(NodeId n, const std::string& name) {
    check_node(n);
    stores_[n]->erase(name);
  }

  void erase_local_prefix(NodeId n, std::string_view prefix) {
    check_node(n);
    for (const auto& name : stores_[n]->list(prefix)) stores_[n]->erase(name);
  }

  // Raw store access for tests and tooling; ignores liveness.
  const NodeStore& store(NodeId n) const {
    check_node(n);
    return *stores_[n];
  }

  static constexpr std::uint64_t kNpos = ~std::uint64_t{0};

 private:
  // Random access over a file's chunks, fetching each chunk at most once.
  class SplitCursor {
   public:
    SplitCursor(const Dfs& dfs, const FileMeta& meta) : dfs_(dfs), meta_(meta) {}

    std::string_view chunk(std::uint64_t idx) {
      auto it = cache_.find(idx);
      if (it == cache_.end()) {
        it = cache_.emplace(idx, dfs_.fetch_chunk(meta_, meta_.chunks[idx])).first;
      }
      return *it->second;
    }

    // Absolute offset of the first '\n' at or after pos, or kNpos.
    std::uint64_t find_newline(std::uint64_t pos) {
      const std::uint64_t cs = meta_.chunk_size;
      for (std::uint64_t idx = pos / cs; idx < meta_.chunks.size(); ++idx) {
        const std::string_view data = chunk(idx);
        const std::uint64_t base = idx * cs;
        const std::uint64_t from = pos > base ? pos - base : 0;
        if (from < data.size()) {
          const void* hit = std::memchr(data.data() + from, '\n', data.size() - from);
          if (hit) return base + static_cast<std::uint64_t>(static_cast<const char*>(hit) - data.data());
        }
      }
      return kNpos;
    }

    // Bytes [begin, end). Zero-copy when the range sits in one chunk.
    std::string_view view(std::uint64_t begin, std::uint64_t end, std::string& scratch) {
      if (begin == end) return {};
      const std::uint64_t cs = meta_.chunk_size;
      const std::uint64_t first = begin / cs;
      const std::uint64_t last = (end - 1) / cs;
      if (first == last) return chunk(first).substr(begin - first * cs, end - begin);
      scratch.clear();
      for (std::uint64_t idx = first; idx <= last; ++idx) {
        const std::string_view data = chunk(idx);
        const std::uint64_t base = idx * cs;
        const std::uint64_t lo = std::max(begin, base) - base;
        const std::uint64_t hi = std::min(end, base + data.size()) - base;
        scratch.append(data.substr(lo, hi - lo));
      }
      return scratch;
    }

   private:
    const Dfs& dfs_;
    const FileMeta& meta_;
    std::map<std::uint64_t, std::shared_ptr<const std::string>> cache_;
  };

  void check_node(NodeId n) const {
    if (n >= cfg_.num_nodes) throw InvalidConfig("node " + std::to_string(n) + " out of range");
  }

  static std::string chunk_name(const std::string& file_id, std::uint64_t index) {
    return file_id + "." + std::to_string(index);
  }

  std::uint64_t next_generation(const std::string& path) {
    std::lock_guard lock(gen_mu_);
    return generations_[path]++;
  }

  std::unique_lock<std::mutex> lock_path(const std::string& path) {
    std::shared_ptr<std::mutex> mu;
    {
      std::lock_guard lock(gen_mu_);
      auto& slot = path_locks_[path];
      if (!slot) slot = std::make_shared<std::mutex>();
      mu = slot;
    }
    // The map never drops entries, so the mutex outlives the lock.
    return std::unique_lock<std::mutex>(*mu);
  }

  // Replica placement: rotating round-robin starting at
  // (chunk_index + file_hash) mod num_nodes, skipping dead nodes.
  std::vector<NodeId> place(std::uint64_t file_hash, std::uint64_t chunk_index,
                            const std::string& path) const {
    std::vector<NodeId> replicas;
    const std::uint64_t n = cfg_.num_nodes;
    const std::uint64_t start = (chunk_index + file_hash % n) % n;
    for (std::uint64_t k = 0; k < n && replicas.size() < cfg_.replication; ++k) {
      const auto node = static_cast<NodeId>((start + k) % n);
      if (alive(node)) replicas.push_back(node);
    }
    if (replicas.size() < cfg_.replication) throw ChunkUnavailable(path, chunk_index);
    return replicas;
  }

  FileMeta store_chunks(const std::string& path, std::string_view data, std::uint64_t generation) {
    FileMeta meta;
    meta.path = path;
    meta.file_id = hex64(fnv1a64(path)) + "-" + std::to_string(generation);
    meta.size = data.size();
    meta.chunk_size = cfg_.chunk_size;
    const std::uint64_t file_hash = fnv1a64(path) ^ splitmix64(cfg_.seed);
    const std::uint64_t count = (data.size() + cfg_.chunk_size - 1) / cfg_.chunk_size;
    meta.chunks.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      Chunk c;
      c.file_id = meta.file_id;
      c.index = i;
      c.offset = i * cfg_.chunk_size;
      c.length = std::min<std::uint64_t>(cfg_.chunk_size, data.size() - c.offset);
      c.replicas = place(file_hash, i, path);
      auto bytes = std::make_shared<const std::string>(data.substr(c.offset, c.length));
      for (NodeId r : c.replicas) stores_[r]->put(chunk_name(c.file_id, i), bytes);
      meta.chunks.push_back(std::move(c));
    }
    return meta;
  }

  void drop_chunks(const FileMeta& meta) {
    for (const auto& c : meta.chunks) {
      for (NodeId r : c.replicas) stores_[r]->erase(chunk_name(c.file_id, c.index));
    }
  }

  std::shared_ptr<const std::string> fetch_chunk(const FileMeta& meta, const Chunk& chunk) const {
    for (NodeId r : chunk.replicas) {
      if (!alive(r)) continue;
      if (auto bytes = stores_[r]->get(chunk_name(chunk.file_id, chunk.index))) return bytes;
    }
    throw ChunkUnavailable(meta.path, chunk.index);
  }

  void persist_locked() {
    if (!root_) return;
    nlohmann::json j;
    j["config"] = cfg_;
    j["files"] = nlohmann::json::array();
    for (const auto& [path, meta] : files_) j["files"].push_back(*meta);
    {
      std::lock_guard lock(gen_mu_);
      j["generations"] = generations_;
    }
    const auto target = *root_ / "meta.json";
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << j.dump(1) << '\n';
      if (!out) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  }

  void load_meta() {
    const auto path = *root_ / "meta.json";
    std::ifstream in(path);
    if (!in) return;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidConfig("corrupt " + path.string() + ": " + e.what());
    }
    for (const auto& f : j.at("files")) {
      FileMeta meta = f.get<FileMeta>();
      for (const auto& c : meta.chunks) {
        for (NodeId r : c.replicas) {
          if (r >= cfg_.num_nodes) {
            throw InvalidConfig("store at " + root_->string() + " references node " +
                                std::to_string(r) + " but cluster has " +
                                std::to_string(cfg_.num_nodes) + " nodes");
          }
        }
      }
      auto path = meta.path;
      files_[path] = std::make_shared<const FileMeta>(std::move(meta));
    }
    if (j.contains("generations")) {
      generations_ = j["generations"].get<std::map<std::string, std::uint64_t>>();
    }
  }

  ClusterConfig cfg_;
  std::optional<std::filesystem::path> root_;
  std::vector<std::unique_ptr<NodeStore>> stores_;
  std::unique_ptr<std::atomic<bool>[]> alive_;

  mutable std::shared_mutex meta_mu_;
  std::map<std::string, std::shared_ptr<const FileMeta>> files_;
  std::set<std::string> reserved_;

  std::mutex gen_mu_;
  std::map<std::string, std::uint64_t> generations_;
  std::map<std::string, std::shared_ptr<std::mutex>> path_locks_;
};

}  // namespace minimapred
