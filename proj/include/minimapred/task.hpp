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

// Job and task bookkeeping shared by the master, the workers and the
// recovery logic, plus the user-function registry and the locality
// scheduler.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"

namespace minimapred {

// ---------------------------------------------------------------------------
// User functions.

using Counters = std::map<std::string, std::int64_t, std::less<>>;

inline void merge_counters(Counters& into, const Counters& from) {
  for (const auto& [name, v] : from) into[name] += v;
}

class Emitter {
 public:
  virtual ~Emitter() = default;
  virtual void emit(std::string_view key, std::string_view value) = 0;

  void count(std::string_view name, std::int64_t delta = 1) {
    auto it = counters_.find(name);
    if (it == counters_.end()) it = counters_.emplace(std::string(name), 0).first;
    it->second += delta;
  }

  const Counters& counters() const { return counters_; }

 private:
  Counters counters_;
};

// (k1, v1) -> list(k2, v2). k1 is the record's byte offset, v1 the line.
using MapFn = std::function<void(std::uint64_t offset, std::string_view line, Emitter& out)>;

// (k2, list(v2)) -> list(v3). Used for reducers and combiners; anything
// emitted must carry the group's key.
using ReduceFn =
    std::function<void(std::string_view key, std::span<const std::string> values, Emitter& out)>;

class Registry {
 public:
  void add_mapper(std::string id, MapFn fn) { mappers_[std::move(id)] = std::move(fn); }
  void add_reducer(std::string id, ReduceFn fn) { reducers_[std::move(id)] = std::move(fn); }

  const MapFn* mapper(std::string_view id) const {
    auto it = mappers_.find(id);
    return it == mappers_.end() ? nullptr : &it->second;
  }

  const ReduceFn* reducer(std::string_view id) const {
    auto it = reducers_.find(id);
    return it == reducers_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::string, MapFn, std::less<>> mappers_;
  std::map<std::string, ReduceFn, std::less<>> reducers_;
};

// ---------------------------------------------------------------------------

struct JobSpec {
  std::string job_id;
  std::string input_path;
  std::string output_path;
  std::string mapper_id;
  std::string reducer_id;
  std::optional<std::string> combiner_id;
  std::uint32_t num_reducers = 1;
};

enum class TaskState : std::uint8_t { kPending, kRunning, kCompleted, kFailed };
enum class JobPhase : std::uint8_t { kMapping, kReducing, kDone, kFailed };

inline const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::kPending: return "pending";
    case TaskState::kRunning: return "running";
    case TaskState::kCompleted: return "completed";
    case TaskState::kFailed: return "failed";
  }
  return "?";
}

inline const char* to_string(JobPhase p) {
  switch (p) {
    case JobPhase::kMapping: return "mapping";
    case JobPhase::kReducing: return "reducing";
    case JobPhase::kDone: return "done";
    case JobPhase::kFailed: return "failed";
  }
  return "?";
}

// Where one partition of a completed map task's output lives.
struct RunLocation {
  NodeId node = 0;
  std::string handle;
  std::uint64_t records = 0;
  std::uint64_t bytes = 0;
};

struct TaskDescriptor {
  TaskId id;
  std::variant<InputSplit, std::uint32_t> payload;  // split for maps, partition for reduces
  TaskState state = TaskState::kPending;
  std::uint32_t attempt = 0;  // bumped each time the task goes back to pending
  std::optional<NodeId> assigned_node;
  std::vector<RunLocation> result_locations;  // maps only: one per partition

  // Statistics, not part of the scheduling state.
  std::uint32_t executions = 0;
  double elapsed_ms = 0;
  Counters counters;  // from the attempt that completed
  std::string last_error;

  bool is_map() const { return id.kind == TaskKind::kMap; }
  const InputSplit& split() const { return std::get<InputSplit>(payload); }
  std::uint32_t partition() const { return std::get<std::uint32_t>(payload); }
};

struct JobState {
  JobSpec spec;
  std::vector<TaskDescriptor> map_tasks;
  std::vector<TaskDescriptor> reduce_tasks;
  JobPhase phase = JobPhase::kMapping;

  TaskDescriptor& task(TaskId id) {
    return id.kind == TaskKind::kMap ? map_tasks.at(id.index) : reduce_tasks.at(id.index);
  }
  const TaskDescriptor& task(TaskId id) const {
    return id.kind == TaskKind::kMap ? map_tasks.at(id.index) : reduce_tasks.at(id.index);
  }

  bool all_maps_completed() const {
    return std::all_of(map_tasks.begin(), map_tasks.end(),
                       [](const auto& t) { return t.state == TaskState::kCompleted; });
  }
  bool all_reduces_completed() const {
    return std::all_of(reduce_tasks.begin(), reduce_tasks.end(),
                       [](const auto& t) { return t.state == TaskState::kCompleted; });
  }
};

// One map task per split, all pending at attempt 0.
inline std::vector<TaskDescriptor> plan_map_tasks(std::span<const InputSplit> splits) {
  std::vector<TaskDescriptor> tasks;
  tasks.reserve(splits.size());
  for (std::size_t i = 0; i < splits.size(); ++i) {
    TaskDescriptor t;
    t.id = TaskId::map(static_cast<std::uint32_t>(i));
    t.payload = splits[i];
    tasks.push_back(std::move(t));
  }
  return tasks;
}

inline std::vector<TaskDescriptor> plan_map_tasks(const Dfs& dfs, const FileMeta& meta) {
  const auto splits = dfs.make_splits(meta);
  return plan_map_tasks(splits);
}

inline std::vector<TaskDescriptor> plan_reduce_tasks(std::uint32_t num_reducers) {
  std::vector<TaskDescriptor> tasks(num_reducers);
  for (std::uint32_t i = 0; i < num_reducers; ++i) {
    tasks[i].id = TaskId::reduce(i);
    tasks[i].payload = i;
  }
  return tasks;
}

// ---------------------------------------------------------------------------
// Locality scheduler.

struct Assignment {
  TaskId task;
  NodeId node;

  bool operator==(const Assignment&) const = default;
};

// Pairs pending tasks with distinct idle nodes, taking tasks in task-id
// order. First pass: every map task with an idle replica node gets the
// first such node in replica order. Second pass: the remaining tasks get
// the lowest-numbered idle nodes left.
inline std::vector<Assignment> schedule(std::span<const TaskDescriptor* const> pending,
                                        std::span<const NodeId> idle_nodes) {
  std::vector<const TaskDescriptor*> order(pending.begin(), pending.end());
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  std::vector<NodeId> idle(idle_nodes.begin(), idle_nodes.end());
  std::sort(idle.begin(), idle.end());
  idle.erase(std::unique(idle.begin(), idle.end()), idle.end());

  std::vector<bool> node_taken(idle.size(), false);
  std::vector<bool> task_done(order.size(), false);
  std::vector<Assignment> out;
  auto idle_slot = [&](NodeId n) -> std::optional<std::size_t> {
    auto it = std::lower_bound(idle.begin(), idle.end(), n);
    if (it == idle.end() || *it != n) return std::nullopt;
    return static_cast<std::size_t>(it - idle.begin());
  };

  for (std::size_t i = 0; i < order.size() && out.size() < idle.size(); ++i) {
    const auto* t = order[i];
    if (!t->is_map()) continue;
    for (NodeId pref : t->split().preferred_nodes) {
      auto slot = idle_slot(pref);
      if (slot && !node_taken[*slot]) {
        node_taken[*slot] = true;
        task_done[i] = true;
        out.push_back({t->id, pref});
        break;
      }
    }
  }
  std::size_t next_node = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (task_done[i]) continue;
    while (next_node < idle.size() && node_taken[next_node]) ++next_node;
    if (next_node == idle.size()) break;
    node_taken[next_node] = true;
    out.push_back({order[i]->id, idle[next_node]});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.task < b.task; });
  return out;
}

inline std::vector<Assignment> schedule(std::span<const TaskDescriptor> pending,
                                        std::span<const NodeId> idle_nodes) {
  std::vector<const TaskDescriptor*> ptrs;
  for (const auto& t : pending) ptrs.push_back(&t);
  return schedule(std::span<const TaskDescriptor* const>(ptrs), idle_nodes);
}

// ---------------------------------------------------------------------------

// What recover() changed after a node death.
struct RecoveryOutcome {
  NodeId node = 0;
  std::vector<TaskId> requeued_running;   // were running on the dead node
  std::vector<TaskId> reverted_maps;      // completed maps whose output died
  std::vector<TaskId> restarted_reduces;  // running elsewhere, must re-shuffle
};

// Hooks for instrumentation. Emission/input callbacks run on worker threads.
class JobObserver {
 public:
  virtual ~JobObserver() = default;
  virtual void on_dispatch(const JobState&, TaskId, NodeId, std::uint32_t /*attempt*/, Tick) {}
  virtual void on_map_emit(TaskId, std::uint32_t /*attempt*/, std::string_view /*key*/,
                           std::string_view /*value*/) {}
  virtual void on_reduce_input(TaskId, std::uint32_t /*attempt*/, std::string_view /*key*/,
                               std::string_view /*value*/) {}
  virtual void on_recover(const JobState&, const RecoveryOutcome&) {}
  virtual void on_shuffle_source_lost(TaskId /*reducer*/, TaskId /*source*/) {}
  virtual void on_complete(const JobState&, TaskId) {}
};

}  // namespace minimapred
