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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"
#include "minimapred/map_task.hpp"
#include "minimapred/runs.hpp"
#include "minimapred/task.hpp"

namespace minimapred {

// Opens this partition's run from every completed map task and merges them.
// Sources are taken in map-task order, so equal keys come out ordered by map
// task index and then by emission order. Throws ShuffleSourceLost naming the
// first map task whose run cannot be read.
inline std::unique_ptr<MergeStream> shuffle_fetch(const Dfs& dfs, std::uint32_t partition,
                                                  std::span<const TaskDescriptor* const> maps) {
  std::vector<const TaskDescriptor*> order(maps.begin(), maps.end());
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  std::vector<std::unique_ptr<RunReader>> readers;
  readers.reserve(order.size());
  for (const auto* t : order) {
    if (t->state != TaskState::kCompleted || partition >= t->result_locations.size()) {
      throw ContractViolation("shuffle_fetch: " + t->id.to_string() + " has no output");
    }
    const RunLocation& loc = t->result_locations[partition];
    auto src = dfs.open_local(loc.node, loc.handle);
    if (!src) throw ShuffleSourceLost(t->id, loc.node);
    readers.push_back(std::make_unique<RunReader>(std::move(src)));
  }
  return std::make_unique<MergeStream>(std::move(readers));
}

inline std::vector<KeyValue> drain(MergeStream& stream) {
  std::vector<KeyValue> out;
  while (stream.next()) out.push_back({stream.key(), stream.value()});
  return out;
}

struct ReduceTaskResult {
  FileMeta part;
  std::uint64_t input_pairs = 0;
  std::uint64_t groups = 0;
  std::uint64_t output_pairs = 0;
  Counters counters;
};

namespace detail {

// Forwards merged pairs to the observer as the grouper pulls them.
class ObservedStream {
 public:
  ObservedStream(MergeStream& in, JobObserver* obs, TaskId task, std::uint32_t attempt,
                 std::uint64_t& count)
      : in_(in), obs_(obs), task_(task), attempt_(attempt), count_(count) {}

  bool next() {
    if (!in_.next()) return false;
    ++count_;
    if (obs_) obs_->on_reduce_input(task_, attempt_, in_.key(), in_.value());
    return true;
  }
  const std::string& key() const { return in_.key(); }
  const std::string& value() const { return in_.value(); }

 private:
  MergeStream& in_;
  JobObserver* obs_;
  TaskId task_;
  std::uint32_t attempt_;
  std::uint64_t& count_;
};

}  // namespace detail

// Shuffles one partition, applies the reducer per key group in key order and
// stores the result as the partition's part file in the DFS.
inline ReduceTaskResult run_reduce_task(Dfs& dfs, const JobSpec& spec, const TaskDescriptor& task,
                                        std::span<const TaskDescriptor* const> maps,
                                        const ReduceFn& reducer, JobObserver* observer = nullptr) {
  const std::uint32_t partition = task.partition();
  auto merged = shuffle_fetch(dfs, partition, maps);

  ReduceTaskResult result;
  std::vector<KeyValue> output;
  detail::ObservedStream stream(*merged, observer, task.id, task.attempt, result.input_pairs);
  detail::GroupEmitter em("reducer", [&output](std::string_view k, std::string_view v) {
    output.push_back({std::string(k), std::string(v)});
  });
  GroupReader<detail::ObservedStream> groups(stream);
  while (groups.next_group()) {
    ++result.groups;
    em.set_key(groups.key());
    reducer(groups.key(), groups.values(), em);
  }
  result.output_pairs = output.size();
  result.counters = em.counters();
  result.part = dfs.write_output(spec.output_path, partition, spec.num_reducers, output);
  return result;
}

}  // namespace minimapred
