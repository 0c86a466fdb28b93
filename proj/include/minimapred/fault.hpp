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

// Deterministic node-failure injection and the recovery rules applied when a
// node is declared dead:
//   - tasks running on it go back to pending;
//   - completed map tasks whose runs lived on it go back to pending while any
//     reduce task still needs them (map output is node-local);
//   - completed reduce tasks are never touched (their output is in the DFS);
//   - reduce tasks still running elsewhere restart their shuffle.
//
// Time is the master's logical tick: one tick per scheduling round.

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"
#include "minimapred/task.hpp"

namespace minimapred::fault {

struct AtTick {
  Tick tick = 0;
  bool operator==(const AtTick&) const = default;
};

struct AfterTask {
  TaskId task;
  bool operator==(const AfterTask&) const = default;
};

struct FailureEvent {
  NodeId node = 0;
  std::variant<AtTick, AfterTask> trigger;
  bool permanent = true;

  bool operator==(const FailureEvent&) const = default;

  std::string to_string() const {
    if (const auto* t = std::get_if<AtTick>(&trigger)) {
      return std::to_string(node) + ":" + std::to_string(t->tick);
    }
    return std::to_string(node) + ":after:" + std::get<AfterTask>(trigger).task.to_string();
  }
};

// "<node>:<tick>" or "<node>:after:<task-id>".
inline FailureEvent parse_failure_event(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) throw InvalidPlan("expected <node>:<tick>, got '" + std::string(s) + "'");
  const auto node = parse_int64(s.substr(0, colon));
  if (!node || *node < 0) throw InvalidPlan("bad node id in '" + std::string(s) + "'");
  std::string_view rest = s.substr(colon + 1);
  FailureEvent ev;
  ev.node = static_cast<NodeId>(*node);
  if (rest.starts_with("after:")) {
    auto task = TaskId::parse(rest.substr(6));
    if (!task) throw InvalidPlan("bad task id in '" + std::string(s) + "'");
    ev.trigger = AfterTask{*task};
  } else {
    const auto tick = parse_int64(rest);
    if (!tick || *tick < 0) throw InvalidPlan("bad tick in '" + std::string(s) + "'");
    ev.trigger = AtTick{static_cast<Tick>(*tick)};
  }
  return ev;
}

struct FailurePlan {
  std::vector<FailureEvent> events;

  bool empty() const { return events.empty(); }

  void validate(std::uint32_t num_nodes) const {
    std::set<NodeId> seen;
    for (const auto& ev : events) {
      if (ev.node >= num_nodes) {
        throw InvalidPlan("node " + std::to_string(ev.node) + " out of range [0, " +
                          std::to_string(num_nodes) + ")");
      }
      if (!seen.insert(ev.node).second) {
        throw InvalidPlan("more than one kill event for node " + std::to_string(ev.node));
      }
      if (!ev.permanent) throw InvalidPlan("node rejoin is not supported");
    }
  }

  static FailurePlan parse(const std::vector<std::string>& specs) {
    FailurePlan plan;
    for (const auto& s : specs) plan.events.push_back(parse_failure_event(s));
    return plan;
  }
};

// Fires each plan event once: tick events when the clock reaches their tick,
// after-task events at the first boundary after the named task has completed.
class FailureInjector {
 public:
  explicit FailureInjector(FailurePlan plan) : plan_(std::move(plan)), fired_(plan_.events.size()) {}

  void note_completed(TaskId id) { completed_.insert(id); }

  // Nodes to halt at this boundary, in plan order.
  std::vector<NodeId> due(Tick now) {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < plan_.events.size(); ++i) {
      if (fired_[i]) continue;
      const auto& ev = plan_.events[i];
      bool fire = false;
      if (const auto* t = std::get_if<AtTick>(&ev.trigger)) {
        fire = now >= t->tick;
      } else {
        fire = completed_.contains(std::get<AfterTask>(ev.trigger).task);
      }
      if (fire) {
        fired_[i] = true;
        fired_log_.push_back({ev, now});
        out.push_back(ev.node);
      }
    }
    return out;
  }

  // Halts the due nodes in the DFS: chunk replicas and local runs on them
  // become unreadable immediately.
  std::vector<NodeId> inject(Dfs& dfs, Tick now) {
    auto nodes = due(now);
    for (NodeId n : nodes) dfs.kill_node(n);
    return nodes;
  }

  struct Fired {
    FailureEvent event;
    Tick at;
  };
  const std::vector<Fired>& fired() const { return fired_log_; }
  bool all_fired() const { return std::all_of(fired_.begin(), fired_.end(), [](bool b) { return b; }); }

 private:
  FailurePlan plan_;
  std::vector<bool> fired_;
  std::vector<Fired> fired_log_;
  std::set<TaskId> completed_;
};

struct Heartbeat {
  NodeId node_id = 0;
  Tick last_tick = 0;
  Tick timeout_ticks = 1;

  bool expired(Tick now) const { return now > last_tick && now - last_tick > timeout_ticks; }
};

// Master-side failure detector. Live nodes report every tick; a node that
// has missed more than timeout_ticks reports is declared dead, once.
class FailureDetector {
 public:
  FailureDetector(std::uint32_t num_nodes, Tick timeout_ticks) : declared_(num_nodes, false) {
    for (NodeId n = 0; n < num_nodes; ++n) beats_.push_back({n, 0, timeout_ticks});
  }

  void beat(NodeId n, Tick now) { beats_.at(n).last_tick = now; }

  // Declares immediately (e.g. a reducer could not reach the node's runs).
  bool declare(NodeId n) {
    if (declared_.at(n)) return false;
    declared_[n] = true;
    return true;
  }

  // Newly expired nodes, lowest id first.
  std::vector<NodeId> sweep(Tick now) {
    std::vector<NodeId> out;
    for (const auto& hb : beats_) {
      if (!declared_[hb.node_id] && hb.expired(now)) {
        declared_[hb.node_id] = true;
        out.push_back(hb.node_id);
      }
    }
    return out;
  }

  bool dead(NodeId n) const { return declared_.at(n); }
  const Heartbeat& heartbeat(NodeId n) const { return beats_.at(n); }

 private:
  std::vector<Heartbeat> beats_;
  std::vector<bool> declared_;
};

// Sends a task back to pending for another attempt. The task may run at most
// max_attempts times in total.
inline void requeue(TaskDescriptor& t, std::uint32_t max_attempts) {
  if (t.attempt + 1 >= max_attempts) {
    t.state = TaskState::kFailed;
    t.assigned_node.reset();
    throw AttemptsExhausted(t.id);
  }
  t.state = TaskState::kPending;
  ++t.attempt;
  t.assigned_node.reset();
}

inline RecoveryOutcome recover(JobState& job, NodeId dead, std::uint32_t max_attempts = 4) {
  RecoveryOutcome out;
  out.node = dead;

  for (auto* tasks : {&job.map_tasks, &job.reduce_tasks}) {
    for (auto& t : *tasks) {
      if (t.state == TaskState::kRunning && t.assigned_node == dead) {
        requeue(t, max_attempts);
        out.requeued_running.push_back(t.id);
      }
    }
  }

  // Map output is needed until every reducer has finished with it.
  if (!job.all_reduces_completed()) {
    for (auto& t : job.map_tasks) {
      if (t.state != TaskState::kCompleted) continue;
      const bool lost = std::any_of(t.result_locations.begin(), t.result_locations.end(),
                                    [dead](const RunLocation& l) { return l.node == dead; });
      if (lost) {
        requeue(t, max_attempts);
        t.result_locations.clear();
        out.reverted_maps.push_back(t.id);
      }
    }
  }

  if (!job.all_maps_completed()) {
    for (auto& t : job.reduce_tasks) {
      if (t.state == TaskState::kRunning) {
        requeue(t, max_attempts);
        out.restarted_reduces.push_back(t.id);
      }
    }
    if (job.phase == JobPhase::kReducing) job.phase = JobPhase::kMapping;
  }
  return out;
}

}  // namespace minimapred::fault
