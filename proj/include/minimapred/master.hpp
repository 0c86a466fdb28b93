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

// The master: plans tasks, runs the scheduling rounds, applies failure
// events and recovery, and reports.
//
// A round is one logical tick. At the boundary before round t the master
//   1. fires failure-plan events due at t (the node halts; whatever it was
//      running is lost and its local runs become unreadable),
//   2. takes the completion/failure messages of round t-1 from live nodes,
//      in task-id order,
//   3. collects heartbeats and declares silent nodes dead, running recovery,
//   4. advances the phase, and
//   5. schedules pending tasks onto idle workers and runs them concurrently
//      until all of them return.
// Because every decision is made at a boundary from data that does not
// depend on thread timing, the whole run, attempt counts included, is a
// function of (input, spec, cluster, failure plan).

#pragma once

#include <chrono>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"
#include "minimapred/fault.hpp"
#include "minimapred/map_task.hpp"
#include "minimapred/reduce_task.hpp"
#include "minimapred/task.hpp"

namespace minimapred {

struct EngineOptions {
  std::uint32_t workers = 0;  // 0: one per node. Worker i runs on node i.
  fault::FailurePlan failures;
  std::uint32_t max_attempts = 4;
  Tick heartbeat_timeout = 1;
  std::uint64_t spill_bytes = 64 * kMiB;
  Tick max_ticks = 1'000'000;
  JobObserver* observer = nullptr;
};

struct TaskStats {
  TaskId id;
  std::string state;
  std::uint32_t executions = 0;
  std::uint32_t final_attempt = 0;
  std::optional<NodeId> node;
  double elapsed_ms = 0;
};

struct JobReport {
  std::string job_id;
  JobPhase phase = JobPhase::kMapping;
  std::uint32_t map_tasks = 0;
  std::uint32_t reduce_tasks = 0;
  std::uint64_t map_attempts = 0;     // map executions dispatched
  std::uint64_t reduce_attempts = 0;  // reduce executions dispatched
  std::uint64_t completed_maps_reexecuted = 0;
  std::uint64_t completed_reduces_reexecuted = 0;
  Tick ticks = 0;
  double elapsed_ms = 0;
  std::vector<std::string> parts;
  std::vector<NodeId> killed_nodes;
  std::vector<NodeId> dead_nodes;
  std::vector<std::string> shuffle_sources_lost;
  Counters counters;
  std::vector<TaskStats> tasks;
  std::string error;

  bool ok() const { return phase == JobPhase::kDone; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["job_id"] = job_id;
    j["phase"] = to_string(phase);
    j["map_attempts"] = map_attempts;
    j["reduce_attempts"] = reduce_attempts;
    j["elapsed_ms"] = elapsed_ms;
    j["parts"] = parts;
    j["map_tasks"] = map_tasks;
    j["reduce_tasks"] = reduce_tasks;
    j["completed_maps_reexecuted"] = completed_maps_reexecuted;
    j["completed_reduces_reexecuted"] = completed_reduces_reexecuted;
    j["ticks"] = ticks;
    j["killed_nodes"] = killed_nodes;
    j["dead_nodes"] = dead_nodes;
    j["shuffle_sources_lost"] = shuffle_sources_lost;
    j["counters"] = nlohmann::json::object();
    for (const auto& [k, v] : counters) j["counters"][k] = v;
    j["tasks"] = nlohmann::json::array();
    for (const auto& t : tasks) {
      nlohmann::json tj{{"id", t.id.to_string()},
                        {"state", t.state},
                        {"executions", t.executions},
                        {"attempt", t.final_attempt},
                        {"elapsed_ms", t.elapsed_ms}};
      tj["node"] = t.node ? nlohmann::json(*t.node) : nlohmann::json();
      j["tasks"].push_back(std::move(tj));
    }
    if (!error.empty()) j["error"] = error;
    return j;
  }
};

class JobFailed : public Error {
 public:
  explicit JobFailed(JobReport report)
      : Error("job failed: " + report.error), report_(std::move(report)) {}
  const JobReport& report() const { return report_; }

 private:
  JobReport report_;
};

namespace detail {

struct Outcome {
  bool delivered = false;  // false: the node was halted, nothing came back
  TaskId task;
  NodeId node = 0;
  std::uint32_t attempt = 0;
  bool ok = false;
  std::optional<MapTaskResult> map;
  std::optional<ReduceTaskResult> reduce;
  std::optional<TaskId> lost_source;
  std::optional<NodeId> lost_node;
  std::string error;
  double elapsed_ms = 0;
};

struct ResolvedFunctions {
  const MapFn* mapper;
  const ReduceFn* reducer;
  const ReduceFn* combiner;
};

class Master {
 public:
  Master(Dfs& dfs, const JobSpec& spec, const Registry& registry, const EngineOptions& opts)
      : dfs_(dfs), opts_(opts), injector_(opts.failures),
        detector_(dfs.config().num_nodes, opts.heartbeat_timeout) {
    state_.spec = spec;
    fns_ = resolve(spec, registry);
    const auto& cfg = dfs.config();
    workers_ = opts.workers == 0 ? cfg.num_nodes : opts.workers;
    if (workers_ > cfg.num_nodes) {
      throw InvalidConfig("workers (" + std::to_string(workers_) + ") exceed nodes (" +
                          std::to_string(cfg.num_nodes) + ")");
    }
    if (opts.max_attempts < 1) throw InvalidConfig("max_attempts must be >= 1");
    opts.failures.validate(cfg.num_nodes);
    if (!dfs.exists(spec.input_path)) throw UnknownInput(spec.input_path);
    const std::string out_prefix =
        spec.output_path.ends_with('/') ? spec.output_path : spec.output_path + "/";
    if (!dfs.list(out_prefix).empty()) throw AlreadyExists(spec.output_path);
    job_key_ = job_store_key(spec.job_id);

    const FileMeta meta = dfs.stat(spec.input_path);
    state_.map_tasks = plan_map_tasks(dfs, meta);
    state_.reduce_tasks = plan_reduce_tasks(spec.num_reducers);
    state_.phase = state_.map_tasks.empty() ? JobPhase::kReducing : JobPhase::kMapping;
  }

  JobReport run() {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      loop();
    } catch (const AttemptsExhausted& e) {
      fail(e.what());
    }
    for (NodeId n = 0; n < dfs_.config().num_nodes; ++n) dfs_.erase_local_prefix(n, job_key_ + ".");
    report_.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    finish_report();
    return report_;
  }

  const JobState& state() const { return state_; }

 private:
  static ResolvedFunctions resolve(const JobSpec& spec, const Registry& reg) {
    if (spec.num_reducers < 1) throw InvalidConfig("num_reducers must be >= 1");
    ResolvedFunctions f{reg.mapper(spec.mapper_id), reg.reducer(spec.reducer_id), nullptr};
    if (!f.mapper) throw UnknownFunction(spec.mapper_id);
    if (!f.reducer) throw UnknownFunction(spec.reducer_id);
    if (spec.combiner_id) {
      f.combiner = reg.reducer(*spec.combiner_id);
      if (!f.combiner) throw UnknownFunction(*spec.combiner_id);
    }
    return f;
  }

  void loop() {
    std::vector<Outcome> inflight;
    for (Tick now = 0;; ++now) {
      if (now > opts_.max_ticks) {
        fail("tick limit exceeded");
        return;
      }
      report_.ticks = now;

      // 1. failure plan
      for (NodeId n : injector_.inject(dfs_, now)) report_.killed_nodes.push_back(n);

      // 2. messages from the previous round
      for (auto& o : inflight) {
        if (!o.delivered || !dfs_.alive(o.node)) continue;
        deliver(o);
      }
      inflight.clear();

      // 3. heartbeats
      for (NodeId n = 0; n < dfs_.config().num_nodes; ++n) {
        if (dfs_.alive(n)) detector_.beat(n, now);
      }
      for (NodeId n : detector_.sweep(now)) on_node_dead(n);

      // 4. phase
      if (state_.phase == JobPhase::kMapping && state_.all_maps_completed()) {
        state_.phase = JobPhase::kReducing;
      }
      if (state_.phase == JobPhase::kReducing && state_.all_reduces_completed()) {
        state_.phase = JobPhase::kDone;
        return;
      }

      // 5. schedule and run
      auto assignments = schedule_round();
      if (assignments.empty() && !any_running()) {
        fail("no live workers left to run pending tasks");
        return;
      }
      for (const auto& a : assignments) {
        auto& t = state_.task(a.task);
        t.state = TaskState::kRunning;
        t.assigned_node = a.node;
        ++t.executions;
        if (!t.is_map() && ever_completed_.contains(t.id)) ++report_.completed_reduces_reexecuted;
        if (t.is_map()) {
          ++report_.map_attempts;
        } else {
          ++report_.reduce_attempts;
        }
        if (opts_.observer) opts_.observer->on_dispatch(state_, a.task, a.node, t.attempt, now);
      }
      inflight = execute(assignments);
    }
  }

  std::vector<Assignment> schedule_round() const {
    std::vector<bool> busy(dfs_.config().num_nodes, false);
    for (const auto* tasks : {&state_.map_tasks, &state_.reduce_tasks}) {
      for (const auto& t : *tasks) {
        if (t.state == TaskState::kRunning && t.assigned_node) busy[*t.assigned_node] = true;
      }
    }
    std::vector<NodeId> idle;
    for (NodeId n = 0; n < workers_; ++n) {
      if (!detector_.dead(n) && !busy[n]) idle.push_back(n);
    }
    std::vector<const TaskDescriptor*> pending;
    const auto& tasks =
        state_.phase == JobPhase::kMapping ? state_.map_tasks : state_.reduce_tasks;
    for (const auto& t : tasks) {
      if (t.state == TaskState::kPending) pending.push_back(&t);
    }
    return schedule(pending, idle);
  }

  bool any_running() const {
    for (const auto* tasks : {&state_.map_tasks, &state_.reduce_tasks}) {
      for (const auto& t : *tasks) {
        if (t.state == TaskState::kRunning) return true;
      }
    }
    return false;
  }

  // Runs one round. The job state is read-only until every worker returns.
  std::vector<Outcome> execute(const std::vector<Assignment>& assignments) {
    std::vector<Outcome> outcomes(assignments.size());
    std::vector<const TaskDescriptor*> maps;
    for (const auto& t : state_.map_tasks) maps.push_back(&t);
    {
      std::vector<std::jthread> threads;
      threads.reserve(assignments.size());
      for (std::size_t i = 0; i < assignments.size(); ++i) {
        threads.emplace_back([this, &outcomes, &maps, i, a = assignments[i]] {
          outcomes[i] = run_task(state_.task(a.task), a.node, maps);
        });
      }
    }
    return outcomes;
  }

  Outcome run_task(const TaskDescriptor& task, NodeId node,
                   std::span<const TaskDescriptor* const> maps) {
    Outcome o;
    o.task = task.id;
    o.node = node;
    o.attempt = task.attempt;
    // A halted node never starts the task and never answers.
    if (!dfs_.alive(node)) return o;
    o.delivered = true;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (task.is_map()) {
        MapTaskOptions mo;
        mo.spill_bytes = opts_.spill_bytes;
        mo.observer = opts_.observer;
        o.map = run_map_task(dfs_, node, job_key_, task, *fns_.mapper, fns_.combiner,
                             state_.spec.num_reducers, mo);
      } else {
        o.reduce = run_reduce_task(dfs_, state_.spec, task, maps, *fns_.reducer, opts_.observer);
      }
      o.ok = true;
    } catch (const ShuffleSourceLost& e) {
      o.lost_source = e.source();
      o.lost_node = e.node();
      o.error = e.what();
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    o.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return o;
  }

  void deliver(Outcome& o) {
    auto& t = state_.task(o.task);
    // Stale: the task was requeued while this attempt was in flight.
    if (t.state != TaskState::kRunning || t.attempt != o.attempt || t.assigned_node != o.node) {
      return;
    }
    t.elapsed_ms = o.elapsed_ms;
    if (o.ok) {
      t.state = TaskState::kCompleted;
      if (o.map) {
        t.result_locations = std::move(o.map->locations);
        t.counters = std::move(o.map->counters);
      } else {
        report_parts_[t.partition()] = o.reduce->part.path;
        t.counters = std::move(o.reduce->counters);
      }
      injector_.note_completed(t.id);
      ever_completed_.insert(t.id);
      if (opts_.observer) opts_.observer->on_complete(state_, t.id);
      return;
    }
    t.last_error = o.error;
    if (o.lost_source) {
      report_.shuffle_sources_lost.push_back(o.lost_source->to_string());
      if (opts_.observer) opts_.observer->on_shuffle_source_lost(t.id, *o.lost_source);
      fault::requeue(t, opts_.max_attempts);
      // The reducer could not reach the node: treat that as a death notice.
      if (detector_.declare(*o.lost_node)) on_node_dead(*o.lost_node);
      return;
    }
    last_error_ = t.id.to_string() + ": " + o.error;
    fault::requeue(t, opts_.max_attempts);
  }

  void on_node_dead(NodeId n) {
    report_.dead_nodes.push_back(n);
    const auto outcome = fault::recover(state_, n, opts_.max_attempts);
    report_.completed_maps_reexecuted += outcome.reverted_maps.size();
    if (opts_.observer) opts_.observer->on_recover(state_, outcome);
  }

  void fail(const std::string& why) {
    state_.phase = JobPhase::kFailed;
    report_.error = last_error_.empty() ? why : why + " (last task error: " + last_error_ + ")";
  }

  void finish_report() {
    report_.job_id = state_.spec.job_id;
    report_.phase = state_.phase;
    report_.map_tasks = static_cast<std::uint32_t>(state_.map_tasks.size());
    report_.reduce_tasks = static_cast<std::uint32_t>(state_.reduce_tasks.size());
    report_.parts.clear();
    for (std::uint32_t p = 0; p < state_.spec.num_reducers; ++p) {
      auto it = report_parts_.find(p);
      if (it != report_parts_.end()) report_.parts.push_back(it->second);
    }
    report_.counters.clear();
    for (const auto* tasks : {&state_.map_tasks, &state_.reduce_tasks}) {
      for (const auto& t : *tasks) {
        if (t.state == TaskState::kCompleted) merge_counters(report_.counters, t.counters);
        report_.tasks.push_back(
            {t.id, to_string(t.state), t.executions, t.attempt, t.assigned_node, t.elapsed_ms});
      }
    }
  }

  Dfs& dfs_;
  EngineOptions opts_;
  JobState state_;
  ResolvedFunctions fns_{};
  std::uint32_t workers_ = 0;
  std::string job_key_;
  fault::FailureInjector injector_;
  fault::FailureDetector detector_;
  JobReport report_;
  std::map<std::uint32_t, std::string> report_parts_;
  std::string last_error_;
  std::set<TaskId> ever_completed_;
};

}  // namespace detail

// Runs a job to completion. Throws UnknownInput / UnknownFunction /
// InvalidConfig / InvalidPlan / AlreadyExists before any task starts, and
// JobFailed (carrying the report) if a task exhausts its attempts.
inline JobReport submit_job(Dfs& dfs, const JobSpec& spec, const Registry& registry,
                            const EngineOptions& opts = {}) {
  detail::Master master(dfs, spec, registry, opts);
  JobReport report = master.run();
  if (!report.ok()) throw JobFailed(std::move(report));
  return report;
}

}  // namespace minimapred
