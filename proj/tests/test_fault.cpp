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

#include <mutex>

#include "minimapred.hpp"
#include "test_support.hpp"

namespace minimapred {
namespace {

using fault::AfterTask;
using fault::AtTick;
using fault::FailureEvent;
using fault::FailurePlan;
using testing_util::Gen;
using testing_util::read_parts;

TEST(FailurePlanTest, ParsesBothForms) {
  EXPECT_EQ(fault::parse_failure_event("1:5"), (FailureEvent{1, AtTick{5}, true}));
  EXPECT_EQ(fault::parse_failure_event("3:after:map-2"), (FailureEvent{3, AfterTask{TaskId::map(2)}, true}));
  EXPECT_EQ(fault::parse_failure_event("0:after:reduce-1").to_string(), "0:after:reduce-1");
  EXPECT_EQ(fault::parse_failure_event("2:0").to_string(), "2:0");
  for (const char* bad : {"", "1", "x:5", "1:", "1:-2", "1:after:", "1:after:task-3", "-1:3", "1:5x"}) {
    EXPECT_THROW(fault::parse_failure_event(bad), InvalidPlan) << bad;
  }
}

TEST(FailurePlanTest, Validation) {
  EXPECT_NO_THROW(FailurePlan::parse({"0:1", "3:after:map-0"}).validate(4));
  EXPECT_THROW(FailurePlan::parse({"4:1"}).validate(4), InvalidPlan);
  EXPECT_THROW(FailurePlan::parse({"1:1", "1:after:map-0"}).validate(4), InvalidPlan);
  FailurePlan rejoin{{FailureEvent{0, AtTick{1}, false}}};
  EXPECT_THROW(rejoin.validate(4), InvalidPlan);
  EXPECT_TRUE(FailurePlan{}.empty());
}

TEST(FailureInjectorTest, FiresEachEventOnce) {
  fault::FailureInjector inj(FailurePlan::parse({"2:3", "1:after:map-4"}));
  EXPECT_TRUE(inj.due(0).empty());
  EXPECT_TRUE(inj.due(2).empty());
  EXPECT_EQ(inj.due(3), (std::vector<NodeId>{2}));
  EXPECT_TRUE(inj.due(4).empty());
  inj.note_completed(TaskId::map(3));
  EXPECT_TRUE(inj.due(5).empty());
  EXPECT_FALSE(inj.all_fired());
  inj.note_completed(TaskId::map(4));
  EXPECT_EQ(inj.due(6), (std::vector<NodeId>{1}));
  EXPECT_TRUE(inj.all_fired());
  ASSERT_EQ(inj.fired().size(), 2u);
  EXPECT_EQ(inj.fired()[1].at, 6u);
}

TEST(FailureInjectorTest, KillMakesLocalRunsUnreadable) {
  Dfs dfs(ClusterConfig{3, 16, 1, 1});
  dfs.put_local(2, "run", "x");
  fault::FailureInjector inj(FailurePlan::parse({"2:5"}));
  for (Tick t = 0; t < 5; ++t) {
    EXPECT_TRUE(inj.inject(dfs, t).empty());
    EXPECT_NE(dfs.open_local(2, "run"), nullptr);
  }
  EXPECT_EQ(inj.inject(dfs, 5), (std::vector<NodeId>{2}));
  for (Tick t = 6; t < 9; ++t) {
    inj.inject(dfs, t);
    EXPECT_EQ(dfs.open_local(2, "run"), nullptr);
  }
}

TEST(FailureDetectorTest, DeclaresAfterTimeoutOnce) {
  fault::FailureDetector det(3, 1);
  for (NodeId n = 0; n < 3; ++n) det.beat(n, 0);
  // Node 1 stops reporting after tick 0.
  for (Tick now = 1; now <= 4; ++now) {
    det.beat(0, now);
    det.beat(2, now);
    const auto dead = det.sweep(now);
    if (now == 2) {
      EXPECT_EQ(dead, (std::vector<NodeId>{1}));
    } else {
      EXPECT_TRUE(dead.empty()) << now;
    }
  }
  EXPECT_TRUE(det.dead(1));
  EXPECT_FALSE(det.declare(1));
  EXPECT_TRUE(det.declare(0));
}

TEST(HeartbeatTest, Expiry) {
  fault::Heartbeat hb{0, 10, 3};
  EXPECT_FALSE(hb.expired(10));
  EXPECT_FALSE(hb.expired(13));
  EXPECT_TRUE(hb.expired(14));
}

// --- recover -----------------------------------------------------------------

JobState two_by_two() {
  JobState s;
  s.spec.num_reducers = 2;
  for (std::uint32_t i = 0; i < 2; ++i) {
    TaskDescriptor m;
    m.id = TaskId::map(i);
    m.payload = InputSplit{};
    s.map_tasks.push_back(m);
  }
  s.reduce_tasks = plan_reduce_tasks(2);
  return s;
}

void complete_map(TaskDescriptor& t, NodeId node) {
  t.state = TaskState::kCompleted;
  t.assigned_node = node;
  t.result_locations = {{node, "h0", 0, 0}, {node, "h1", 0, 0}};
}

TEST(RecoverTest, RevertsCompletedMapButNotCompletedReduce) {
  JobState s = two_by_two();
  complete_map(s.map_tasks[0], 0);
  complete_map(s.map_tasks[1], 1);
  s.phase = JobPhase::kReducing;
  s.reduce_tasks[0].state = TaskState::kCompleted;
  s.reduce_tasks[0].assigned_node = 1;
  s.reduce_tasks[1].state = TaskState::kRunning;
  s.reduce_tasks[1].assigned_node = 0;

  const auto out = fault::recover(s, 1);
  EXPECT_EQ(s.map_tasks[1].state, TaskState::kPending);
  EXPECT_EQ(s.map_tasks[1].attempt, 1u);
  EXPECT_TRUE(s.map_tasks[1].result_locations.empty());
  EXPECT_EQ(s.map_tasks[0].state, TaskState::kCompleted);
  EXPECT_EQ(s.reduce_tasks[0].state, TaskState::kCompleted);
  EXPECT_EQ(s.reduce_tasks[0].attempt, 0u);
  // The reduce still running elsewhere restarts its shuffle.
  EXPECT_EQ(s.reduce_tasks[1].state, TaskState::kPending);
  EXPECT_EQ(s.phase, JobPhase::kMapping);
  EXPECT_EQ(out.reverted_maps, (std::vector<TaskId>{TaskId::map(1)}));
  EXPECT_EQ(out.restarted_reduces, (std::vector<TaskId>{TaskId::reduce(1)}));
  EXPECT_TRUE(out.requeued_running.empty());
}

TEST(RecoverTest, OnlyARunningMap) {
  JobState s = two_by_two();
  complete_map(s.map_tasks[0], 0);
  s.map_tasks[1].state = TaskState::kRunning;
  s.map_tasks[1].assigned_node = 2;
  const JobState before = s;

  const auto out = fault::recover(s, 2);
  EXPECT_EQ(s.map_tasks[1].state, TaskState::kPending);
  EXPECT_EQ(s.map_tasks[1].attempt, 1u);
  EXPECT_FALSE(s.map_tasks[1].assigned_node.has_value());
  EXPECT_EQ(s.map_tasks[0].state, before.map_tasks[0].state);
  EXPECT_EQ(s.map_tasks[0].attempt, 0u);
  for (const auto& r : s.reduce_tasks) EXPECT_EQ(r.state, TaskState::kPending);
  EXPECT_EQ(out.requeued_running, (std::vector<TaskId>{TaskId::map(1)}));
  EXPECT_TRUE(out.reverted_maps.empty());
}

TEST(RecoverTest, MapsKeptOnceAllReducesAreDone) {
  JobState s = two_by_two();
  complete_map(s.map_tasks[0], 1);
  complete_map(s.map_tasks[1], 1);
  for (auto& r : s.reduce_tasks) r.state = TaskState::kCompleted;
  const auto out = fault::recover(s, 1);
  EXPECT_TRUE(out.reverted_maps.empty());
  EXPECT_EQ(s.map_tasks[0].state, TaskState::kCompleted);
}

TEST(RecoverTest, AttemptBudget) {
  TaskDescriptor t;
  t.id = TaskId::map(0);
  t.state = TaskState::kRunning;
  fault::requeue(t, 4);
  fault::requeue(t, 4);
  fault::requeue(t, 4);
  EXPECT_EQ(t.attempt, 3u);
  EXPECT_THROW(fault::requeue(t, 4), AttemptsExhausted);
  EXPECT_EQ(t.state, TaskState::kFailed);
}

// --- engine under failures -----------------------------------------------------

class Counting : public JobObserver {
 public:
  void on_recover(const JobState&, const RecoveryOutcome& o) override {
    std::lock_guard lock(mu_);
    ++recoveries;
    for (const auto& id : o.reverted_maps) ++reverted[id];
  }
  void on_shuffle_source_lost(TaskId, TaskId source) override {
    std::lock_guard lock(mu_);
    lost.push_back(source);
  }
  int recoveries = 0;
  std::map<TaskId, int> reverted;
  std::vector<TaskId> lost;

 private:
  std::mutex mu_;
};

struct Run {
  JobReport report;
  std::vector<std::string> parts;
};

Run run_wordcount(const std::string& text, const ClusterConfig& cfg, FailurePlan plan, std::uint32_t reducers,
                  JobObserver* obs = nullptr, bool combiner = true) {
  Dfs dfs(cfg);
  dfs.put_file("/in", text);
  EngineOptions opts;
  opts.failures = std::move(plan);
  opts.observer = obs;
  Run r;
  r.report = submit_job(dfs, jobs::wordcount_spec("wc", "/in", "/out", {reducers, combiner}),
                        jobs::builtin_registry(), opts);
  r.parts = read_parts(dfs, r.report);
  return r;
}

TEST(EngineFaultTest, FailureFreePlanNeverRecovers) {
  const std::string text = Gen(1).words(20000, 400);
  Counting obs;
  const auto r = run_wordcount(text, {4, 2048, 2, 42}, {}, 2, &obs);
  EXPECT_EQ(obs.recoveries, 0);
  for (const auto& t : r.report.tasks) {
    EXPECT_EQ(t.final_attempt, 0u) << t.id.to_string();
    EXPECT_EQ(t.executions, 1u) << t.id.to_string();
  }
  EXPECT_EQ(r.report.map_attempts, r.report.map_tasks);
  EXPECT_EQ(r.report.reduce_attempts, r.report.reduce_tasks);
}

TEST(EngineFaultTest, PlanThatNeverFiresChangesNothing) {
  const std::string text = Gen(2).words(20000, 400);
  const auto base = run_wordcount(text, {4, 2048, 2, 42}, {}, 3);
  const auto late = run_wordcount(text, {4, 2048, 2, 42}, FailurePlan::parse({"2:1000000"}), 3);
  EXPECT_EQ(base.parts, late.parts);
  EXPECT_EQ(base.report.map_attempts, late.report.map_attempts);
  EXPECT_EQ(base.report.ticks, late.report.ticks);
}

TEST(EngineFaultTest, TwoKillsMatchFailureFreeOutput) {
  const std::string text = Gen(3).words(200000, 3000);
  const ClusterConfig cfg{4, 32 * 1024, 2, 42};
  const auto base = run_wordcount(text, cfg, {}, 2);
  const auto hurt = run_wordcount(text, cfg, FailurePlan::parse({"1:5", "3:after:map-2"}), 2);
  ASSERT_GT(base.report.map_tasks, 20u);
  EXPECT_EQ(base.parts, hurt.parts);
  EXPECT_GT(hurt.report.completed_maps_reexecuted, 0u);
  EXPECT_EQ(hurt.report.completed_reduces_reexecuted, 0u);
  EXPECT_GT(hurt.report.map_attempts, hurt.report.map_tasks);
  EXPECT_EQ(hurt.report.killed_nodes.size(), 2u);
}

TEST(EngineFaultTest, OutcomeIsDeterministic) {
  const std::string text = Gen(4).words(100000, 2000);
  const ClusterConfig cfg{4, 16 * 1024, 2, 7};
  const auto plan = FailurePlan::parse({"0:3", "2:after:map-5"});
  const auto a = run_wordcount(text, cfg, plan, 3);
  const auto b = run_wordcount(text, cfg, plan, 3);
  EXPECT_EQ(a.parts, b.parts);
  auto strip = [](nlohmann::json j) {
    j.erase("elapsed_ms");
    for (auto& t : j["tasks"]) t.erase("elapsed_ms");
    return j;
  };
  EXPECT_EQ(strip(a.report.to_json()), strip(b.report.to_json()));
}

// The node holding map-3's output dies after the reduce phase has started:
// a reducer sees the run vanish, the master re-runs map-3 once, and the job
// still produces the failure-free output.
TEST(EngineFaultTest, LostRunIsObservedThenResolved) {
  const std::string text = Gen(5).words(40000, 1000);
  const std::uint64_t chunk = text.size() / 4 + 1;
  const ClusterConfig cfg{4, chunk, 2, 42};
  const std::uint32_t reducers = 8;
  const auto base = run_wordcount(text, cfg, {}, reducers);
  ASSERT_EQ(base.report.map_tasks, 4u);
  const NodeId holder = *base.report.tasks[3].node;

  Counting obs;
  FailurePlan plan{{FailureEvent{holder, AfterTask{TaskId::map(3)}, true}}};
  const auto hurt = run_wordcount(text, cfg, plan, reducers, &obs);
  EXPECT_EQ(hurt.parts, base.parts);
  ASSERT_FALSE(obs.lost.empty());
  for (const auto& src : obs.lost) EXPECT_EQ(src, TaskId::map(3));
  EXPECT_EQ(obs.reverted[TaskId::map(3)], 1);
  EXPECT_EQ(hurt.report.tasks[3].executions, 2u);
  EXPECT_EQ(hurt.report.completed_reduces_reexecuted, 0u);
  EXPECT_FALSE(hurt.report.shuffle_sources_lost.empty());
}

TEST(EngineFaultTest, CompletedReduceOutputSurvivesItsNode) {
  const std::string text = Gen(6).words(20000, 500);
  const ClusterConfig cfg{4, 4096, 2, 42};
  const auto base = run_wordcount(text, cfg, {}, 2);
  const NodeId reducer_node = *base.report.tasks[base.report.map_tasks].node;
  const auto hurt =
      run_wordcount(text, cfg, FailurePlan{{FailureEvent{reducer_node, AfterTask{TaskId::reduce(0)}, true}}}, 2);
  EXPECT_EQ(hurt.parts, base.parts);
  EXPECT_EQ(hurt.report.completed_reduces_reexecuted, 0u);
}

TEST(EngineFaultTest, AllNodesDeadFailsTheJob) {
  const std::string text = Gen(7).words(20000, 500);
  Dfs dfs(ClusterConfig{2, 1024, 2, 1});
  dfs.put_file("/in", text);
  EngineOptions opts;
  opts.failures = FailurePlan::parse({"0:2", "1:2"});
  EXPECT_THROW(submit_job(dfs, jobs::wordcount_spec("wc", "/in", "/out"), jobs::builtin_registry(), opts),
               JobFailed);
}

TEST(EngineFaultTest, InvalidPlanRejectedUpFront) {
  Dfs dfs(ClusterConfig{2, 1024, 2, 1});
  dfs.put_file("/in", "a\n");
  EngineOptions opts;
  opts.failures = FailurePlan::parse({"5:1"});
  EXPECT_THROW(submit_job(dfs, jobs::wordcount_spec("wc", "/in", "/out"), jobs::builtin_registry(), opts),
               InvalidPlan);
}

// Property: any single-node kill (tick or after-task trigger) with two
// replicas leaves the output byte-identical to the failure-free run.
TEST(EngineFaultProperty, SingleKillNeverChangesOutput) {
  Gen gen(99);
  for (int iter = 0; iter < 25; ++iter) {
    const std::string text = gen.words(gen.range(2000, 30000), gen.range(5, 2000));
    const ClusterConfig cfg{4, gen.range(1024, 16384), 2, gen.below(1000)};
    const std::uint32_t reducers = static_cast<std::uint32_t>(gen.range(1, 5));
    const bool combiner = gen.coin();
    const auto base = run_wordcount(text, cfg, {}, reducers, nullptr, combiner);
    FailureEvent ev;
    ev.node = static_cast<NodeId>(gen.below(4));
    if (gen.coin()) {
      ev.trigger = AtTick{gen.below(base.report.ticks + 1)};
    } else if (gen.coin()) {
      ev.trigger = AfterTask{TaskId::map(static_cast<std::uint32_t>(gen.below(base.report.map_tasks)))};
    } else {
      ev.trigger = AfterTask{TaskId::reduce(static_cast<std::uint32_t>(gen.below(reducers)))};
    }
    const auto hurt = run_wordcount(text, cfg, FailurePlan{{ev}}, reducers, nullptr, combiner);
    ASSERT_EQ(base.parts, hurt.parts) << "iter " << iter << " plan " << ev.to_string();
    ASSERT_EQ(hurt.report.completed_reduces_reexecuted, 0u) << ev.to_string();
  }
}

}  // namespace
}  // namespace minimapred
