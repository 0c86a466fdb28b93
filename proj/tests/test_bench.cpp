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

#include "minimapred.hpp"

namespace minimapred::bench {
namespace {

BenchRow row(std::string job, std::uint32_t workers, std::uint64_t size, std::uint32_t rep, double secs,
             bool failed = false) {
  return BenchRow{std::move(job), size, workers, rep, secs, 4, 2, 42, failed};
}

const ReportLine* find(const std::vector<ReportLine>& lines, std::string_view kind, std::uint32_t w,
                       std::uint64_t s) {
  for (const auto& l : lines) {
    if (l.kind == kind && l.workers == w && l.size_bytes == s) return &l;
  }
  return nullptr;
}

TEST(BenchMatrixTest, DefaultsAndValidation) {
  BenchMatrix m;
  EXPECT_EQ(m.sizes, (std::vector<std::uint64_t>{64 * kMiB, 256 * kMiB, 512 * kMiB}));
  EXPECT_EQ(m.worker_counts, (std::vector<std::uint32_t>{1, 2, 3, 4}));
  EXPECT_EQ(m.repetitions, 3u);
  EXPECT_EQ(BenchMatrix::paper_sizes(), (std::vector<std::uint64_t>{350 * kMiB, kGiB, 2 * kGiB}));
  EXPECT_NO_THROW(m.validate());
  m.worker_counts = {5};
  EXPECT_THROW(m.validate(), InvalidConfig);
  m = BenchMatrix{};
  m.job_id = "grep";
  EXPECT_THROW(m.validate(), InvalidConfig);
  m = BenchMatrix{};
  m.repetitions = 0;
  EXPECT_THROW(m.validate(), InvalidConfig);
}

TEST(BenchMatrixTest, FromJson) {
  const auto j = nlohmann::json::parse(R"({"job": "uservisits", "sizes": ["1M", 2048], "workers": [1, 2],
                                           "repetitions": 2, "seed": 7, "chunk_size": "64K"})");
  const BenchMatrix m = BenchMatrix::from_json(j);
  EXPECT_EQ(m.job_id, "uservisits");
  EXPECT_EQ(m.sizes, (std::vector<std::uint64_t>{kMiB, 2048}));
  EXPECT_EQ(m.worker_counts, (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(m.repetitions, 2u);
  EXPECT_EQ(m.seed, 7u);
  EXPECT_EQ(m.chunk_size, 64 * kKiB);
  EXPECT_EQ(m.nodes, 4u);
  EXPECT_THROW(BenchMatrix::from_json(nlohmann::json::parse(R"({"sizes": ["lots"]})")), InvalidConfig);
  EXPECT_THROW(BenchMatrix::from_json(nlohmann::json::parse(R"({"repetitions": "x"})")), InvalidConfig);
}

TEST(RunMatrixTest, OneSizeTwoWorkerCountsOneRep) {
  BenchMatrix m;
  m.sizes = {64 * kKiB};
  m.worker_counts = {1, 4};
  m.repetitions = 1;
  m.chunk_size = 16 * kKiB;
  std::vector<BenchRow> seen;
  const auto rows = run_matrix(m, [&](const BenchRow& r) { seen.push_back(r); });
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(seen, rows);
  EXPECT_EQ(rows[0].workers, 1u);
  EXPECT_EQ(rows[1].workers, 4u);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.failed);
    EXPECT_EQ(r.map_tasks, 4u);
    EXPECT_EQ(r.reduce_tasks, 2u);
    EXPECT_EQ(r.size_bytes, 64 * kKiB);
    EXPECT_GT(r.elapsed_seconds, 0.0);
  }
}

TEST(RunMatrixTest, UservisitsCells) {
  BenchMatrix m;
  m.job_id = "uservisits";
  m.sizes = {32 * kKiB, 64 * kKiB};
  m.worker_counts = {2};
  m.repetitions = 2;
  m.chunk_size = 16 * kKiB;
  const auto rows = run_matrix(m);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].size_bytes, 32 * kKiB);
  EXPECT_EQ(rows[3].repetition, 1u);
}

TEST(CsvTest, RowsRoundTrip) {
  std::vector<BenchRow> rows = {row("wordcount", 1, 100, 0, 1.25), row("wordcount", 4, 100, 1, 0.5, true)};
  const std::string text = format_rows_csv(rows);
  EXPECT_TRUE(text.starts_with("job,workers,size_bytes,repetition,elapsed_seconds,map_tasks,reduce_tasks,seed,failed\n"));
  EXPECT_EQ(parse_rows_csv(text), rows);
  EXPECT_EQ(parse_rows_csv(format_rows_csv(rows, false)), rows);
  EXPECT_THROW(parse_rows_csv("wordcount,1,2\n"), ReportError);
  EXPECT_THROW(parse_rows_csv("wordcount,x,100,0,1.0,1,1,42,0\n"), ReportError);
}

TEST(SpeedupReportTest, EqualTimesGiveUnitSpeedup) {
  std::vector<BenchRow> rows = {row("wc", 1, 100, 0, 2.0), row("wc", 2, 100, 0, 2.0)};
  const auto lines = speedup_report(rows);
  const auto* base = find(lines, "speedup", 1, 100);
  const auto* two = find(lines, "speedup", 2, 100);
  ASSERT_TRUE(base && two);
  EXPECT_DOUBLE_EQ(base->ratio, 1.0);
  EXPECT_DOUBLE_EQ(two->ratio, 1.0);
  EXPECT_FALSE(base->flagged);
  EXPECT_TRUE(two->flagged);  // ideal is 2
}

TEST(SpeedupReportTest, LargeFileThreadTimings) {
  // 2 GB column of the OpenMP measurements: 1 thread vs 4 threads.
  std::vector<BenchRow> rows = {row("wc", 1, 2000, 0, 469.34), row("wc", 4, 2000, 0, 147.031)};
  const auto* four = find(speedup_report(rows), "speedup", 4, 2000);
  ASSERT_TRUE(four);
  EXPECT_NEAR(four->ratio, 3.19, 0.005);
  EXPECT_EQ(four->ideal, 4.0);
  EXPECT_FALSE(four->flagged);  // 3.19 / 4 - 1 = -0.2
}

TEST(SpeedupReportTest, HadoopSizeScaling) {
  // Hadoop elapsed at 350 MB, 1 GB, 2 GB.
  std::vector<BenchRow> rows = {row("wc", 1, 350, 0, 79.355), row("wc", 1, 1000, 0, 216.076),
                                row("wc", 1, 2000, 0, 416.952)};
  const auto lines = speedup_report(rows);
  const auto* big = find(lines, "scaling", 1, 2000);
  ASSERT_TRUE(big);
  EXPECT_NEAR(big->ratio, 5.25, 0.005);
  EXPECT_NEAR(big->ideal, 2000.0 / 350.0, 1e-12);
  EXPECT_NEAR(big->ideal, 5.71, 0.005);
  EXPECT_FALSE(big->flagged);
  const auto* mid = find(lines, "scaling", 1, 1000);
  ASSERT_TRUE(mid);
  EXPECT_NEAR(mid->ratio, 216.076 / 79.355, 1e-12);
}

TEST(SpeedupReportTest, MediansOfRepetitions) {
  std::vector<BenchRow> rows = {row("wc", 1, 10, 0, 9.0), row("wc", 1, 10, 1, 1.0), row("wc", 1, 10, 2, 3.0),
                                row("wc", 2, 10, 0, 1.5), row("wc", 2, 10, 1, 100.0, true),
                                row("wc", 2, 10, 2, 1.5)};
  const auto* two = find(speedup_report(rows), "speedup", 2, 10);
  ASSERT_TRUE(two);
  EXPECT_DOUBLE_EQ(two->baseline_elapsed, 3.0);
  EXPECT_DOUBLE_EQ(two->median_elapsed, 1.5);
  EXPECT_DOUBLE_EQ(two->ratio, 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

TEST(SpeedupReportTest, MissingBaselineIsAnError) {
  EXPECT_THROW(speedup_report(std::vector<BenchRow>{row("wc", 2, 10, 0, 1.0)}), ReportError);
  EXPECT_THROW(speedup_report(std::vector<BenchRow>{row("wc", 1, 10, 0, 1.0, true), row("wc", 2, 10, 0, 1.0)}),
               ReportError);
  EXPECT_THROW(speedup_report(std::vector<BenchRow>{}), ReportError);
}

TEST(SpeedupReportTest, CsvHasRatioColumn) {
  std::vector<BenchRow> rows = {row("wc", 1, 10, 0, 1.0), row("wc", 2, 10, 0, 0.5)};
  const std::string csv = format_report_csv(speedup_report(rows));
  EXPECT_TRUE(csv.starts_with("job,kind,workers,size_bytes,median_elapsed_seconds,baseline_elapsed_seconds,ratio,"));
  EXPECT_NE(csv.find("wc,speedup,1,10,1,1,1,1,0\n"), std::string::npos);
  EXPECT_NE(csv.find("wc,speedup,2,10,0.5,1,2,2,0\n"), std::string::npos);
}

TEST(PlotDataTest, SeriesPerWorkerCount) {
  std::vector<BenchRow> rows;
  for (std::uint32_t w : {4u, 1u}) {
    for (std::uint64_t s : {300u, 100u, 200u}) rows.push_back(row("wc", w, s, 0, static_cast<double>(s) / w));
  }
  const std::string csv = emit_plot_data(rows);
  EXPECT_EQ(csv,
            "job,workers,size_bytes,elapsed_seconds\n"
            "wc,1,100,100\nwc,1,200,200\nwc,1,300,300\n"
            "wc,4,100,25\nwc,4,200,50\nwc,4,300,75\n");
  EXPECT_EQ(emit_plot_data(rows), csv);
}

}  // namespace
}  // namespace minimapred::bench
