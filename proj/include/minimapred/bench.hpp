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

// Benchmark harness: input-size x worker-count matrices of isolated jobs,
// CSV rows, speedup/scaling reports and plot data.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"
#include "minimapred/jobs.hpp"
#include "minimapred/master.hpp"

namespace minimapred::bench {

inline constexpr std::uint64_t kMaxLineBytes = 4096;

// Deterministic vocabulary of distinct lowercase-ish words, 3..12 bytes.
inline std::vector<std::string> make_vocabulary(std::uint32_t vocab_size, std::uint64_t seed) {
  Rng rng(seed ^ 0x564f434142ull);
  std::vector<std::string> words;
  std::set<std::string> seen;
  words.reserve(vocab_size);
  static constexpr std::string_view kAlpha = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  while (words.size() < vocab_size) {
    const std::size_t len = rng.between(3, 12);
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(kAlpha[rng.below(kAlpha.size())]);
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

// Unordered pseudo-random token stream. Lines hold 1..24 tokens and stay
// under kMaxLineBytes; output never exceeds size_bytes and falls short of it
// by less than one token plus its separator.
inline std::string generate_tokens(std::uint64_t size_bytes, std::uint32_t vocab_size,
                                   std::uint64_t seed) {
  if (vocab_size < 1) throw InvalidConfig("vocab_size must be >= 1");
  const auto vocab = make_vocabulary(vocab_size, seed);
  Rng rng(seed);
  std::string out;
  out.reserve(size_bytes);
  std::uint64_t line_tokens = 0;
  std::uint64_t line_bytes = 0;
  std::uint64_t line_target = rng.between(1, 24);
  while (true) {
    const std::string& w = vocab[rng.below(vocab.size())];
    if (out.size() + w.size() + 1 > size_bytes) break;
    if (line_tokens > 0 && line_bytes + w.size() + 1 > kMaxLineBytes) {
      out.back() = '\n';
      line_tokens = line_bytes = 0;
      line_target = rng.between(1, 24);
    }
    out.append(w);
    ++line_tokens;
    line_bytes += w.size() + 1;
    if (line_tokens >= line_target) {
      out.push_back('\n');
      line_tokens = line_bytes = 0;
      line_target = rng.between(1, 24);
    } else {
      out.push_back(' ');
    }
  }
  if (!out.empty()) out.back() = '\n';
  return out;
}

inline FileMeta generate_tokens(Dfs& dfs, std::string_view path, std::uint64_t size_bytes,
                                std::uint32_t vocab_size, std::uint64_t seed) {
  return dfs.put_file(path, generate_tokens(size_bytes, vocab_size, seed));
}

// ---------------------------------------------------------------------------

struct BenchMatrix {
  std::string job_id = "wordcount";
  std::vector<std::uint64_t> sizes = {64 * kMiB, 256 * kMiB, 512 * kMiB};
  std::vector<std::uint32_t> worker_counts = {1, 2, 3, 4};
  std::uint32_t repetitions = 3;
  std::uint64_t seed = 42;
  std::uint32_t nodes = 4;
  std::uint64_t chunk_size = 16 * kMiB;
  std::uint32_t replication = 2;
  std::uint32_t reducers = 2;
  std::uint32_t vocab_size = 10000;
  bool combiner = true;

  static std::vector<std::uint64_t> paper_sizes() { return {350 * kMiB, 1 * kGiB, 2 * kGiB}; }

  void validate() const {
    if (job_id != "wordcount" && job_id != "uservisits") throw InvalidConfig("unknown job " + job_id);
    if (sizes.empty()) throw InvalidConfig("matrix needs at least one size");
    if (worker_counts.empty()) throw InvalidConfig("matrix needs at least one worker count");
    if (repetitions < 1) throw InvalidConfig("repetitions must be >= 1");
    for (auto w : worker_counts) {
      if (w < 1 || w > nodes) {
        throw InvalidConfig("worker count " + std::to_string(w) + " outside [1, " +
                            std::to_string(nodes) + "]");
      }
    }
    ClusterConfig{nodes, chunk_size, replication, seed}.validate();
    if (reducers < 1) throw InvalidConfig("reducers must be >= 1");
  }

  // Keys: job, sizes, workers, repetitions, seed, nodes, chunk_size,
  // replication, reducers, vocab_size, combiner. Sizes may be numbers or
  // strings with K/M/G suffixes. Missing keys keep their defaults.
  static BenchMatrix from_json(const nlohmann::json& j) {
    BenchMatrix m;
    auto size_of = [](const nlohmann::json& v) -> std::uint64_t {
      if (v.is_number_unsigned() || v.is_number_integer()) return v.get<std::uint64_t>();
      auto s = parse_size(v.get<std::string>());
      if (!s) throw InvalidConfig("bad size " + v.dump());
      return *s;
    };
    try {
      if (j.contains("job")) m.job_id = j["job"].get<std::string>();
      if (j.contains("sizes")) {
        m.sizes.clear();
        for (const auto& v : j["sizes"]) m.sizes.push_back(size_of(v));
      }
      if (j.contains("workers")) m.worker_counts = j["workers"].get<std::vector<std::uint32_t>>();
      if (j.contains("repetitions")) m.repetitions = j["repetitions"].get<std::uint32_t>();
      if (j.contains("seed")) m.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("nodes")) m.nodes = j["nodes"].get<std::uint32_t>();
      if (j.contains("chunk_size")) m.chunk_size = size_of(j["chunk_size"]);
      if (j.contains("replication")) m.replication = j["replication"].get<std::uint32_t>();
      if (j.contains("reducers")) m.reducers = j["reducers"].get<std::uint32_t>();
      if (j.contains("vocab_size")) m.vocab_size = j["vocab_size"].get<std::uint32_t>();
      if (j.contains("combiner")) m.combiner = j["combiner"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidConfig(std::string("matrix config: ") + e.what());
    }
    return m;
  }
};

struct BenchRow {
  std::string job_id;
  std::uint64_t size_bytes = 0;
  std::uint32_t workers = 0;
  std::uint32_t repetition = 0;
  double elapsed_seconds = 0;
  std::uint32_t map_tasks = 0;
  std::uint32_t reduce_tasks = 0;
  std::uint64_t seed = 0;
  bool failed = false;

  bool operator==(const BenchRow&) const = default;
};

inline std::string generate_input(const BenchMatrix& m, std::uint64_t size_bytes) {
  if (m.job_id == "uservisits") return jobs::generate_uservisits_bytes(size_bytes, m.seed);
  return generate_tokens(size_bytes, m.vocab_size, m.seed);
}

// Runs one (size, workers, repetition) cell per job on a fresh cluster,
// strictly one after another. Only submit_job is timed. A failed job yields a
// row with failed=true and the matrix continues.
inline std::vector<BenchRow> run_matrix(const BenchMatrix& m,
                                        const std::function<void(const BenchRow&)>& on_row = {}) {
  m.validate();
  std::vector<BenchRow> rows;
  for (std::uint64_t size : m.sizes) {
    const std::string input = generate_input(m, size);
    for (std::uint32_t w : m.worker_counts) {
      for (std::uint32_t rep = 0; rep < m.repetitions; ++rep) {
        BenchRow row{m.job_id, size, w, rep, 0, 0, m.reducers, m.seed, false};
        Dfs dfs(ClusterConfig{m.nodes, m.chunk_size, m.replication, m.seed});
        dfs.put_file("/bench/input", input);
        const JobSpec spec =
            m.job_id == "uservisits"
                ? jobs::uservisits_spec("bench", "/bench/input", "/bench/out", m.reducers)
                : jobs::wordcount_spec("bench", "/bench/input", "/bench/out",
                                       {m.reducers, m.combiner});
        EngineOptions opts;
        opts.workers = w;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const JobReport report = submit_job(dfs, spec, jobs::builtin_registry(), opts);
          row.map_tasks = report.map_tasks;
          row.reduce_tasks = report.reduce_tasks;
        } catch (const JobFailed& e) {
          row.failed = true;
          row.map_tasks = e.report().map_tasks;
          row.reduce_tasks = e.report().reduce_tasks;
        }
        row.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(row);
        if (on_row) on_row(row);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kRowsHeader =
    "job,workers,size_bytes,repetition,elapsed_seconds,map_tasks,reduce_tasks,seed,failed";
inline constexpr std::string_view kPlotHeader = "job,workers,size_bytes,elapsed_seconds";

inline std::string format_row(const BenchRow& r) {
  std::ostringstream os;
  os << r.job_id << ',' << r.workers << ',' << r.size_bytes << ',' << r.repetition << ','
     << format_double(r.elapsed_seconds) << ',' << r.map_tasks << ',' << r.reduce_tasks << ','
     << r.seed << ',' << (r.failed ? 1 : 0);
  return os.str();
}

inline std::string format_rows_csv(std::span<const BenchRow> rows, bool header = true) {
  std::string out;
  if (header) {
    out.append(kRowsHeader);
    out.push_back('\n');
  }
  for (const auto& r : rows) {
    out.append(format_row(r));
    out.push_back('\n');
  }
  return out;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::vector<BenchRow> parse_rows_csv(std::string_view text) {
  std::vector<BenchRow> rows;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line == kRowsHeader) continue;
    const auto f = split_csv_line(line);
    auto bad = [&] { return ReportError("bad CSV row " + std::to_string(lineno) + ": " + std::string(line)); };
    if (f.size() != 9) throw bad();
    BenchRow r;
    r.job_id = std::string(f[0]);
    auto workers = parse_int64(f[1]);
    auto size = parse_int64(f[2]);
    auto rep = parse_int64(f[3]);
    auto elapsed = parse_double(f[4]);
    auto maps = parse_int64(f[5]);
    auto reduces = parse_int64(f[6]);
    auto seed = parse_size(f[7]);
    auto failed = parse_int64(f[8]);
    if (!workers || !size || !rep || !elapsed || !maps || !reduces || !seed || !failed) throw bad();
    r.workers = static_cast<std::uint32_t>(*workers);
    r.size_bytes = static_cast<std::uint64_t>(*size);
    r.repetition = static_cast<std::uint32_t>(*rep);
    r.elapsed_seconds = *elapsed;
    r.map_tasks = static_cast<std::uint32_t>(*maps);
    r.reduce_tasks = static_cast<std::uint32_t>(*reduces);
    r.seed = *seed;
    r.failed = *failed != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports

inline double median(std::vector<double> v) {
  if (v.empty()) throw ReportError("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

using CellKey = std::tuple<std::string, std::uint32_t, std::uint64_t>;  // job, workers, size

// Median elapsed of the successful repetitions of every cell.
inline std::map<CellKey, double> cell_medians(std::span<const BenchRow> rows) {
  std::map<CellKey, std::vector<double>> samples;
  for (const auto& r : rows) {
    if (!r.failed) samples[{r.job_id, r.workers, r.size_bytes}].push_back(r.elapsed_seconds);
  }
  std::map<CellKey, double> out;
  for (auto& [k, v] : samples) out[k] = median(std::move(v));
  return out;
}

struct ReportLine {
  std::string job_id;
  std::string kind;  // "speedup" or "scaling"
  std::uint32_t workers = 0;
  std::uint64_t size_bytes = 0;
  double median_elapsed = 0;
  double baseline_elapsed = 0;
  double ratio = 0;
  double ideal = 0;
  bool flagged = false;
};

// speedup(w) = median(1 worker) / median(w workers) at each size (ideal w);
// scaling(s) = median(s) / median(smallest size) at each worker count (ideal
// s / smallest). Lines with |ratio/ideal - 1| > tolerance are flagged.
inline std::vector<ReportLine> speedup_report(std::span<const BenchRow> rows, double tolerance = 0.25) {
  const auto med = cell_medians(rows);
  std::map<std::string, std::set<std::uint64_t>> sizes;
  std::map<std::string, std::set<std::uint32_t>> workers;
  for (const auto& r : rows) {
    sizes[r.job_id].insert(r.size_bytes);
    workers[r.job_id].insert(r.workers);
  }
  if (rows.empty()) throw ReportError("no rows");

  std::vector<ReportLine> out;
  for (const auto& [job, job_sizes] : sizes) {
    const auto& job_workers = workers[job];
    if (!job_workers.contains(1)) throw ReportError(job + ": no 1-worker baseline");
    for (std::uint64_t s : job_sizes) {
      auto base = med.find({job, 1, s});
      if (base == med.end()) throw ReportError(job + ": no successful 1-worker run at size " + std::to_string(s));
      for (std::uint32_t w : job_workers) {
        auto cell = med.find({job, w, s});
        if (cell == med.end()) continue;
        ReportLine l{job, "speedup", w, s, cell->second, base->second, base->second / cell->second,
                     static_cast<double>(w), false};
        l.flagged = std::abs(l.ratio / l.ideal - 1) > tolerance;
        out.push_back(l);
      }
    }
    const std::uint64_t smallest = *job_sizes.begin();
    for (std::uint32_t w : job_workers) {
      auto base = med.find({job, w, smallest});
      if (base == med.end()) {
        throw ReportError(job + ": no successful run at smallest size with " + std::to_string(w) + " workers");
      }
      if (!(base->second > 0)) throw ReportError(job + ": zero elapsed at smallest size");
      for (std::uint64_t s : job_sizes) {
        auto cell = med.find({job, w, s});
        if (cell == med.end()) continue;
        const double ideal = smallest == 0 ? 1.0 : static_cast<double>(s) / static_cast<double>(smallest);
        ReportLine l{job, "scaling", w, s, cell->second, base->second, cell->second / base->second, ideal, false};
        l.flagged = std::abs(l.ratio / l.ideal - 1) > tolerance;
        out.push_back(l);
      }
    }
  }
  return out;
}

inline std::string format_report_csv(std::span<const ReportLine> lines) {
  std::ostringstream os;
  os << "job,kind,workers,size_bytes,median_elapsed_seconds,baseline_elapsed_seconds,ratio,ideal,flagged\n";
  for (const auto& l : lines) {
    os << l.job_id << ',' << l.kind << ',' << l.workers << ',' << l.size_bytes << ','
       << format_double(l.median_elapsed) << ',' << format_double(l.baseline_elapsed) << ','
       << format_double(l.ratio) << ',' << format_double(l.ideal) << ',' << (l.flagged ? 1 : 0)
       << '\n';
  }
  return os.str();
}

// One series per (job, worker count): x = size, y = median elapsed.
inline std::string emit_plot_data(std::span<const BenchRow> rows) {
  std::string out(kPlotHeader);
  out.push_back('\n');
  for (const auto& [key, elapsed] : cell_medians(rows)) {
    const auto& [job, w, s] = key;
    out += job + ',' + std::to_string(w) + ',' + std::to_string(s) + ',' + format_double(elapsed) + '\n';
  }
  return out;
}

}  // namespace minimapred::bench
