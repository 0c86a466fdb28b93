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

// Command-line driver.
//
//   minimapred [flags] dfs put <local-file> <path>
//   minimapred [flags] dfs get <path> [--output <local-file>]
//   minimapred [flags] dfs cat <path>
//   minimapred [flags] dfs ls [<prefix>]
//   minimapred [flags] job run <wordcount|uservisits> --input <path> --output <dir>
//   minimapred [flags] bench run [--config <json>] [--sizes 64M,256M] ...
//   minimapred [flags] bench report --csv <rows.csv>
//
// Exit codes: 0 ok, 2 usage or configuration error, 3 job or report failure,
// 1 anything else.

#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "minimapred/bench.hpp"
#include "minimapred/common.hpp"
#include "minimapred/dfs.hpp"
#include "minimapred/fault.hpp"
#include "minimapred/jobs.hpp"
#include "minimapred/master.hpp"

namespace minimapred::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFailed = 3;

inline constexpr const char* kStoreEnv = "MINIMAPRED_STORE";

struct GlobalFlags {
  std::uint32_t nodes = 4;
  std::string chunk_size = "16M";
  std::uint32_t replication = 2;
  std::uint32_t reducers = 2;
  std::optional<std::uint32_t> workers;
  std::uint64_t seed = 42;
  std::vector<std::string> fail;
  std::string store_root = ".minimapred";
  std::string output;

  std::uint64_t chunk_bytes() const {
    auto v = parse_size(chunk_size);
    if (!v) throw InvalidConfig("bad --chunk-size '" + chunk_size + "'");
    return *v;
  }

  ClusterConfig cluster() const {
    ClusterConfig c{nodes, chunk_bytes(), replication, seed};
    c.validate();
    return c;
  }

  std::string resolved_store_root() const {
    if (const char* env = std::getenv(kStoreEnv); env && *env) return env;
    return store_root;
  }
};

inline std::string format_ls_line(const FileMeta& m) {
  std::string replicas;
  for (std::size_t i = 0; i < m.chunks.size(); ++i) {
    if (i) replicas.push_back(';');
    for (std::size_t j = 0; j < m.chunks[i].replicas.size(); ++j) {
      if (j) replicas.push_back(',');
      replicas += std::to_string(m.chunks[i].replicas[j]);
    }
  }
  return m.path + '\t' + std::to_string(m.size) + '\t' + std::to_string(m.chunks.size()) + '\t' +
         replicas;
}

inline std::string read_local_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_local_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write " + path);
}

inline std::vector<std::uint64_t> parse_sizes(const std::vector<std::string>& in) {
  std::vector<std::uint64_t> out;
  for (const auto& s : in) {
    auto v = parse_size(s);
    if (!v) throw InvalidConfig("bad size '" + s + "'");
    out.push_back(*v);
  }
  return out;
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"minimapred: a small MapReduce engine over a simulated distributed file system"};
    app.require_subcommand(1);
    app.fallthrough();
    add_global_flags(app);

    auto* dfs = app.add_subcommand("dfs", "Store and inspect files");
    dfs->require_subcommand(1);
    auto* put = dfs->add_subcommand("put", "Copy a local file into the store");
    put->add_option("local", local_, "Local file")->required();
    put->add_option("path", path_, "Destination path")->required();
    auto* get = dfs->add_subcommand("get", "Copy a stored file to --output (or stdout)");
    get->add_option("path", path_, "Stored path")->required();
    auto* cat = dfs->add_subcommand("cat", "Print a stored file");
    cat->add_option("path", path_, "Stored path")->required();
    auto* ls = dfs->add_subcommand("ls", "List files: path, size, chunks, replicas");
    ls->add_option("prefix", path_, "Path prefix");

    auto* job = app.add_subcommand("job", "Run jobs");
    job->require_subcommand(1);
    auto* job_run = job->add_subcommand("run", "Run a built-in job");
    job_run->add_option("name", job_name_, "wordcount | uservisits")->required();
    job_run->add_option("--input", input_, "Input path in the store");
    job_run->add_option("--input-file", input_file_, "Load this local file to --input first");
    job_run->add_option("--generate-bytes", generate_bytes_, "Generate this much input first (K/M/G)");
    job_run->add_option("--generate-rows", generate_rows_, "Generate this many UserVisits rows first");
    job_run->add_flag("--no-combiner", no_combiner_, "Disable the wordcount combiner");
    job_run->add_flag("--approximate", approximate_, "uservisits: partial sums in a combiner");
    job_run->add_flag("--in-memory", in_memory_, "Use a throwaway in-memory cluster");

    auto* bench = app.add_subcommand("bench", "Benchmarks");
    bench->require_subcommand(1);
    auto* bench_run = bench->add_subcommand("run", "Run a size x workers matrix");
    bench_run->add_option("--config", config_, "Matrix JSON file");
    auto* job_opt = bench_run->add_option("--job", bench_job_, "wordcount | uservisits");
    auto* sizes_opt = bench_run->add_option("--sizes", sizes_, "Input sizes, e.g. 64M,256M")->delimiter(',');
    auto* wc_opt =
        bench_run->add_option("--worker-counts", worker_counts_, "Worker counts, e.g. 1,2,4")->delimiter(',');
    auto* reps_opt = bench_run->add_option("--reps", reps_, "Repetitions per cell");
    auto* vocab_opt = bench_run->add_option("--vocab", vocab_, "Wordcount vocabulary size");
    bench_run->add_flag("--paper-sizes", paper_sizes_, "Use 350M, 1G and 2G inputs");
    bench_run->add_flag("--no-combiner", no_combiner_, "Disable the wordcount combiner");
    bench_run->add_option("--csv", csv_, "Rows CSV path");
    bench_run->add_option("--plot", plot_, "Plot-data CSV path");
    bench_run->add_option("--report", report_, "Report CSV path");
    bench_run->add_option("--tolerance", tolerance_, "Report flag tolerance");
    auto* bench_report = bench->add_subcommand("report", "Speedup and scaling from a rows CSV");
    bench_report->add_option("--csv", csv_, "Rows CSV path")->required();
    bench_report->add_option("--plot", plot_, "Plot-data CSV path");
    bench_report->add_option("--tolerance", tolerance_, "Report flag tolerance");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitUsage;
    }

    try {
      if (put->parsed()) return cmd_put();
      if (get->parsed()) return cmd_get(false);
      if (cat->parsed()) return cmd_get(true);
      if (ls->parsed()) return cmd_ls();
      if (job_run->parsed()) {
        if (job_name_ != "wordcount" && job_name_ != "uservisits") {
          err_ << "unknown job '" << job_name_ << "'\n" << job_run->help();
          return kExitUsage;
        }
        return cmd_job_run();
      }
      if (bench_run->parsed()) {
        explicit_ = {job_opt->count() > 0, sizes_opt->count() > 0, wc_opt->count() > 0,
                     reps_opt->count() > 0, vocab_opt->count() > 0};
        return cmd_bench_run(app);
      }
      if (bench_report->parsed()) return cmd_bench_report();
    } catch (const JobFailed& e) {
      out_ << e.report().to_json().dump(2) << '\n';
      err_ << e.what() << '\n';
      return kExitFailed;
    } catch (const ReportError& e) {
      err_ << "report error: " << e.what() << '\n';
      return kExitFailed;
    } catch (const InvalidConfig& e) {
      err_ << e.what() << '\n';
      return kExitUsage;
    } catch (const InvalidPlan& e) {
      err_ << "invalid failure plan: " << e.what() << '\n';
      return kExitUsage;
    } catch (const NotFound& e) {
      err_ << e.what() << '\n';
      return kExitUsage;
    } catch (const AlreadyExists& e) {
      err_ << e.what() << '\n';
      return kExitUsage;
    } catch (const UnknownInput& e) {
      err_ << e.what() << '\n';
      return kExitUsage;
    } catch (const UnknownFunction& e) {
      err_ << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitError;
    }
    err_ << app.help();
    return kExitUsage;
  }

 private:
  void add_global_flags(CLI::App& app) {
    app.add_option("--nodes", g_.nodes, "Cluster nodes")->capture_default_str();
    app.add_option("--chunk-size", g_.chunk_size, "Chunk size (K/M/G suffix)")->capture_default_str();
    app.add_option("--replication", g_.replication, "Replicas per chunk")->capture_default_str();
    app.add_option("--reducers", g_.reducers, "Reduce tasks")->capture_default_str();
    app.add_option("--workers", g_.workers, "Workers (default: one per node)");
    app.add_option("--seed", g_.seed, "Seed for placement and generated input")->capture_default_str();
    app.add_option("--fail", g_.fail, "Kill a node: <node>:<tick> or <node>:after:<task-id>");
    app.add_option("--store-root", g_.store_root, "On-disk store directory (env " + std::string(kStoreEnv) + ")")
        ->capture_default_str();
    app.add_option("--output", g_.output, "Job output dir, local file for dfs get, CSV dir for bench");
  }

  Dfs open_store() const { return Dfs(g_.cluster(), std::filesystem::path(g_.resolved_store_root())); }

  int cmd_put() {
    Dfs dfs = open_store();
    const FileMeta meta = dfs.put_file(path_, read_local_file(local_));
    out_ << format_ls_line(meta) << '\n';
    return kExitOk;
  }

  int cmd_get(bool to_stdout) {
    Dfs dfs = open_store();
    const std::string bytes = dfs.get_file(path_);
    if (!to_stdout && !g_.output.empty() && g_.output != "-") {
      write_local_file(g_.output, bytes);
    } else {
      out_ << bytes;
    }
    return kExitOk;
  }

  int cmd_ls() {
    Dfs dfs = open_store();
    for (const auto& m : dfs.list(path_)) out_ << format_ls_line(m) << '\n';
    return kExitOk;
  }

  int cmd_job_run() {
    const ClusterConfig cfg = g_.cluster();
    if (g_.reducers < 1) throw InvalidConfig("--reducers must be >= 1");
    EngineOptions opts;
    opts.failures = fault::FailurePlan::parse(g_.fail);
    opts.failures.validate(cfg.num_nodes);
    if (g_.workers) {
      if (*g_.workers < 1 || *g_.workers > cfg.num_nodes) {
        throw InvalidConfig("--workers must be in [1, " + std::to_string(cfg.num_nodes) + "]");
      }
      opts.workers = *g_.workers;
    }
    const std::string input = input_.empty() ? "/input/" + job_name_ : input_;
    const std::string output = g_.output.empty() ? "/output/" + job_name_ : g_.output;

    std::optional<Dfs> dfs;
    if (in_memory_) {
      dfs.emplace(cfg);
    } else {
      dfs.emplace(cfg, std::filesystem::path(g_.resolved_store_root()));
    }
    if (!input_file_.empty()) {
      dfs->replace_file(input, read_local_file(input_file_));
    } else if (!generate_bytes_.empty()) {
      auto n = parse_size(generate_bytes_);
      if (!n) throw InvalidConfig("bad --generate-bytes '" + generate_bytes_ + "'");
      dfs->replace_file(input, job_name_ == "uservisits"
                                   ? jobs::generate_uservisits_bytes(*n, g_.seed)
                                   : bench::generate_tokens(*n, 10000, g_.seed));
    } else if (generate_rows_ > 0) {
      dfs->replace_file(input, jobs::generate_uservisits(generate_rows_, g_.seed));
    }

    const JobSpec spec =
        job_name_ == "uservisits"
            ? jobs::uservisits_spec(job_name_, input, output, g_.reducers, approximate_)
            : jobs::wordcount_spec(job_name_, input, output, {g_.reducers, !no_combiner_});
    const JobReport report = submit_job(*dfs, spec, jobs::builtin_registry(), opts);
    out_ << report.to_json().dump(2) << '\n';
    return kExitOk;
  }

  bench::BenchMatrix build_matrix() const {
    bench::BenchMatrix m;
    if (!config_.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_local_file(config_));
      } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(config_ + ": " + e.what());
      }
      m = bench::BenchMatrix::from_json(j);
    }
    if (config_.empty() || cluster_flag_set_[0]) m.nodes = g_.nodes;
    if (config_.empty() || cluster_flag_set_[1]) m.chunk_size = g_.chunk_bytes();
    if (config_.empty() || cluster_flag_set_[2]) m.replication = g_.replication;
    if (config_.empty() || cluster_flag_set_[3]) m.reducers = g_.reducers;
    if (config_.empty() || cluster_flag_set_[4]) m.seed = g_.seed;
    if (explicit_.job) m.job_id = bench_job_;
    if (explicit_.sizes) m.sizes = parse_sizes(sizes_);
    if (paper_sizes_) m.sizes = bench::BenchMatrix::paper_sizes();
    if (explicit_.workers) m.worker_counts = worker_counts_;
    if (explicit_.reps) m.repetitions = reps_;
    if (explicit_.vocab) m.vocab_size = vocab_;
    if (no_combiner_) m.combiner = false;
    m.validate();
    return m;
  }

  std::string in_output_dir(const std::string& name) const {
    if (g_.output.empty()) return name;
    std::filesystem::create_directories(g_.output);
    return (std::filesystem::path(g_.output) / name).string();
  }

  int cmd_bench_run(const CLI::App& app) {
    for (std::size_t i = 0; i < kClusterFlags.size(); ++i) {
      cluster_flag_set_[i] = app.get_option(kClusterFlags[i])->count() > 0;
    }
    const bench::BenchMatrix m = build_matrix();
    const std::string csv = csv_.empty() ? in_output_dir("bench.csv") : csv_;
    const std::string plot = plot_.empty() ? in_output_dir("plot.csv") : plot_;
    const std::string report = report_.empty() ? in_output_dir("report.csv") : report_;

    // Rows are appended as they finish so a long matrix leaves partial data.
    {
      std::ofstream f(csv, std::ios::trunc);
      f << bench::kRowsHeader << '\n';
      if (!f) throw Error("cannot write " + csv);
    }
    const auto rows = bench::run_matrix(m, [&](const bench::BenchRow& r) {
      std::ofstream f(csv, std::ios::app);
      f << bench::format_row(r) << '\n';
      err_ << bench::format_row(r) << '\n';
    });
    write_local_file(plot, bench::emit_plot_data(rows));
    const std::string text = bench::format_report_csv(bench::speedup_report(rows, tolerance_));
    write_local_file(report, text);
    out_ << text;
    return kExitOk;
  }

  int cmd_bench_report() {
    const auto rows = bench::parse_rows_csv(read_local_file(csv_));
    const std::string text = bench::format_report_csv(bench::speedup_report(rows, tolerance_));
    if (!plot_.empty()) write_local_file(plot_, bench::emit_plot_data(rows));
    out_ << text;
    return kExitOk;
  }

  static constexpr std::array<const char*, 5> kClusterFlags = {"--nodes", "--chunk-size", "--replication",
                                                               "--reducers", "--seed"};

  struct ExplicitBenchFlags {
    bool job = false, sizes = false, workers = false, reps = false, vocab = false;
  };

  std::ostream& out_;
  std::ostream& err_;
  GlobalFlags g_;

  std::string local_, path_;
  std::string job_name_, input_, input_file_, generate_bytes_;
  std::uint64_t generate_rows_ = 0;
  bool no_combiner_ = false, approximate_ = false, in_memory_ = false;

  std::string config_, bench_job_ = "wordcount", csv_, plot_, report_;
  std::vector<std::string> sizes_;
  std::vector<std::uint32_t> worker_counts_;
  std::uint32_t reps_ = 3, vocab_ = 10000;
  bool paper_sizes_ = false;
  double tolerance_ = 0.25;
  ExplicitBenchFlags explicit_;
  std::array<bool, 5> cluster_flag_set_{};
};

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  return Cli(out, err).run(argc, argv);
}

}  // namespace minimapred::cli
