// Copyright 2026 The ragbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ragbench_cli/commands.hpp"

using namespace ragbench;

namespace {

std::string fmt_opt(const std::optional<double>& x) {
  return x ? std::to_string(*x).substr(0, 6) : std::string("-");
}

void print_aggregate(const std::vector<evalkit::AggregateRow>& rows) {
  std::printf("%-10s %-16s %-15s %5s %7s %7s %7s %7s %8s %10s\n", "dataset", "paradigm", "type",
              "n", "sem_f1", "cov", "faith_h", "faith_s", "llm_cor%", "avg_tok");
  for (const auto& r : rows) {
    std::printf("%-10s %-16s %-15s %5zu %7.4f %7.4f %7s %7s %8.2f %10.1f\n", r.dataset.c_str(),
                std::string(to_string(r.paradigm)).c_str(), r.query_type.c_str(), r.runs,
                r.semantic_f1, r.coverage, fmt_opt(r.faith_hard).c_str(),
                fmt_opt(r.faith_soft).c_str(), r.correct_pct, r.avg_total_tokens);
  }
}

void print_costs(const costs::CostReport& rep) {
  std::printf("%-10s %-16s %5s %9s %10s %10s %10s %10s %12s %12s\n", "dataset", "method", "n",
              "avg_ctx", "ret_in", "ret_out", "gen_in", "gen_out", "construct", "total");
  for (const auto& r : rep.rows) {
    std::printf("%-10s %-16s %5zu %9.1f %10lld %10lld %10lld %10lld %12.1f %12.1f\n",
                r.dataset.c_str(), std::string(to_string(r.method)).c_str(), r.n, r.avg_ctx,
                static_cast<long long>(r.ret_in), static_cast<long long>(r.ret_out),
                static_cast<long long>(r.gen_in), static_cast<long long>(r.gen_out),
                r.amortized_construction, r.total_with_construction);
  }
  std::printf("construction %lld tokens over %zu queries (%.2f per query); grand total %.1f\n",
              static_cast<long long>(rep.construction.total()), rep.query_count,
              rep.construction_per_query, rep.grand_total);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for retrieval-augmented generation paradigms"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string log_level = "info";
  std::string corpus, out_dir, queries;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  app.add_option("-c,--config", config_path, "Experiment config (JSON)");
  app.add_option("--set", overrides, "Override a config value: key.path=value");
  app.add_option("--corpus", corpus, "Corpus JSONL");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--queries", queries, "Query JSONL");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--workers", workers, "Worker threads");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  auto* ingest = app.add_subcommand("ingest", "Chunk, extract triplets, build graph and indexes");
  auto* fp = app.add_subcommand("fingerprint", "Structural and semantic corpus fingerprints");
  auto* qg = app.add_subcommand("querygen", "Generate and validate queries");
  std::string qg_out = "queries.generated.jsonl";
  bool only_passed = false;
  qg->add_option("-o,--output", qg_out, "Query file to write");
  qg->add_flag("--only-passed", only_passed, "Keep only records that passed validation");
  auto* run = app.add_subcommand("run", "Execute every (query, paradigm) pair");
  std::optional<std::size_t> limit;
  std::string paradigm_list;
  run->add_option("--limit", limit, "Stop after this many new runs");
  run->add_option("--paradigms", paradigm_list, "Comma-separated paradigm list");
  auto* evaluate = app.add_subcommand("evaluate", "Score runs against gold answers");
  auto* cost = app.add_subcommand("costs", "Token cost breakdown");
  auto* rt = app.add_subcommand("route", "Select a paradigm per dataset and query type");
  std::string aggregate_path;
  std::optional<double> lambda;
  rt->add_option("--aggregate", aggregate_path, "Aggregate evaluation report");
  rt->add_option("--lambda", lambda, "Utility lost per token");

  CLI11_PARSE(app, argc, argv);

  const auto level = spdlog::level::from_str(log_level);
  spdlog::set_default_logger(spdlog::stderr_color_mt("ragbench"));
  spdlog::set_level(level);

  try {
    if (!corpus.empty()) overrides.push_back("corpus=" + nlohmann::json(corpus).dump());
    if (!out_dir.empty()) overrides.push_back("output_dir=" + nlohmann::json(out_dir).dump());
    if (!queries.empty()) overrides.push_back("queries=" + nlohmann::json(queries).dump());
    if (seed) overrides.push_back("seed=" + std::to_string(*seed));
    if (workers) overrides.push_back("workers=" + std::to_string(*workers));
    if (lambda) overrides.push_back("router.lambda=" + nlohmann::json(*lambda).dump());
    if (!paradigm_list.empty()) {
      nlohmann::json arr = nlohmann::json::array();
      std::size_t start = 0;
      while (start <= paradigm_list.size()) {
        const auto comma = paradigm_list.find(',', start);
        arr.push_back(paradigm_list.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      overrides.push_back("paradigms=" + arr.dump());
    }
    const cli::ExperimentConfig cfg = cli::load_config(config_path, overrides);

    if (*ingest) {
      auto r = cli::cmd_ingest(cfg);
      std::printf("%s: %zu chunks, %zu triplets (%zu chunks skipped), %zu nodes, %zu edges\n",
                  r.skipped ? "unchanged" : "ingested", r.chunks, r.triplets, r.skipped_chunks,
                  r.nodes, r.edges);
    } else if (*fp) {
      std::cout << cli::cmd_fingerprint(cfg).dump(2) << '\n';
    } else if (*qg) {
      auto r = cli::cmd_querygen(cfg, qg_out, only_passed);
      for (const auto& [type, n] : r.generated) {
        std::printf("%-15s generated %zu, passed %zu\n", type.c_str(), n, r.passed.at(type));
      }
      std::printf("wrote %zu records to %s\n", r.written, qg_out.c_str());
    } else if (*run) {
      auto r = cli::cmd_run(cfg, limit);
      std::printf("planned %zu, already done %zu, executed %zu, failed %zu\n", r.planned,
                  r.resumed, r.executed, r.failed);
    } else if (*evaluate) {
      auto r = cli::cmd_evaluate(cfg);
      std::printf("%zu runs evaluated\n", r.reports);
      print_aggregate(r.rows);
    } else if (*cost) {
      print_costs(cli::cmd_costs(cfg));
    } else if (*rt) {
      const std::filesystem::path agg =
          aggregate_path.empty() ? cfg.output_dir / cli::files::aggregate : std::filesystem::path(aggregate_path);
      for (const auto& d : cli::cmd_route(cfg, agg)) {
        std::printf("%-10s %-15s -> %-16s U=%.6f\n", d.dataset.c_str(), d.query_type.c_str(),
                    std::string(to_string(d.selected)).c_str(), d.utility);
      }
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return cli::exit_code_for(e);
  }
  return 0;
}
