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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>

#include "ragbench_cli/commands.hpp"
#include "ragbench_cli/config.hpp"

using namespace ragbench;
using namespace ragbench::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kToy = RAGBENCH_TOY_DIR;

fs::path scratch(const std::string& tag) {
  static std::atomic<int> counter{0};
  fs::path p = fs::temp_directory_path() /
               ("ragbench_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentConfig toy(const fs::path& out, std::vector<std::string> extra = {}) {
  extra.push_back("output_dir=" + nlohmann::json(out.string()).dump());
  return load_config(kToy / "config.json", extra);
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST(Config, ShippedDefaultsMatchBuiltIns) {
  std::ifstream in(fs::path(RAGBENCH_CONFIG_DIR) / "default.json");
  ASSERT_TRUE(in);
  EXPECT_EQ(nlohmann::json::parse(in), default_config_json());
}

TEST(Config, OverridesAndValidation) {
  nlohmann::json j = nlohmann::json::object();
  apply_override(j, "retrieval.naive.top_k=7");
  apply_override(j, "dataset=abc");
  apply_override(j, "generation.max_iterations=2");
  const auto cfg = config_from_json(j, kToy);
  EXPECT_EQ(cfg.paradigm.naive.top_k, 7u);
  EXPECT_EQ(cfg.dataset, "abc");
  EXPECT_EQ(cfg.paradigm.max_iterations, 2);
  EXPECT_EQ(cfg.paradigm.token_budget, 8000u);
  EXPECT_EQ(cfg.paradigm.graph.token_budget, 8000u);
  EXPECT_EQ(cfg.chunking.size, 512u);
  EXPECT_EQ(cfg.chunking.overlap, 100u);
  EXPECT_EQ(cfg.paradigms.size(), 5u);

  EXPECT_THROW(config_from_json({{"unknown_key", 1}}, kToy), ConfigError);
  EXPECT_THROW(config_from_json({{"paradigms", {"naive", "telepathy"}}}, kToy), ConfigError);
  EXPECT_THROW(config_from_json({{"paradigms", {"naive", "naive"}}}, kToy), ConfigError);
  EXPECT_THROW(config_from_json({{"chunking", {{"chunk_size", 100}, {"overlap", 100}}}}, kToy),
               ConfigError);
  // Credentials may come from the environment, so a bare remote spec fails on construction.
  ::unsetenv("RAGBENCH_API_BASE");
  const auto remote = config_from_json({{"backends", {{"llm", {{"kind", "remote"}}}}}}, kToy);
  EXPECT_THROW(make_llm(remote.llm), ConfigError);
  EXPECT_THROW(load_config(kToy / "missing.json"), ConfigError);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), 1);
  EXPECT_EQ(exit_code_for(DataError("x")), 2);
  EXPECT_EQ(exit_code_for(BackendError("x")), 3);
  EXPECT_EQ(exit_code_for(std::invalid_argument("x")), 1);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 2);
}

TEST(Cli, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Ingest, BuildsArtifactsAndIsIdempotent) {
  const auto out = scratch("ingest");
  const auto cfg = toy(out);
  const auto first = cmd_ingest(cfg);
  EXPECT_FALSE(first.skipped);
  EXPECT_EQ(first.chunks, 20u);
  EXPECT_GT(first.triplets, 0u);
  EXPECT_GT(first.nodes, 0u);
  EXPECT_GT(first.construction.total(), 0);
  for (const char* f : {files::chunks, files::triplets, files::chunk_index, files::entity_index,
                        files::construction, files::manifest}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto hash = sha256_file(out / files::chunk_index);
  const auto second = cmd_ingest(cfg);
  EXPECT_TRUE(second.skipped);
  EXPECT_EQ(sha256_file(out / files::chunk_index), hash);

  // A changed chunking parameter invalidates the cache.
  const auto third = cmd_ingest(toy(out, {"chunking.chunk_size=256"}));
  EXPECT_FALSE(third.skipped);

  const auto art = load_artifacts(out);
  EXPECT_EQ(art.chunks.size(), 20u);
  EXPECT_EQ(art.chunk_index.size(), 20u);
  EXPECT_EQ(art.graph.node_count(), third.nodes);
  EXPECT_TRUE(art.graph.has_entity_index());
  fs::remove_all(out);
}

TEST(Ingest, CorruptCorpusNamesThePhase) {
  const auto out = scratch("corrupt");
  const auto corpus = out / "bad.jsonl";
  {
    std::ifstream in(kToy / "corpus.jsonl");
    std::ofstream o(corpus);
    std::string line;
    std::getline(in, line);
    o << line << "\n{not json\n";
  }
  auto cfg = toy(out / "o", {"corpus=" + nlohmann::json(corpus.string()).dump()});
  try {
    cmd_ingest(cfg);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("phase 1"), std::string::npos) << e.what();
    EXPECT_EQ(exit_code_for(e), 2);
  }
  cfg.corpus = out / "absent.jsonl";
  EXPECT_THROW(cmd_ingest(cfg), DataError);
  fs::remove_all(out);
}

TEST(Run, WritesEveryPairResumesAndIsDeterministic) {
  const auto out = scratch("run");
  const auto cfg = toy(out);
  cmd_ingest(cfg);

  const auto partial = cmd_run(cfg, 7);
  EXPECT_EQ(partial.planned, 15u);
  EXPECT_EQ(partial.executed, 7u);
  EXPECT_EQ(line_count(out / files::runs), 7u);

  // Simulate a crash mid-write.
  {
    std::ofstream o(out / files::runs, std::ios::app);
    o << "{\"query_id\": \"toy-fac";
  }
  const auto rest = cmd_run(cfg);
  EXPECT_EQ(rest.resumed, 7u);
  EXPECT_EQ(rest.executed, 8u);
  EXPECT_EQ(line_count(out / files::runs), 15u);
  const auto runs = read_runs(out / files::runs);
  ASSERT_EQ(runs.size(), 15u);
  std::set<std::pair<std::string, ParadigmKind>> keys;
  for (const auto& r : runs) keys.emplace(r.query_id, r.paradigm);
  EXPECT_EQ(keys.size(), 15u);

  const auto again = cmd_run(cfg);
  EXPECT_EQ(again.executed, 0u);

  // A fresh full run with more workers produces identical bytes.
  const auto out2 = scratch("run2");
  const auto cfg2 = toy(out2, {"workers=8"});
  cmd_ingest(cfg2);
  cmd_run(cfg2);
  const auto out3 = scratch("run3");
  const auto cfg3 = toy(out3, {"workers=1"});
  cmd_ingest(cfg3);
  cmd_run(cfg3);
  EXPECT_EQ(sha256_file(out2 / files::runs), sha256_file(out3 / files::runs));
  for (const auto& d : {out, out2, out3}) fs::remove_all(d);
}

TEST(Pipeline, EvaluateCostsRoute) {
  const auto out = scratch("pipe");
  const auto cfg = toy(out);
  cmd_ingest(cfg);
  cmd_run(cfg);
  const auto ev = cmd_evaluate(cfg);
  EXPECT_EQ(ev.reports, 15u);
  EXPECT_EQ(line_count(out / files::metrics), 15u);
  double graph_2hop = -1, naive_2hop = -1;
  for (const auto& r : ev.rows) {
    if (r.query_type != "reasoning_2hop") continue;
    if (r.paradigm == ParadigmKind::graph) graph_2hop = r.correct_pct;
    if (r.paradigm == ParadigmKind::naive) naive_2hop = r.correct_pct;
  }
  EXPECT_DOUBLE_EQ(graph_2hop, 100.0);
  EXPECT_DOUBLE_EQ(naive_2hop, 0.0);

  const auto rep = cmd_costs(cfg);
  EXPECT_EQ(rep.query_count, 3u);
  EXPECT_EQ(rep.rows.size(), 5u);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.n, 3u);
    EXPECT_EQ(r.amortized_construction > 0, uses_graph(r.method)) << to_string(r.method);
  }
  EXPECT_TRUE(fs::exists(out / files::costs));

  const auto routes = cmd_route(cfg, out / files::aggregate);
  EXPECT_FALSE(routes.empty());
  EXPECT_TRUE(fs::exists(out / files::routes));
  const auto fp = cmd_fingerprint(cfg);
  EXPECT_TRUE(fp.contains("structural"));
  fs::remove_all(out);
}

TEST(Run, UnknownParadigmIsAConfigError) {
  const auto out = scratch("para");
  try {
    toy(out, {"paradigms=[\"naive\",\"oracle\"]"});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(exit_code_for(e), 1);
  }
  fs::remove_all(out);
}

TEST(Querygen, ToyRecordsAreWrittenWithValidation) {
  const auto out = scratch("qg");
  const auto cfg = toy(out);
  cmd_ingest(cfg);
  const auto res = cmd_querygen(cfg, out / "q.jsonl");
  EXPECT_EQ(res.written, line_count(out / "q.jsonl"));
  EXPECT_GT(res.generated.at("factual"), 0u);
  EXPECT_GT(res.passed.at("factual"), 0u);
  const auto records = querygen::read_queries(out / "q.jsonl");
  for (const auto& r : records) {
    EXPECT_EQ(r.query_id.rfind("toy-", 0), 0u) << r.query_id;
    EXPECT_NE(r.validation.status, querygen::ValidationStatus::pending);
  }
  const auto only = cmd_querygen(cfg, out / "p.jsonl", true);
  for (const auto& r : querygen::read_queries(out / "p.jsonl")) EXPECT_TRUE(r.validation.passed());
  EXPECT_LE(only.written, res.written);
  fs::remove_all(out);
}
