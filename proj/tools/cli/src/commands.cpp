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

#include "ragbench_cli/commands.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "ragbench/fingerprint.hpp"

namespace ragbench::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& p) {
  json j = json::parse(read_file(p), nullptr, false);
  if (j.is_discarded()) throw DataError("not valid JSON: " + p.string());
  return j;
}

[[noreturn]] void rethrow_as(ErrorClass cls, const std::string& msg) {
  switch (cls) {
    case ErrorClass::config: throw ConfigError(msg);
    case ErrorClass::backend: throw BackendError(msg);
    case ErrorClass::data: break;
  }
  throw DataError(msg);
}

template <typename Fn>
auto phase(int n, const char* name, Fn&& fn) {
  const std::string tag = "ingest phase " + std::to_string(n) + " (" + name + "): ";
  try {
    return fn();
  } catch (const Error& e) {
    rethrow_as(e.error_class(), tag + e.what());
  } catch (const std::exception& e) {
    throw DataError(tag + e.what());
  }
}

// Runs fn(i) for i in [0, n) on `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(workers, n); ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

json graph_json(const kgraph::KnowledgeGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"u", e.u},
                     {"v", e.v},
                     {"relation", e.relation},
                     {"source_chunk_ids", e.source_chunk_ids}});
  }
  return {{"nodes", g.names()}, {"edges", edges}};
}

const char* const kArtifacts[] = {files::chunks, files::triplets, files::graph,
                                  files::chunk_index, files::entity_index, files::construction};

std::string ingest_fingerprint(const ExperimentConfig& cfg) {
  const json& r = cfg.resolved;
  json in = {{"corpus", sha256_file(cfg.corpus)},
             {"chunking", r["chunking"]},
             {"extraction", r["extraction"]},
             {"llm", r["backends"]["llm"]},
             {"embedding", r["backends"]["embedding"]}};
  in["llm"].erase("timeout_ms");
  in["llm"].erase("concurrency");
  if (cfg.llm.kind == "rule") in["rules"] = sha256_file(cfg.llm.rules);
  in["llm"].erase("rules");
  return sha256_hex(in.dump());
}

std::optional<IngestResult> cached_ingest(const fs::path& dir, const std::string& inputs) {
  const fs::path mpath = dir / files::manifest;
  if (!fs::exists(mpath)) return std::nullopt;
  json m = json::parse(read_file(mpath), nullptr, false);
  if (m.is_discarded() || m.value("inputs", "") != inputs) return std::nullopt;
  IngestResult r;
  for (const char* name : kArtifacts) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) return std::nullopt;
    const std::string h = sha256_file(p);
    if (m["artifacts"].value(name, "") != h) return std::nullopt;
    r.artifact_hashes[name] = h;
  }
  r.skipped = true;
  const json& s = m["stats"];
  r.chunks = s.value("chunks", 0u);
  r.triplets = s.value("triplets", 0u);
  r.skipped_chunks = s.value("skipped_chunks", 0u);
  r.nodes = s.value("nodes", 0u);
  r.edges = s.value("edges", 0u);
  r.construction = costs::construction_from_json(read_json(dir / files::construction));
  return r;
}

std::string pair_key(const std::string& query_id, ParadigmKind k) {
  return query_id + '\x1f' + std::string(to_string(k));
}

// Reads complete run lines; a torn final line (no newline) is cut off so new
// lines append cleanly.
std::vector<paradigms::ParadigmRun> recover_runs(const fs::path& path) {
  if (!fs::exists(path)) return {};
  std::string bytes = read_file(path);
  const auto last_nl = bytes.rfind('\n');
  const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
  if (keep != bytes.size()) {
    spdlog::warn("dropping torn final line of {}", path.string());
    fs::resize_file(path, keep);
    bytes.resize(keep);
  }
  std::vector<paradigms::ParadigmRun> runs;
  std::istringstream in(bytes);
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw DataError("corrupt run line in " + path.string());
    runs.push_back(paradigms::run_from_json(j));
  }
  return runs;
}

std::map<std::string, querygen::QueryRecord> queries_by_id(const fs::path& path) {
  std::map<std::string, querygen::QueryRecord> out;
  for (auto& q : querygen::read_queries(path)) {
    const std::string id = q.query_id;
    if (!out.emplace(id, std::move(q)).second) throw DataError("duplicate query id: " + id);
  }
  return out;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->error_class()) {
      case ErrorClass::config: return 1;
      case ErrorClass::data: return 2;
      case ErrorClass::backend: return 3;
    }
  }
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 1;
  return 2;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw DataError("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

IngestResult cmd_ingest(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.output_dir;
  if (!fs::exists(cfg.corpus)) throw DataError("corpus file not found: " + cfg.corpus.string());
  fs::create_directories(dir);
  const std::string inputs = ingest_fingerprint(cfg);
  if (auto cached = cached_ingest(dir, inputs)) {
    spdlog::info("ingest: inputs unchanged, reusing artifacts in {}", dir.string());
    return *cached;
  }

  auto llm = make_llm(cfg.llm);
  auto embedder = make_embedder(cfg.embedding);
  IngestResult r;

  const auto chunks = phase(1, "load and chunk corpus", [&] {
    auto c = corpus::chunk_corpus(corpus::load_corpus(cfg.corpus), cfg.chunking);
    corpus::write_chunks(dir / files::chunks, c);
    return c;
  });
  r.chunks = chunks.size();

  const auto triplets = phase(2, "triplet extraction", [&] {
    std::vector<std::vector<kgraph::Triplet>> per_chunk(chunks.size());
    std::vector<backends::TokenUsage> usage(chunks.size());
    std::vector<char> skipped(chunks.size(), 0);
    parallel_for(chunks.size(), cfg.workers, [&](std::size_t i) {
      try {
        per_chunk[i] = kgraph::extract_triplets_from_chunk(chunks[i], *llm, usage[i], cfg.extraction);
      } catch (const kgraph::ExtractionSkipped& e) {
        spdlog::warn("{}", e.what());
        skipped[i] = 1;
      }
    });
    std::vector<kgraph::Triplet> all;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      r.construction.corpus_tokens_in += usage[i].input_tokens;
      r.construction.triplet_tokens_out += usage[i].output_tokens;
      r.skipped_chunks += static_cast<std::size_t>(skipped[i]);
      for (auto& t : per_chunk[i]) all.push_back(std::move(t));
    }
    kgraph::write_triplets(dir / files::triplets, all);
    return all;
  });
  r.triplets = triplets.size();

  auto graph = phase(3, "graph construction", [&] {
    auto g = kgraph::build_graph(triplets);
    write_json(dir / files::graph, graph_json(g));
    return g;
  });

  phase(4, "chunk index", [&] {
    std::vector<std::pair<std::string, backends::EmbeddingVector>> items;
    if (!chunks.empty()) {
      std::vector<std::string> texts;
      for (const auto& c : chunks) texts.push_back(c.text);
      auto batch = embedder->embed(texts);
      r.chunk_embedding = batch.usage;
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        items.emplace_back(chunks[i].chunk_id, std::move(batch.vectors[i]));
      }
    }
    vindex::VectorIndex::build(items).save(dir / files::chunk_index);
    return 0;
  });

  phase(5, "entity embeddings", [&] {
    backends::TokenUsage u;
    graph = kgraph::embed_entities(std::move(graph), *embedder, &u);
    r.construction.embedding_tokens = u.total();
    graph.entity_index().save(dir / files::entity_index);
    write_json(dir / files::construction, costs::to_json(r.construction));
    return 0;
  });
  r.nodes = graph.node_count();
  r.edges = graph.edge_count();

  json m = {{"inputs", inputs},
            {"artifacts", json::object()},
            {"stats",
             {{"chunks", r.chunks},
              {"triplets", r.triplets},
              {"skipped_chunks", r.skipped_chunks},
              {"nodes", r.nodes},
              {"edges", r.edges},
              {"chunk_embedding_tokens", r.chunk_embedding.total()}}}};
  for (const char* name : kArtifacts) {
    r.artifact_hashes[name] = sha256_file(dir / name);
    m["artifacts"][name] = r.artifact_hashes[name];
  }
  write_json(dir / files::manifest, m);
  spdlog::info("ingest: {} chunks, {} triplets, {} nodes, {} edges", r.chunks, r.triplets, r.nodes,
               r.edges);
  return r;
}

Artifacts load_artifacts(const fs::path& dir) {
  for (const char* name : kArtifacts) {
    if (!fs::exists(dir / name)) {
      throw DataError("missing ingest artifact " + (dir / name).string() + "; run ingest first");
    }
  }
  Artifacts a;
  a.chunks = corpus::read_chunks(dir / files::chunks);
  a.chunk_index = vindex::VectorIndex::load(dir / files::chunk_index);
  a.graph = kgraph::build_graph(kgraph::read_triplets(dir / files::triplets));
  if (!a.graph.empty()) a.graph.set_entity_index(vindex::VectorIndex::load(dir / files::entity_index));
  a.construction = costs::construction_from_json(read_json(dir / files::construction));
  return a;
}

json cmd_fingerprint(const ExperimentConfig& cfg) {
  const Artifacts a = load_artifacts(cfg.output_dir);
  json out = {{"dataset", cfg.dataset}};
  if (a.graph.empty()) {
    out["structural"] = nullptr;
  } else {
    out["structural"] = fingerprint::to_json(fingerprint::structural_fingerprint(a.graph));
  }
  std::vector<backends::EmbeddingVector> vs;
  for (std::size_t i = 0; i < a.chunk_index.size(); ++i) vs.push_back(a.chunk_index.vector(i));
  out["semantic"] = fingerprint::to_json(fingerprint::semantic_fingerprint(vs));
  write_json(cfg.output_dir / files::fingerprint, out);
  return out;
}

QuerygenResult cmd_querygen(const ExperimentConfig& cfg, const fs::path& out, bool only_passed) {
  const Artifacts a = load_artifacts(cfg.output_dir);
  auto llm = make_llm(cfg.llm);
  auto judge = make_llm(cfg.judge);
  auto embedder = make_embedder(cfg.embedding);
  std::mt19937_64 rng(cfg.seed);
  querygen::QuerygenConfig qc = cfg.querygen;
  qc.id_prefix = cfg.dataset + "-";

  QuerygenResult result;
  std::vector<querygen::QueryRecord> kept;
  for (const auto& [type, n] : cfg.query_counts) {
    if (n == 0) continue;
    const std::string name(querygen::to_string(type));
    std::vector<querygen::QueryRecord> records;
    try {
      records = querygen::generate_queries(type, a.chunks, &a.graph, *llm, n, rng, qc);
    } catch (const querygen::InsufficientStructure& e) {
      spdlog::warn("querygen {}: {}", name, e.what());
    }
    result.generated[name] = records.size();
    result.passed[name] = 0;
    for (auto& r : records) {
      if (cfg.validate_queries) {
        r.validation = querygen::verify_then_filter(r, a.chunks, *judge, embedder.get(), cfg.validation);
      }
      if (r.validation.passed()) ++result.passed[name];
      if (!only_passed || r.validation.passed()) kept.push_back(std::move(r));
    }
  }
  querygen::write_queries(out, kept);
  result.written = kept.size();
  return result;
}

std::vector<paradigms::ParadigmRun> read_runs(const fs::path& path) {
  if (!fs::exists(path)) throw DataError("run file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  std::vector<paradigms::ParadigmRun> runs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw corpus::ParseError(lineno, "invalid run record");
    runs.push_back(paradigms::run_from_json(j));
  }
  return runs;
}

RunResult cmd_run(const ExperimentConfig& cfg, std::optional<std::size_t> limit) {
  const Artifacts a = load_artifacts(cfg.output_dir);
  const auto queries = querygen::read_queries(cfg.queries);
  const fs::path out_path = cfg.output_dir / files::runs;

  std::set<std::string> done;
  for (const auto& r : recover_runs(out_path)) done.insert(pair_key(r.query_id, r.paradigm));

  struct Task {
    const querygen::QueryRecord* query;
    ParadigmKind kind;
  };
  RunResult result;
  std::vector<Task> tasks;
  std::set<std::string> ids;
  for (const auto& q : queries) {
    if (!ids.insert(q.query_id).second) throw DataError("duplicate query id: " + q.query_id);
    if (q.validation.status == querygen::ValidationStatus::failed) {
      spdlog::info("skipping query {} (failed validation)", q.query_id);
      continue;
    }
    for (ParadigmKind k : cfg.paradigms) {
      ++result.planned;
      if (done.count(pair_key(q.query_id, k))) {
        ++result.resumed;
      } else {
        tasks.push_back({&q, k});
      }
    }
  }
  if (limit && tasks.size() > *limit) tasks.resize(*limit);
  if (tasks.empty()) return result;

  auto llm = make_llm(cfg.llm);
  auto embedder = make_embedder(cfg.embedding);
  paradigms::Resources res;
  res.chunks = &a.chunks;
  res.chunk_index = &a.chunk_index;
  res.graph = &a.graph;
  res.llm = llm.get();
  res.embedder = embedder.get();
  const paradigms::Executor executor(res, cfg.paradigm);

  std::ofstream out(out_path, std::ios::binary | std::ios::app);
  if (!out) throw DataError("cannot append to " + out_path.string());

  // Workers fill slots; this thread writes them strictly in task order so the
  // file content does not depend on scheduling.
  std::vector<std::optional<paradigms::ParadigmRun>> slots(tasks.size());
  std::mutex mu;
  std::condition_variable ready;
  std::exception_ptr error;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        auto run = executor.run(tasks[i].kind, tasks[i].query->query_id, tasks[i].query->text);
        std::lock_guard lock(mu);
        slots[i] = std::move(run);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = tasks.size();
      }
      ready.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(cfg.workers, tasks.size()); ++t) pool.emplace_back(work);

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    paradigms::ParadigmRun run;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return slots[i].has_value() || error; });
      if (!slots[i]) break;
      run = std::move(*slots[i]);
      slots[i].reset();
    }
    out << paradigms::to_json(run).dump() << '\n';
    out.flush();
    ++result.executed;
    if (run.failed) ++result.failed;
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return result;
}

EvaluateResult cmd_evaluate(const ExperimentConfig& cfg) {
  const auto runs = read_runs(cfg.output_dir / files::runs);
  const auto gold = queries_by_id(cfg.queries);
  auto token_embedder = make_token_embedder(cfg.token_embedding);
  auto sentence_embedder = make_embedder(cfg.embedding);
  auto judge = make_llm(cfg.judge);
  evalkit::EvalBackends eb{token_embedder.get(), sentence_embedder.get(), judge.get()};

  EvaluateResult result;
  std::vector<evalkit::MetricReport> reports;
  std::ofstream out(cfg.output_dir / files::metrics, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write metrics file");
  for (const auto& run : runs) {
    auto it = gold.find(run.query_id);
    if (it == gold.end()) throw DataError("run refers to unknown query " + run.query_id);
    auto report = evalkit::evaluate_run(run, it->second.gold_answer,
                                        querygen::to_string(it->second.type), eb, cfg.evaluation);
    out << evalkit::to_json(report).dump() << '\n';
    reports.push_back(std::move(report));
  }
  result.reports = reports.size();
  result.rows = evalkit::aggregate(reports, cfg.dataset);
  json rows = json::array();
  for (const auto& r : result.rows) rows.push_back(evalkit::to_json(r));
  write_json(cfg.output_dir / files::aggregate, {{"rows", rows}});
  return result;
}

costs::CostReport cmd_costs(const ExperimentConfig& cfg) {
  const auto runs = read_runs(cfg.output_dir / files::runs);
  const auto construction = costs::construction_from_json(read_json(cfg.output_dir / files::construction));
  std::vector<costs::RunCost> rc;
  std::set<std::string> queries;
  for (const auto& r : runs) {
    rc.push_back({r.paradigm, r.ledger});
    queries.insert(r.query_id);
  }
  if (queries.empty()) throw DataError("no runs to cost");
  auto report = costs::summarize_costs(rc, construction, queries.size(), cfg.dataset);
  write_json(cfg.output_dir / files::costs, costs::to_json(report));
  return report;
}

std::vector<router::RouteDecision> cmd_route(const ExperimentConfig& cfg,
                                             const fs::path& aggregate_path) {
  const json j = read_json(aggregate_path);
  const json& rows_json = j.is_object() ? j.at("rows") : j;
  std::vector<evalkit::AggregateRow> rows;
  for (const auto& r : rows_json) rows.push_back(evalkit::aggregate_row_from_json(r));
  auto decisions = router::route(rows, cfg.utility);
  json out = json::array();
  for (const auto& d : decisions) out.push_back(router::to_json(d));
  write_json(cfg.output_dir / files::routes, {{"lambda", cfg.utility.lambda_cost}, {"routes", out}});
  return decisions;
}

}  // namespace ragbench::cli
