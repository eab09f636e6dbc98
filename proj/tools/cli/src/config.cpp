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

#include "ragbench_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ragbench/errors.hpp"

namespace ragbench::cli {
namespace {

using json = nlohmann::json;

json remote_defaults(const char* kind) {
  return {{"kind", kind},
          {"rules", ""},
          {"dimension", 256},
          {"batch_size", 30},
          {"model", ""},
          {"base_url", ""},
          {"path", ""},
          {"timeout_ms", 120000},
          {"max_attempts", 3},
          {"initial_backoff_ms", 1000},
          {"concurrency", 15}};
}

// Rejects keys the defaults do not know, which catches typos early.
void check_keys(const json& user, const json& defaults, const std::string& where) {
  if (!user.is_object() || !defaults.is_object()) return;
  for (auto it = user.begin(); it != user.end(); ++it) {
    auto d = defaults.find(it.key());
    if (d == defaults.end()) throw ConfigError("unknown config key: " + where + it.key());
    if (d->is_object()) {
      if (!it->is_object() && !it->is_null()) {
        throw ConfigError("config key " + where + it.key() + " must be an object");
      }
      check_keys(*it, *d, where + it.key() + ".");
    }
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key " + where + key + " has the wrong type");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

BackendSpec backend_from(const json& j, const std::string& where,
                         const std::filesystem::path& base) {
  BackendSpec s;
  s.kind = get<std::string>(j, "kind", where);
  s.rules = resolve(base, get<std::string>(j, "rules", where));
  s.dimension = get<std::size_t>(j, "dimension", where);
  s.batch_size = get<std::size_t>(j, "batch_size", where);
  auto& r = s.remote;
  r.model = get<std::string>(j, "model", where);
  r.base_url = get<std::string>(j, "base_url", where);
  r.path = get<std::string>(j, "path", where);
  r.timeout = std::chrono::milliseconds(get<long>(j, "timeout_ms", where));
  r.retry.max_attempts = get<int>(j, "max_attempts", where);
  r.retry.initial_backoff = std::chrono::milliseconds(get<long>(j, "initial_backoff_ms", where));
  r.concurrency = get<int>(j, "concurrency", where);
  r.batch_size = s.batch_size;
  r.dimension = s.dimension;
  require(s.batch_size >= 1, where + "batch_size must be >= 1");
  require(r.retry.max_attempts >= 1, where + "max_attempts must be >= 1");
  require(r.concurrency >= 1, where + "concurrency must be >= 1");
  require(r.timeout.count() > 0, where + "timeout_ms must be positive");
  return s;
}

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }
bool valid_temperature(double t) { return std::isfinite(t) && t >= 0.0 && t <= 2.0; }

}  // namespace

json default_config_json() {
  json j;
  j["dataset"] = "default";
  j["corpus"] = "corpus.jsonl";
  j["queries"] = "queries.jsonl";
  j["output_dir"] = "out";
  j["seed"] = 42;
  j["workers"] = 4;
  j["backends"] = {{"llm", remote_defaults("rule")},
                   {"judge", remote_defaults("same")},
                   {"embedding", remote_defaults("hashing")},
                   {"token_embedding", remote_defaults("onehot")}};
  j["backends"]["llm"]["rules"] = "rules.json";
  j["backends"]["token_embedding"]["dimension"] = 4096;
  j["chunking"] = {{"chunk_size", 512}, {"overlap", 100}};
  j["extraction"] = {{"max_attempts", 3}, {"temperature", 0.0}, {"max_output_tokens", 1000}};
  j["retrieval"] = {
      {"naive", {{"top_k", 100}, {"min_score", 0.4}}},
      {"graph",
       {{"seed_entities", 20},
        {"per_mention_k", 20},
        {"entity_threshold", 0.4},
        {"ppr_alpha", 0.85},
        {"ppr_max_iterations", 100},
        {"ppr_tolerance", 1e-10},
        {"ppr_threshold", 1e-5},
        {"ppr_max_nodes", 100},
        {"max_triplets", 500}}}};
  j["generation"] = {{"token_budget", 8000},      {"max_iterations", 3},
                     {"rrf_k", 60.0},             {"llm_only_temperature", 0.7},
                     {"rag_temperature", 0.3},    {"eval_temperature", 0.1},
                     {"max_output_tokens", 1000}};
  j["paradigms"] = {"llm_only", "naive", "graph", "hybrid", "iterative"};
  j["querygen"] = {{"counts",
                    {{"factual", 0}, {"reasoning_2hop", 0}, {"reasoning_3hop", 0}, {"summary", 0}}},
                   {"temperature", 0.7},
                   {"max_output_tokens", 1000},
                   {"attempts_per_record", 5},
                   {"summary_max_docs", 10},
                   {"validate", true},
                   {"similarity_mode", false},
                   {"strict_threshold", 0.8},
                   {"leak_threshold", 0.8},
                   {"validation_temperature", 0.0}};
  j["evaluation"] = {{"faithfulness_tau", 0.7}};
  j["router"] = {{"lambda", 0.0}};
  return j;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("empty segment in override key: " + key);
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

ExperimentConfig config_from_json(const json& user, const std::filesystem::path& base_dir) {
  if (!user.is_object()) throw ConfigError("config root must be a JSON object");
  const json defaults = default_config_json();
  check_keys(user, defaults, "");
  json j = defaults;
  j.merge_patch(user);
  // merge_patch drops null members; put defaults back for them.
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    if (!j.contains(it.key())) j[it.key()] = *it;
  }
  for (const char* b : {"llm", "judge", "embedding", "token_embedding"}) {
    if (!j["backends"].contains(b)) j["backends"][b] = defaults["backends"][b];
    json merged = defaults["backends"][b];
    merged.merge_patch(j["backends"][b]);
    j["backends"][b] = merged;
  }

  ExperimentConfig c;
  c.resolved = j;
  c.dataset = get<std::string>(j, "dataset", "");
  c.corpus = resolve(base_dir, get<std::string>(j, "corpus", ""));
  c.queries = resolve(base_dir, get<std::string>(j, "queries", ""));
  c.output_dir = resolve(base_dir, get<std::string>(j, "output_dir", ""));
  c.seed = get<std::uint64_t>(j, "seed", "");
  c.workers = get<std::size_t>(j, "workers", "");
  require(c.workers >= 1, "workers must be >= 1");
  require(!c.output_dir.empty(), "output_dir must be set");

  const json& b = j["backends"];
  c.llm = backend_from(b["llm"], "backends.llm.", base_dir);
  c.judge = backend_from(b["judge"], "backends.judge.", base_dir);
  if (c.judge.kind == "same") c.judge = c.llm;
  c.embedding = backend_from(b["embedding"], "backends.embedding.", base_dir);
  c.token_embedding = backend_from(b["token_embedding"], "backends.token_embedding.", base_dir);
  for (const auto* s : {&c.llm, &c.judge}) {
    require(s->kind == "rule" || s->kind == "remote", "chat backend kind must be rule or remote");
    require(s->kind != "rule" || !s->rules.empty(), "rule backend needs a rules file");
  }
  require(c.embedding.kind == "hashing" || c.embedding.kind == "onehot" ||
              c.embedding.kind == "remote",
          "embedding kind must be hashing, onehot or remote");
  require(c.token_embedding.kind == "onehot", "token_embedding kind must be onehot");
  for (const auto* s : {&c.embedding, &c.token_embedding}) {
    require(s->dimension >= 1, "embedding dimension must be >= 1");
  }

  const json& ch = j["chunking"];
  c.chunking.size = get<std::size_t>(ch, "chunk_size", "chunking.");
  c.chunking.overlap = get<std::size_t>(ch, "overlap", "chunking.");
  require(c.chunking.size >= 1, "chunking.chunk_size must be >= 1");
  require(c.chunking.overlap < c.chunking.size, "chunking.overlap must be < chunk_size");

  const json& ex = j["extraction"];
  c.extraction.max_attempts = get<int>(ex, "max_attempts", "extraction.");
  c.extraction.temperature = get<double>(ex, "temperature", "extraction.");
  c.extraction.max_output_tokens = get<int>(ex, "max_output_tokens", "extraction.");
  require(c.extraction.max_attempts >= 1, "extraction.max_attempts must be >= 1");
  require(valid_temperature(c.extraction.temperature), "extraction.temperature outside [0, 2]");
  require(c.extraction.max_output_tokens >= 1, "extraction.max_output_tokens must be >= 1");

  auto& p = c.paradigm;
  const json& nv = j["retrieval"]["naive"];
  p.naive.top_k = get<std::size_t>(nv, "top_k", "retrieval.naive.");
  p.naive.min_score = get<double>(nv, "min_score", "retrieval.naive.");
  require(p.naive.top_k >= 1, "retrieval.naive.top_k must be >= 1");
  require(std::abs(p.naive.min_score) <= 1.0, "retrieval.naive.min_score outside [-1, 1]");

  const json& gr = j["retrieval"]["graph"];
  const std::string gw = "retrieval.graph.";
  p.graph.seed_entities = get<std::size_t>(gr, "seed_entities", gw);
  p.graph.per_mention_k = get<std::size_t>(gr, "per_mention_k", gw);
  p.graph.entity_threshold = get<double>(gr, "entity_threshold", gw);
  p.graph.ppr.alpha = get<double>(gr, "ppr_alpha", gw);
  p.graph.ppr.max_iterations = get<int>(gr, "ppr_max_iterations", gw);
  p.graph.ppr.tolerance = get<double>(gr, "ppr_tolerance", gw);
  p.graph.ppr_threshold = get<double>(gr, "ppr_threshold", gw);
  p.graph.ppr_max_nodes = get<std::size_t>(gr, "ppr_max_nodes", gw);
  p.graph.max_triplets = get<std::size_t>(gr, "max_triplets", gw);
  require(p.graph.seed_entities >= 1 && p.graph.per_mention_k >= 1,
          "retrieval.graph seed limits must be >= 1");
  require(std::abs(p.graph.entity_threshold) <= 1.0, "entity_threshold outside [-1, 1]");
  require(p.graph.ppr.alpha >= 0.0 && p.graph.ppr.alpha < 1.0, "ppr_alpha outside [0, 1)");
  require(p.graph.ppr.max_iterations >= 1, "ppr_max_iterations must be >= 1");
  require(p.graph.ppr.tolerance > 0.0, "ppr_tolerance must be positive");
  require(in_unit(p.graph.ppr_threshold), "ppr_threshold outside [0, 1]");
  require(p.graph.ppr_max_nodes >= 1 && p.graph.max_triplets >= 1,
          "ppr_max_nodes and max_triplets must be >= 1");

  const json& gen = j["generation"];
  p.token_budget = get<std::size_t>(gen, "token_budget", "generation.");
  p.max_iterations = get<int>(gen, "max_iterations", "generation.");
  p.rrf_k = get<double>(gen, "rrf_k", "generation.");
  p.generation.llm_only_temperature = get<double>(gen, "llm_only_temperature", "generation.");
  p.generation.rag_temperature = get<double>(gen, "rag_temperature", "generation.");
  p.generation.eval_temperature = get<double>(gen, "eval_temperature", "generation.");
  p.generation.max_output_tokens = get<int>(gen, "max_output_tokens", "generation.");
  p.graph.token_budget = p.token_budget;
  require(p.token_budget >= 1, "generation.token_budget must be >= 1");
  require(p.max_iterations >= 1, "generation.max_iterations must be >= 1");
  require(p.rrf_k > 0.0, "generation.rrf_k must be positive");
  require(valid_temperature(p.generation.llm_only_temperature) &&
              valid_temperature(p.generation.rag_temperature) &&
              valid_temperature(p.generation.eval_temperature),
          "generation temperatures must lie in [0, 2]");
  require(p.generation.max_output_tokens >= 1, "generation.max_output_tokens must be >= 1");

  const json& names = j["paradigms"];
  require(names.is_array() && !names.empty(), "paradigms must be a non-empty array");
  std::set<ParadigmKind> seen;
  for (const auto& n : names) {
    require(n.is_string(), "paradigm names must be strings");
    auto k = paradigm_from_string(n.get<std::string>());
    if (!k) throw ConfigError("unknown paradigm: " + n.get<std::string>());
    require(seen.insert(*k).second, "paradigm listed twice: " + n.get<std::string>());
    c.paradigms.push_back(*k);
  }

  const json& qg = j["querygen"];
  for (auto it = qg["counts"].begin(); it != qg["counts"].end(); ++it) {
    auto t = querygen::query_type_from_string(it.key());
    if (!t) throw ConfigError("unknown query type: " + it.key());
    require(it->is_number_unsigned() || (it->is_number_integer() && it->get<long>() >= 0),
            "querygen.counts must be nonnegative integers");
    c.query_counts[*t] = it->get<std::size_t>();
  }
  c.querygen.temperature = get<double>(qg, "temperature", "querygen.");
  c.querygen.max_output_tokens = get<int>(qg, "max_output_tokens", "querygen.");
  c.querygen.attempts_per_record = get<int>(qg, "attempts_per_record", "querygen.");
  c.querygen.summary_max_docs = get<std::size_t>(qg, "summary_max_docs", "querygen.");
  c.validate_queries = get<bool>(qg, "validate", "querygen.");
  c.validation.similarity_mode = get<bool>(qg, "similarity_mode", "querygen.");
  c.validation.strict_threshold = get<double>(qg, "strict_threshold", "querygen.");
  c.validation.leak_threshold = get<double>(qg, "leak_threshold", "querygen.");
  c.validation.temperature = get<double>(qg, "validation_temperature", "querygen.");
  require(valid_temperature(c.querygen.temperature) && valid_temperature(c.validation.temperature),
          "querygen temperatures must lie in [0, 2]");
  require(c.querygen.attempts_per_record >= 1 && c.querygen.summary_max_docs >= 2,
          "querygen attempts must be >= 1 and summary_max_docs >= 2");
  require(in_unit(c.validation.strict_threshold) && in_unit(c.validation.leak_threshold),
          "querygen thresholds outside [0, 1]");

  c.evaluation.faithfulness_tau = get<double>(j["evaluation"], "faithfulness_tau", "evaluation.");
  require(in_unit(c.evaluation.faithfulness_tau), "evaluation.faithfulness_tau outside [0, 1]");
  c.utility.lambda_cost = get<double>(j["router"], "lambda", "router.");
  require(std::isfinite(c.utility.lambda_cost) && c.utility.lambda_cost >= 0.0,
          "router.lambda must be a finite nonnegative number");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  json j = json::object();
  std::filesystem::path base = std::filesystem::current_path();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
    base = std::filesystem::absolute(path).parent_path();
  }
  for (const auto& o : overrides) apply_override(j, o);
  return config_from_json(j, base);
}

std::unique_ptr<backends::LlmBackend> make_llm(const BackendSpec& spec) {
  if (spec.kind == "rule") return load_rule_llm(spec.rules);
  if (spec.kind == "remote") {
    auto rc = spec.remote;
    rc.apply_environment();
    if (rc.base_url.empty() || rc.model.empty()) {
      throw ConfigError("remote chat backend needs base_url (or RAGBENCH_API_BASE) and model");
    }
    return std::make_unique<backends::RemoteLlm>(std::move(rc));
  }
  throw ConfigError("unknown chat backend kind: " + spec.kind);
}

std::unique_ptr<backends::EmbeddingBackend> make_embedder(const BackendSpec& spec) {
  if (spec.kind == "hashing") {
    return std::make_unique<backends::HashingEmbedder>(spec.dimension, spec.batch_size);
  }
  if (spec.kind == "onehot") {
    return std::make_unique<backends::OneHotEmbedder>(spec.dimension, spec.batch_size);
  }
  if (spec.kind == "remote") {
    auto rc = spec.remote;
    rc.apply_environment();
    if (rc.base_url.empty() || rc.model.empty()) {
      throw ConfigError("remote embedder needs base_url (or RAGBENCH_API_BASE) and model");
    }
    return std::make_unique<backends::RemoteEmbedder>(std::move(rc));
  }
  throw ConfigError("unknown embedding backend kind: " + spec.kind);
}

std::unique_ptr<backends::TokenEmbedder> make_token_embedder(const BackendSpec& spec) {
  if (spec.kind == "onehot") return std::make_unique<backends::OneHotTokenEmbedder>(spec.dimension);
  throw ConfigError("unknown token embedder kind: " + spec.kind);
}

}  // namespace ragbench::cli
