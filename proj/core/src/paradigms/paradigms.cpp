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

#include "ragbench/paradigms.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include <spdlog/spdlog.h>

namespace ragbench::paradigms {
namespace {

using json = nlohmann::json;
using backends::ChatRequest;
using backends::TokenUsage;
using costs::Phase;

std::string join_units(const std::vector<EvidenceUnit>& units,
                       const std::vector<std::size_t>& keep) {
  std::string out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (i) out += '\n';
    out += units[keep[i]].text;
  }
  return out;
}

std::string budgeted_context(const std::vector<EvidenceUnit>& units, std::size_t budget) {
  std::vector<std::size_t> sizes;
  sizes.reserve(units.size());
  for (const auto& u : units) sizes.push_back(u.tokens);
  return join_units(units, apply_token_budget(sizes, budget));
}

std::string normalized_query(std::string_view q) { return text::normalize_for_match(q); }

TraceStep generation_step(int round, const std::string& query, std::string answer,
                          const TokenUsage& usage) {
  TraceStep s;
  s.kind = StepKind::generation;
  s.round = round;
  s.query = query;
  s.text = std::move(answer);
  s.usage = usage;
  return s;
}

EvaluatorVerdict evaluate(const std::string& query, const std::string& answer,
                          const std::string& context, backends::LlmBackend& llm,
                          const ParadigmConfig& config, TokenUsage& usage) {
  ChatRequest req;
  req.kind = prompts::PromptKind::iterative_eval;
  req.prompt = prompts::iterative_eval(query, answer, context);
  req.temperature = config.generation.eval_temperature;
  req.max_output_tokens = config.generation.max_output_tokens;
  auto res = llm.complete(req);
  usage += res.usage;
  if (auto v = parse_verdict(res.text)) return *v;
  spdlog::debug("unparseable evaluator reply treated as insufficient");
  return EvaluatorVerdict{false, "unparseable verdict", std::nullopt};
}

json verdict_json(const EvaluatorVerdict& v) {
  return {{"sufficient", v.sufficient},
          {"reason", v.reason},
          {"sub_question", v.sub_question ? json(*v.sub_question) : json(nullptr)}};
}

template <typename Fn>
void guarded(ParadigmRun& run, Fn&& fn) {
  try {
    fn();
  } catch (const BackendError& e) {
    run.failed = true;
    run.error = e.what();
    spdlog::warn("run {} / {} failed: {}", run.query_id, to_string(run.paradigm), e.what());
  }
}

}  // namespace

std::vector<std::size_t> apply_token_budget(std::span<const std::size_t> sizes,
                                            std::size_t budget) {
  std::vector<std::size_t> keep;
  std::size_t used = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] > budget - used) continue;
    used += sizes[i];
    keep.push_back(i);
  }
  return keep;
}

std::optional<EvaluatorVerdict> parse_verdict(std::string_view reply) {
  const auto b = reply.find('{');
  const auto e = reply.rfind('}');
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) return std::nullopt;
  json j = json::parse(reply.substr(b, e - b + 1), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto it = j.find("sufficient");
  if (it == j.end()) return std::nullopt;
  EvaluatorVerdict v;
  if (it->is_boolean()) {
    v.sufficient = it->get<bool>();
  } else if (it->is_string()) {
    const std::string s = text::casefold(text::trim(it->get<std::string>()));
    if (s != "true" && s != "false") return std::nullopt;
    v.sufficient = s == "true";
  } else {
    return std::nullopt;
  }
  if (auto r = j.find("reason"); r != j.end() && r->is_string()) v.reason = r->get<std::string>();
  if (!v.sufficient) {
    if (auto q = j.find("sub_question"); q != j.end() && q->is_string()) {
      std::string sq = text::trim(q->get<std::string>());
      const std::string folded = text::casefold(sq);
      if (!sq.empty() && folded != "null" && folded != "none") v.sub_question = std::move(sq);
    }
  }
  return v;
}

std::vector<FusedChunk> rrf_fuse(const std::vector<std::vector<retrievers::ScoredChunk>>& lists,
                                 double k) {
  std::map<std::string, FusedChunk> by_id;
  for (std::size_t l = 0; l < lists.size(); ++l) {
    for (const auto& sc : lists[l]) {
      if (sc.rank == 0) throw std::invalid_argument("rrf_fuse: ranks are 1-based");
      FusedChunk& f = by_id[sc.chunk_id];
      if (f.ranks.empty()) {
        f.chunk_id = sc.chunk_id;
        f.ranks.assign(lists.size(), 0);
      }
      if (f.ranks[l] == 0 || sc.rank < f.ranks[l]) f.ranks[l] = sc.rank;
    }
  }
  std::vector<FusedChunk> out;
  out.reserve(by_id.size());
  for (auto& [id, f] : by_id) {
    // Summed in list order so equal rank patterns give bit-identical scores.
    for (std::size_t r : f.ranks) {
      if (r) f.score += 1.0 / (k + static_cast<double>(r));
    }
    out.push_back(std::move(f));
  }
  auto first_rank = [](const FusedChunk& f) {
    return f.ranks.empty() || f.ranks[0] == 0 ? std::numeric_limits<std::size_t>::max()
                                              : f.ranks[0];
  };
  std::sort(out.begin(), out.end(), [&](const FusedChunk& a, const FusedChunk& b) {
    if (a.score != b.score) return a.score > b.score;
    if (first_rank(a) != first_rank(b)) return first_rank(a) < first_rank(b);
    return a.chunk_id < b.chunk_id;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::retrieval: return "retrieval";
    case StepKind::generation: return "generation";
    case StepKind::evaluation: return "evaluation";
  }
  return "unknown";
}

ParadigmRun answer_llm_only(const std::string& query_id, const std::string& query,
                            backends::LlmBackend& llm, const ParadigmConfig& config) {
  ParadigmRun run;
  run.query_id = query_id;
  run.paradigm = ParadigmKind::llm_only;
  run.query = query;
  guarded(run, [&] {
    ChatRequest req;
    req.kind = prompts::PromptKind::direct_generation;
    req.prompt = prompts::direct_generation(query);
    req.temperature = config.generation.llm_only_temperature;
    req.max_output_tokens = config.generation.max_output_tokens;
    auto res = llm.complete(req);
    costs::record_usage(run.ledger, Phase::generation, res.usage);
    run.answer = res.text;
    run.trace.push_back(generation_step(0, query, res.text, res.usage));
  });
  return run;
}

std::string answer_with_context(std::string_view query, std::string_view context,
                                backends::LlmBackend& llm, const ParadigmConfig& config,
                                TokenUsage* spent) {
  ChatRequest req;
  req.kind = prompts::PromptKind::context_generation;
  req.prompt = prompts::context_generation(context, query);
  req.temperature = config.generation.rag_temperature;
  req.max_output_tokens = config.generation.max_output_tokens;
  auto res = llm.complete(req);
  if (spent) *spent += res.usage;
  return res.text;
}

ParadigmRun run_iterative(const std::string& query_id, const std::string& query,
                          ParadigmKind kind, const EvidenceRetriever& base,
                          backends::LlmBackend& llm, const ParadigmConfig& config,
                          const text::Tokenizer& tokenizer) {
  if (config.max_iterations < 1) throw std::invalid_argument("run_iterative: T must be >= 1");
  ParadigmRun run;
  run.query_id = query_id;
  run.paradigm = kind;
  run.query = query;

  guarded(run, [&] {
    // Round 0: closed-book answer, then self-evaluation.
    TokenUsage gen;
    {
      ChatRequest req;
      req.kind = prompts::PromptKind::direct_generation;
      req.prompt = prompts::direct_generation(query);
      req.temperature = config.generation.rag_temperature;
      req.max_output_tokens = config.generation.max_output_tokens;
      auto res = llm.complete(req);
      gen = res.usage;
      costs::record_usage(run.ledger, Phase::generation, gen);
      run.answer = res.text;
      run.trace.push_back(generation_step(0, query, res.text, gen));
    }
    TokenUsage ev;
    EvaluatorVerdict verdict = evaluate(query, run.answer, "", llm, config, ev);
    costs::record_usage(run.ledger, Phase::retrieval, ev);
    {
      TraceStep s;
      s.kind = StepKind::evaluation;
      s.query = query;
      s.text = verdict.reason;
      s.verdict = verdict;
      s.usage = ev;
      run.trace.push_back(std::move(s));
    }
    if (verdict.sufficient) return;

    std::unordered_set<std::string> history{normalized_query(query)};
    std::string current = verdict.sub_question.value_or(query);
    history.insert(normalized_query(current));

    std::vector<EvidenceUnit> accumulated;
    std::unordered_set<std::string> held;
    for (int t = 1; t <= config.max_iterations; ++t) {
      TraceStep ret;
      ret.kind = StepKind::retrieval;
      ret.round = t;
      ret.query = current;
      TokenUsage spent;
      for (EvidenceUnit& u : base(current, spent, ret.items)) {
        if (held.insert(u.key).second) accumulated.push_back(std::move(u));
      }
      ret.usage = spent;
      ret.accumulated = accumulated.size();
      costs::record_usage(run.ledger, Phase::retrieval, spent);
      run.trace.push_back(std::move(ret));

      run.context = budgeted_context(accumulated, config.token_budget);
      TokenUsage g;
      run.answer = answer_with_context(query, run.context, llm, config, &g);
      costs::record_usage(run.ledger, Phase::generation, g);
      run.trace.push_back(generation_step(t, query, run.answer, g));

      TokenUsage e;
      verdict = evaluate(query, run.answer, run.context, llm, config, e);
      costs::record_usage(run.ledger, Phase::retrieval, e);
      TraceStep s;
      s.kind = StepKind::evaluation;
      s.round = t;
      s.query = current;
      s.text = verdict.reason;
      s.verdict = verdict;
      s.usage = e;
      run.trace.push_back(std::move(s));

      if (verdict.sufficient || !verdict.sub_question) return;
      if (!history.insert(normalized_query(*verdict.sub_question)).second) return;
      current = *verdict.sub_question;
    }
  });
  run.context_tokens = tokenizer.count(run.context);
  run.ledger.context_tokens = static_cast<std::int64_t>(run.context_tokens);
  return run;
}

// ---------------------------------------------------------------------------
// Executor
// ---------------------------------------------------------------------------

Executor::Executor(Resources resources, ParadigmConfig config)
    : res_(resources), config_(std::move(config)) {
  if (!res_.llm) throw ConfigError("executor requires an LLM backend");
  if (!res_.tokenizer) res_.tokenizer = &text::default_tokenizer();
  if (res_.chunks) {
    for (std::size_t i = 0; i < res_.chunks->size(); ++i) {
      chunk_pos_.emplace((*res_.chunks)[i].chunk_id, i);
    }
  }
}

const corpus::Chunk& Executor::chunk(const std::string& id) const {
  auto it = chunk_pos_.find(id);
  if (it == chunk_pos_.end()) throw DataError("retrieved chunk missing from chunk store: " + id);
  return (*res_.chunks)[it->second];
}

retrievers::GraphConfig Executor::graph_config() const {
  retrievers::GraphConfig g = config_.graph;
  g.token_budget = std::min(g.token_budget, config_.token_budget);
  return g;
}

void Executor::generate(ParadigmRun& run, const std::vector<EvidenceUnit>& candidates) const {
  run.context = budgeted_context(candidates, config_.token_budget);
  TokenUsage g;
  run.answer = answer_with_context(run.query, run.context, *res_.llm, config_, &g);
  costs::record_usage(run.ledger, Phase::generation, g);
  run.trace.push_back(generation_step(0, run.query, run.answer, g));
}

void Executor::run_naive(ParadigmRun& run) const {
  if (!res_.chunk_index || !res_.embedder || !res_.chunks) {
    throw ConfigError("naive retrieval requires a chunk index, chunk store and embedder");
  }
  TraceStep step;
  step.kind = StepKind::retrieval;
  step.query = run.query;
  TokenUsage spent;
  auto hits = retrievers::naive_retrieve(run.query, *res_.chunk_index, *res_.embedder,
                                         config_.naive, &spent);
  std::vector<EvidenceUnit> units;
  for (const auto& h : hits) {
    const corpus::Chunk& c = chunk(h.chunk_id);
    units.push_back({c.chunk_id, c.text, c.token_count});
    step.items.push_back(h.chunk_id);
  }
  step.usage = spent;
  costs::record_usage(run.ledger, Phase::retrieval, spent);
  run.trace.push_back(std::move(step));
  generate(run, units);
}

void Executor::run_graph(ParadigmRun& run) const {
  if (!res_.graph || !res_.embedder) {
    throw ConfigError("graph retrieval requires a knowledge graph and embedder");
  }
  TraceStep step;
  step.kind = StepKind::retrieval;
  step.query = run.query;
  TokenUsage spent;
  try {
    auto gr = retrievers::graph_retrieve(run.query, *res_.graph, *res_.llm, *res_.embedder,
                                         graph_config(), &spent, *res_.tokenizer);
    for (const auto& sc : gr.supporting) step.items.push_back(sc.chunk_id);
    run.context = std::move(gr.context);
  } catch (const retrievers::NoSeedsFound&) {
    step.text = "no seed entities";
    run.context.clear();
  }
  step.usage = spent;
  costs::record_usage(run.ledger, Phase::retrieval, spent);
  run.trace.push_back(std::move(step));

  TokenUsage g;
  run.answer = answer_with_context(run.query, run.context, *res_.llm, config_, &g);
  costs::record_usage(run.ledger, Phase::generation, g);
  run.trace.push_back(generation_step(0, run.query, run.answer, g));
}

void Executor::run_hybrid(ParadigmRun& run) const {
  if (!res_.chunk_index || !res_.embedder || !res_.chunks || !res_.graph) {
    throw ConfigError("hybrid retrieval requires chunk index, chunk store, graph and embedder");
  }
  TraceStep dense;
  dense.kind = StepKind::retrieval;
  dense.query = run.query;
  TokenUsage dense_usage;
  auto naive = retrievers::naive_retrieve(run.query, *res_.chunk_index, *res_.embedder,
                                          config_.naive, &dense_usage);
  for (const auto& h : naive) dense.items.push_back(h.chunk_id);
  dense.usage = dense_usage;
  costs::record_usage(run.ledger, Phase::retrieval, dense_usage);
  run.trace.push_back(std::move(dense));

  TraceStep graph;
  graph.kind = StepKind::retrieval;
  graph.query = run.query;
  TokenUsage graph_usage;
  std::vector<retrievers::ScoredChunk> supporting;
  try {
    supporting = retrievers::graph_retrieve(run.query, *res_.graph, *res_.llm, *res_.embedder,
                                            graph_config(), &graph_usage, *res_.tokenizer)
                     .supporting;
  } catch (const retrievers::NoSeedsFound&) {
    graph.text = "no seed entities";
  }
  for (const auto& h : supporting) graph.items.push_back(h.chunk_id);
  graph.usage = graph_usage;
  costs::record_usage(run.ledger, Phase::retrieval, graph_usage);
  run.trace.push_back(std::move(graph));

  std::vector<EvidenceUnit> units;
  for (const FusedChunk& f : rrf_fuse({naive, supporting}, config_.rrf_k)) {
    const corpus::Chunk& c = chunk(f.chunk_id);
    units.push_back({c.chunk_id, c.text, c.token_count});
  }
  generate(run, units);
}

EvidenceRetriever Executor::naive_evidence() const {
  if (!res_.chunk_index || !res_.embedder || !res_.chunks) {
    throw ConfigError("naive retrieval requires a chunk index, chunk store and embedder");
  }
  return [this](const std::string& q, TokenUsage& spent, std::vector<std::string>& items) {
    std::vector<EvidenceUnit> units;
    for (const auto& h :
         retrievers::naive_retrieve(q, *res_.chunk_index, *res_.embedder, config_.naive, &spent)) {
      const corpus::Chunk& c = chunk(h.chunk_id);
      units.push_back({c.chunk_id, c.text, c.token_count});
      items.push_back(c.chunk_id);
    }
    return units;
  };
}

EvidenceRetriever Executor::graph_evidence() const {
  if (!res_.graph || !res_.embedder) {
    throw ConfigError("graph retrieval requires a knowledge graph and embedder");
  }
  return [this](const std::string& q, TokenUsage& spent, std::vector<std::string>& items) {
    std::vector<EvidenceUnit> units;
    try {
      auto gr = retrievers::graph_retrieve(q, *res_.graph, *res_.llm, *res_.embedder,
                                           graph_config(), &spent, *res_.tokenizer);
      for (auto& s : gr.sentences) units.push_back({s.text, s.text, s.tokens});
      for (const auto& sc : gr.supporting) items.push_back(sc.chunk_id);
    } catch (const retrievers::NoSeedsFound&) {
    }
    return units;
  };
}

ParadigmRun Executor::run(ParadigmKind kind, const std::string& query_id,
                          const std::string& query) const {
  switch (kind) {
    case ParadigmKind::llm_only:
      return answer_llm_only(query_id, query, *res_.llm, config_);
    case ParadigmKind::iterative_naive:
      return run_iterative(query_id, query, kind, naive_evidence(), *res_.llm, config_,
                           *res_.tokenizer);
    case ParadigmKind::iterative_graph:
      return run_iterative(query_id, query, kind, graph_evidence(), *res_.llm, config_,
                           *res_.tokenizer);
    default:
      break;
  }
  ParadigmRun run;
  run.query_id = query_id;
  run.paradigm = kind;
  run.query = query;
  guarded(run, [&] {
    if (kind == ParadigmKind::naive) run_naive(run);
    else if (kind == ParadigmKind::graph) run_graph(run);
    else run_hybrid(run);
  });
  run.context_tokens = res_.tokenizer->count(run.context);
  run.ledger.context_tokens = static_cast<std::int64_t>(run.context_tokens);
  return run;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json to_json(const ParadigmRun& run) {
  json trace = json::array();
  for (const TraceStep& s : run.trace) {
    json j = {{"kind", std::string(to_string(s.kind))},
              {"round", s.round},
              {"query", s.query},
              {"items", s.items},
              {"text", s.text},
              {"input_tokens", s.usage.input_tokens},
              {"output_tokens", s.usage.output_tokens}};
    if (s.verdict) j["verdict"] = verdict_json(*s.verdict);
    if (s.kind == StepKind::retrieval) j["accumulated"] = s.accumulated;
    trace.push_back(std::move(j));
  }
  json j = {{"query_id", run.query_id},
            {"paradigm", std::string(to_string(run.paradigm))},
            {"query", run.query},
            {"answer", run.answer},
            {"context", run.context},
            {"context_tokens", run.context_tokens},
            {"ledger", costs::to_json(run.ledger)},
            {"trace", trace},
            {"status", run.failed ? "failed" : "ok"}};
  if (run.failed) j["error"] = run.error;
  return j;
}

ParadigmRun run_from_json(const json& j) {
  try {
    ParadigmRun run;
    run.query_id = j.at("query_id").get<std::string>();
    auto kind = paradigm_from_string(j.at("paradigm").get<std::string>());
    if (!kind) throw DataError("unknown paradigm in run record: " + j.at("paradigm").dump());
    run.paradigm = *kind;
    run.query = j.value("query", std::string());
    run.answer = j.at("answer").get<std::string>();
    run.context = j.value("context", std::string());
    run.context_tokens = j.value("context_tokens", std::size_t{0});
    run.ledger = costs::ledger_from_json(j.at("ledger"));
    run.failed = j.value("status", std::string("ok")) == "failed";
    run.error = j.value("error", std::string());
    for (const json& s : j.at("trace")) {
      TraceStep step;
      const std::string kind_name = s.at("kind").get<std::string>();
      if (kind_name == "retrieval") step.kind = StepKind::retrieval;
      else if (kind_name == "generation") step.kind = StepKind::generation;
      else if (kind_name == "evaluation") step.kind = StepKind::evaluation;
      else throw DataError("unknown trace step kind: " + kind_name);
      step.round = s.value("round", 0);
      step.query = s.value("query", std::string());
      step.items = s.value("items", std::vector<std::string>{});
      step.text = s.value("text", std::string());
      step.usage.input_tokens = s.value("input_tokens", std::int64_t{0});
      step.usage.output_tokens = s.value("output_tokens", std::int64_t{0});
      step.accumulated = s.value("accumulated", std::size_t{0});
      if (auto v = s.find("verdict"); v != s.end()) {
        EvaluatorVerdict verdict;
        verdict.sufficient = v->at("sufficient").get<bool>();
        verdict.reason = v->value("reason", std::string());
        if (auto q = v->find("sub_question"); q != v->end() && q->is_string()) {
          verdict.sub_question = q->get<std::string>();
        }
        step.verdict = verdict;
      }
      run.trace.push_back(std::move(step));
    }
    return run;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed run record: ") + e.what());
  }
}

}  // namespace ragbench::paradigms
