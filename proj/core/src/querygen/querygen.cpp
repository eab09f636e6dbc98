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

#include "ragbench/querygen.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "ragbench/evalkit.hpp"
#include "ragbench/retrievers.hpp"

namespace ragbench::querygen {
namespace {

using json = nlohmann::json;

std::size_t draw(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Entity <-> chunk incidence taken from edge provenance.
struct Incidence {
  std::vector<std::vector<std::size_t>> chunks_of_entity;  // sorted chunk positions
  std::vector<std::vector<std::size_t>> entities_of_chunk;  // sorted node ids
};

Incidence incidence(const kgraph::KnowledgeGraph& g,
                    const std::unordered_map<std::string, std::size_t>& chunk_pos) {
  std::vector<std::set<std::size_t>> ec(g.node_count());
  std::vector<std::set<std::size_t>> ce(chunk_pos.size());
  for (const auto& e : g.edges()) {
    for (const auto& cid : e.source_chunk_ids) {
      auto it = chunk_pos.find(cid);
      if (it == chunk_pos.end()) continue;
      for (std::size_t node : {e.u, e.v}) {
        ec[node].insert(it->second);
        ce[it->second].insert(node);
      }
    }
  }
  Incidence inc;
  for (auto& s : ec) inc.chunks_of_entity.emplace_back(s.begin(), s.end());
  for (auto& s : ce) inc.entities_of_chunk.emplace_back(s.begin(), s.end());
  return inc;
}

std::unordered_map<std::string, std::size_t> positions(const std::vector<corpus::Chunk>& chunks) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < chunks.size(); ++i) pos.emplace(chunks[i].chunk_id, i);
  return pos;
}

// Chain of `hops` chunks from distinct documents, consecutive chunks sharing
// a bridge entity.
std::optional<std::vector<std::size_t>> random_chain(const std::vector<corpus::Chunk>& chunks,
                                                     const Incidence& inc, std::size_t hops,
                                                     std::mt19937_64& rng) {
  std::vector<std::size_t> starts;
  for (std::size_t c = 0; c < inc.entities_of_chunk.size(); ++c) {
    if (!inc.entities_of_chunk[c].empty()) starts.push_back(c);
  }
  if (starts.empty()) return std::nullopt;
  std::vector<std::size_t> chain{starts[draw(rng, starts.size())]};
  std::set<std::string> docs{chunks[chain.back()].doc_id};
  while (chain.size() < hops) {
    std::vector<std::size_t> next;
    for (std::size_t e : inc.entities_of_chunk[chain.back()]) {
      for (std::size_t c : inc.chunks_of_entity[e]) {
        if (!docs.count(chunks[c].doc_id)) next.push_back(c);
      }
    }
    if (next.empty()) return std::nullopt;
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    chain.push_back(next[draw(rng, next.size())]);
    docs.insert(chunks[chain.back()].doc_id);
  }
  return chain;
}

bool any_bridge(const std::vector<corpus::Chunk>& chunks, const Incidence& inc) {
  for (const auto& cs : inc.chunks_of_entity) {
    std::set<std::string> docs;
    for (std::size_t c : cs) docs.insert(chunks[c].doc_id);
    if (docs.size() >= 2) return true;
  }
  return false;
}

// Chunk positions cited by edges incident to `node`, in chunk-store order.
std::vector<std::size_t> ego_chunks(const kgraph::KnowledgeGraph& g, std::size_t node,
                                    const std::unordered_map<std::string, std::size_t>& pos) {
  std::set<std::size_t> found;
  for (std::size_t e : g.incident_edges(node)) {
    for (const auto& cid : g.edges()[e].source_chunk_ids) {
      auto it = pos.find(cid);
      if (it != pos.end()) found.insert(it->second);
    }
  }
  return {found.begin(), found.end()};
}

std::vector<std::size_t> cap_docs(const std::vector<corpus::Chunk>& chunks,
                                  const std::vector<std::size_t>& cs, std::size_t max_docs,
                                  std::size_t* doc_count) {
  std::vector<std::size_t> out;
  std::set<std::string> docs;
  for (std::size_t c : cs) {
    if (!docs.count(chunks[c].doc_id)) {
      if (docs.size() >= max_docs) continue;
      docs.insert(chunks[c].doc_id);
    }
    out.push_back(c);
  }
  *doc_count = docs.size();
  return out;
}

std::optional<GeneratedQa> ask(backends::LlmBackend& llm, prompts::PromptKind kind,
                               std::string prompt, const QuerygenConfig& cfg,
                               backends::TokenUsage* spent) {
  backends::ChatRequest req;
  req.kind = kind;
  req.prompt = std::move(prompt);
  req.temperature = cfg.temperature;
  req.max_output_tokens = cfg.max_output_tokens;
  auto res = llm.complete(req);
  if (spent) *spent += res.usage;
  return parse_generated(res.text);
}

std::string make_id(const QuerygenConfig& cfg, QueryType t, std::size_t i) {
  std::string n = std::to_string(i);
  if (n.size() < 4) n.insert(0, 4 - n.size(), '0');
  return cfg.id_prefix + std::string(to_string(t)) + "-" + n;
}

std::string supporting_text(const std::vector<corpus::Chunk>& chunks,
                            const std::unordered_map<std::string, std::size_t>& pos,
                            const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    auto it = pos.find(id);
    if (it == pos.end()) throw DataError("supporting fact not in chunk store: " + id);
    if (!out.empty()) out += '\n';
    out += chunks[it->second].text;
  }
  return out;
}

}  // namespace

std::string_view to_string(QueryType t) {
  switch (t) {
    case QueryType::factual: return "factual";
    case QueryType::reasoning_2hop: return "reasoning_2hop";
    case QueryType::reasoning_3hop: return "reasoning_3hop";
    case QueryType::summary: return "summary";
  }
  return "factual";
}

std::optional<QueryType> query_type_from_string(std::string_view s) {
  for (QueryType t : {QueryType::factual, QueryType::reasoning_2hop, QueryType::reasoning_3hop,
                      QueryType::summary}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view to_string(FailedCheck c) {
  switch (c) {
    case FailedCheck::grounding: return "grounding";
    case FailedCheck::shortcut: return "shortcut";
    case FailedCheck::lexical_leak: return "lexical_leak";
    case FailedCheck::parametric_leak: return "parametric_leak";
  }
  return "grounding";
}

std::string_view to_string(ValidationStatus s) {
  switch (s) {
    case ValidationStatus::pending: return "pending";
    case ValidationStatus::passed: return "passed";
    case ValidationStatus::failed: return "failed";
    case ValidationStatus::unvalidated: return "unvalidated";
  }
  return "pending";
}

std::optional<GeneratedQa> parse_generated(std::string_view reply) {
  const auto b = reply.find('{');
  const auto e = reply.rfind('}');
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) return std::nullopt;
  json j = json::parse(reply.substr(b, e - b + 1), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto str = [&](const char* k) {
    auto it = j.find(k);
    return it != j.end() && it->is_string() ? text::trim(it->get<std::string>()) : std::string();
  };
  GeneratedQa qa{str("question"), str("answer"), str("reasoning")};
  if (qa.question.empty() || qa.answer.empty()) return std::nullopt;
  return qa;
}

std::vector<QueryRecord> generate_queries(QueryType type, const std::vector<corpus::Chunk>& chunks,
                                          const kgraph::KnowledgeGraph* graph,
                                          backends::LlmBackend& llm, std::size_t n,
                                          std::mt19937_64& rng, const QuerygenConfig& cfg,
                                          backends::TokenUsage* spent) {
  if (chunks.empty()) throw InsufficientStructure("query generation needs a non-empty corpus");
  if (type != QueryType::factual && !graph) {
    throw InsufficientStructure("reasoning and summary queries need a knowledge graph");
  }
  const auto pos = positions(chunks);
  std::vector<QueryRecord> out;

  auto emit = [&](const GeneratedQa& qa, std::vector<std::size_t> support) {
    QueryRecord r;
    r.query_id = make_id(cfg, type, out.size() + 1);
    r.text = qa.question;
    r.gold_answer = qa.answer;
    r.reasoning = qa.reasoning;
    r.type = type;
    for (std::size_t c : support) r.supporting_fact_ids.push_back(chunks[c].chunk_id);
    out.push_back(std::move(r));
  };
  const std::size_t budget = n * static_cast<std::size_t>(std::max(1, cfg.attempts_per_record));

  if (type == QueryType::factual) {
    for (std::size_t tries = 0; out.size() < n && tries < budget; ++tries) {
      const std::size_t c = draw(rng, chunks.size());
      auto qa = ask(llm, prompts::PromptKind::querygen_factual,
                    prompts::querygen_factual(chunks[c].text), cfg, spent);
      if (qa) emit(*qa, {c});
    }
    return out;
  }

  const Incidence inc = incidence(*graph, pos);
  if (is_reasoning(type)) {
    if (!any_bridge(chunks, inc)) {
      throw InsufficientStructure("no bridge entity spans two documents");
    }
    const std::size_t hops = required_support(type);
    const int hop_count = static_cast<int>(hops);
    std::size_t chains = 0;
    for (std::size_t tries = 0; out.size() < n && tries < budget * 20; ++tries) {
      auto chain = random_chain(chunks, inc, hops, rng);
      if (!chain) continue;
      ++chains;
      std::vector<std::string> docs;
      for (std::size_t c : *chain) docs.push_back(chunks[c].text);
      auto qa = ask(llm, prompts::PromptKind::querygen_reasoning,
                    prompts::querygen_reasoning(docs, hop_count), cfg, spent);
      if (qa) emit(*qa, *chain);
      if (chains >= budget) break;
    }
    if (chains == 0) {
      throw InsufficientStructure("no " + std::to_string(hops) + "-document chain found");
    }
    return out;
  }

  // Summary: entities sampled by global PageRank among those whose ego graph
  // spans at least two documents.
  std::vector<std::vector<std::size_t>> adjacency(graph->node_count());
  for (std::size_t v = 0; v < graph->node_count(); ++v) adjacency[v] = graph->neighbors(v);
  const auto pr =
      retrievers::pagerank(adjacency, std::vector<double>(graph->node_count(), 1.0)).scores;
  std::vector<std::size_t> eligible;
  std::vector<double> weights;
  std::vector<std::vector<std::size_t>> support_of(graph->node_count());
  for (std::size_t v = 0; v < graph->node_count(); ++v) {
    std::size_t doc_count = 0;
    auto support = cap_docs(chunks, ego_chunks(*graph, v, pos),
                            cfg.summary_max_docs, &doc_count);
    if (doc_count < 2) continue;
    support_of[v] = std::move(support);
    eligible.push_back(v);
    weights.push_back(pr[v]);
  }
  if (eligible.empty()) throw InsufficientStructure("no entity links two or more documents");
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  for (std::size_t tries = 0; out.size() < n && tries < budget; ++tries) {
    const std::size_t v = eligible[pick(rng)];
    std::vector<std::string> docs;
    for (std::size_t c : support_of[v]) docs.push_back(chunks[c].text);
    auto qa = ask(llm, prompts::PromptKind::querygen_summary,
                  prompts::querygen_summary(graph->name(v), docs), cfg, spent);
    if (qa) emit(*qa, support_of[v]);
  }
  return out;
}

bool lexical_leak(std::string_view query, std::string_view gold) {
  const std::string g = text::normalize_for_match(gold);
  if (g.empty()) return false;
  return text::normalize_for_match(query).find(g) != std::string::npos;
}

ValidationOutcome verify_then_filter(const QueryRecord& record,
                                     const std::vector<corpus::Chunk>& chunks,
                                     backends::LlmBackend& llm,
                                     backends::EmbeddingBackend* embedder,
                                     const ValidationConfig& cfg, backends::TokenUsage* spent) {
  if (record.gold_answer.empty() || record.supporting_fact_ids.empty()) {
    throw std::invalid_argument("verify_then_filter: record needs gold answer and support");
  }
  if (cfg.similarity_mode && !embedder) {
    throw ConfigError("similarity-mode validation requires an embedder");
  }
  const auto pos = positions(chunks);
  ValidationOutcome v;

  auto answer = [&](std::string_view context) {
    backends::ChatRequest req;
    req.temperature = cfg.temperature;
    if (context.empty()) {
      req.kind = prompts::PromptKind::direct_generation;
      req.prompt = prompts::direct_generation(record.text);
    } else {
      req.kind = prompts::PromptKind::context_generation;
      req.prompt = prompts::context_generation(context, record.text);
    }
    auto res = llm.complete(req);
    if (spent) *spent += res.usage;
    return res.text;
  };
  auto matches_gold = [&](const std::string& prediction, double threshold) {
    if (cfg.similarity_mode) {
      if (text::is_refusal(prediction)) return false;
      backends::TokenUsage u;
      auto a = embedder->embed_one(prediction, &u);
      auto b = embedder->embed_one(record.gold_answer, &u);
      if (spent) *spent += u;
      return backends::cosine(a, b) >= threshold;
    }
    return evalkit::llm_judge(record.text, prediction, record.gold_answer, llm, spent).label ==
           evalkit::JudgeLabel::correct;
  };
  auto fail = [&](FailedCheck c) {
    v.status = ValidationStatus::failed;
    v.failed_check = c;
    return v;
  };

  try {
    v.steps.push_back("grounding");
    if (!matches_gold(answer(supporting_text(chunks, pos, record.supporting_fact_ids)),
                      cfg.strict_threshold)) {
      return fail(FailedCheck::grounding);
    }
    if (is_reasoning(record.type)) {
      for (const auto& id : record.supporting_fact_ids) {
        v.steps.push_back("shortcut:" + id);
        if (matches_gold(answer(supporting_text(chunks, pos, {id})), cfg.strict_threshold)) {
          return fail(FailedCheck::shortcut);
        }
      }
    }
    v.steps.push_back("lexical_leak");
    if (lexical_leak(record.text, record.gold_answer)) return fail(FailedCheck::lexical_leak);
    v.steps.push_back("parametric_leak");
    if (matches_gold(answer(""), cfg.leak_threshold)) return fail(FailedCheck::parametric_leak);
  } catch (const BackendError& e) {
    spdlog::warn("validation of {} abandoned: {}", record.query_id, e.what());
    v.status = ValidationStatus::unvalidated;
    v.failed_check.reset();
    v.error = e.what();
    return v;
  }
  v.status = ValidationStatus::passed;
  return v;
}

json to_json(const QueryRecord& r) {
  json val = {{"status", std::string(to_string(r.validation.status))},
              {"failed_check", r.validation.failed_check
                                   ? json(std::string(to_string(*r.validation.failed_check)))
                                   : json(nullptr)},
              {"passed", r.validation.passed()}};
  if (!r.validation.steps.empty()) val["steps"] = r.validation.steps;
  if (!r.validation.error.empty()) val["error"] = r.validation.error;
  json j = {{"query_id", r.query_id},
            {"text", r.text},
            {"gold_answer", r.gold_answer},
            {"query_type", std::string(to_string(r.type))},
            {"supporting_fact_ids", r.supporting_fact_ids},
            {"validation", val}};
  if (!r.reasoning.empty()) j["reasoning"] = r.reasoning;
  return j;
}

QueryRecord query_from_json(const json& j) {
  try {
    QueryRecord r;
    r.query_id = j.at("query_id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    r.gold_answer = j.at("gold_answer").get<std::string>();
    auto type = query_type_from_string(j.at("query_type").get<std::string>());
    if (!type) throw DataError("unknown query_type: " + j.at("query_type").dump());
    r.type = *type;
    r.supporting_fact_ids = j.value("supporting_fact_ids", std::vector<std::string>{});
    r.reasoning = j.value("reasoning", std::string());
    if (auto it = j.find("validation"); it != j.end() && it->is_object()) {
      const std::string status = it->value("status", std::string("pending"));
      for (auto s : {ValidationStatus::pending, ValidationStatus::passed, ValidationStatus::failed,
                     ValidationStatus::unvalidated}) {
        if (to_string(s) == status) r.validation.status = s;
      }
      if (auto fc = it->find("failed_check"); fc != it->end() && fc->is_string()) {
        for (auto c : {FailedCheck::grounding, FailedCheck::shortcut, FailedCheck::lexical_leak,
                       FailedCheck::parametric_leak}) {
          if (to_string(c) == fc->get<std::string>()) r.validation.failed_check = c;
        }
      }
      r.validation.steps = it->value("steps", std::vector<std::string>{});
      r.validation.error = it->value("error", std::string());
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed query record: ") + e.what());
  }
}

void write_queries(const std::filesystem::path& path, const std::vector<QueryRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write query file: " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<QueryRecord> read_queries(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open query file: " + path.string());
  std::vector<QueryRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw corpus::ParseError(lineno, "invalid query record");
    out.push_back(query_from_json(j));
  }
  return out;
}

}  // namespace ragbench::querygen
