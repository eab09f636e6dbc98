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

#include "ragbench/retrievers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace ragbench::retrievers {
namespace {

using json = nlohmann::json;

std::vector<std::string> parse_entity_reply(std::string_view reply) {
  const auto b = reply.find('[');
  const auto e = reply.rfind(']');
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) return {};
  json arr = json::parse(reply.substr(b, e - b + 1), nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) return {};
  std::vector<std::string> out;
  for (const json& item : arr) {
    if (!item.is_string()) continue;
    std::string m = text::trim(item.get<std::string>());
    if (!m.empty() && std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

}  // namespace

std::string_view to_string(Source s) { return s == Source::naive ? "naive" : "graph"; }

std::vector<ScoredChunk> naive_retrieve(std::string_view query, const vindex::VectorIndex& index,
                                        backends::EmbeddingBackend& embedder,
                                        const NaiveConfig& config, backends::TokenUsage* spent) {
  if (config.top_k == 0) throw std::invalid_argument("naive_retrieve: k must be >= 1");
  if (index.empty()) return {};
  backends::TokenUsage usage;
  auto q = embedder.embed_one(std::string(query), &usage);
  if (spent) *spent += usage;
  std::vector<ScoredChunk> out;
  std::size_t rank = 0;
  for (auto& hit : index.top_k(q, config.top_k, config.min_score)) {
    out.push_back({std::move(hit.key), hit.score, ++rank, Source::naive});
  }
  return out;
}

std::vector<std::string> extract_query_entities(std::string_view query, backends::LlmBackend& llm,
                                                backends::TokenUsage* spent) {
  const std::string q = text::trim(query);
  if (q.empty()) throw std::invalid_argument("extract_query_entities: empty query");
  backends::ChatRequest req;
  req.kind = prompts::PromptKind::entity_extraction;
  req.prompt = prompts::entity_extraction(q);
  req.temperature = 0.0;
  std::vector<std::string> mentions;
  try {
    auto res = llm.complete(req);
    if (spent) *spent += res.usage;
    mentions = parse_entity_reply(res.text);
  } catch (const backends::AllRetriesExhausted& e) {
    spdlog::warn("entity extraction failed, using the whole question: {}", e.what());
  }
  if (mentions.empty()) mentions.push_back(q);
  return mentions;
}

RankVector pagerank(const std::vector<std::vector<std::size_t>>& adjacency,
                    std::vector<double> p, const PprConfig& config) {
  const std::size_t n = adjacency.size();
  if (p.size() != n) throw std::invalid_argument("pagerank: personalization size mismatch");
  if (config.alpha < 0.0 || config.alpha > 1.0) {
    throw std::invalid_argument("pagerank: alpha must lie in [0, 1]");
  }
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("pagerank: personalization must be finite and nonnegative");
    }
    total += x;
  }
  if (total <= 0.0) throw std::invalid_argument("pagerank: personalization sums to zero");
  for (double& x : p) x /= total;

  RankVector rv;
  rv.alpha = config.alpha;
  std::vector<double> pi = p;
  std::vector<double> next(n);
  for (int it = 0; it < config.max_iterations; ++it) {
    double dangling = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& nb = adjacency[v];
      if (nb.empty()) {
        dangling += pi[v];
        continue;
      }
      const double share = pi[v] / static_cast<double>(nb.size());
      for (std::size_t u : nb) next[u] += share;
    }
    double delta = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      next[u] = config.alpha * (next[u] + dangling * p[u]) + (1.0 - config.alpha) * p[u];
      delta += std::abs(next[u] - pi[u]);
    }
    pi.swap(next);
    rv.iterations = it + 1;
    if (delta < config.tolerance) {
      rv.converged = true;
      break;
    }
  }
  rv.scores = std::move(pi);
  return rv;
}

RankVector personalized_pagerank(const kgraph::KnowledgeGraph& graph,
                                 const std::vector<SeedEntity>& seeds, const PprConfig& config) {
  if (seeds.empty()) throw std::invalid_argument("personalized_pagerank: no seeds");
  std::vector<double> p(graph.node_count(), 0.0);
  for (const SeedEntity& s : seeds) {
    auto id = graph.find(s.entity);
    if (!id) throw SeedNotInGraph(s.entity);
    p[*id] += s.similarity;
  }
  std::vector<std::vector<std::size_t>> adjacency(graph.node_count());
  for (std::size_t v = 0; v < graph.node_count(); ++v) adjacency[v] = graph.neighbors(v);
  return pagerank(adjacency, std::move(p), config);
}

std::vector<SeedEntity> match_seeds(const std::vector<std::string>& mentions,
                                    const kgraph::KnowledgeGraph& graph,
                                    backends::EmbeddingBackend& embedder,
                                    const GraphConfig& config, backends::TokenUsage* spent) {
  const auto& index = graph.entity_index();
  if (mentions.empty() || index.empty()) return {};
  auto batch = embedder.embed(mentions);
  if (spent) *spent += batch.usage;

  std::unordered_map<std::string, double> pooled;
  for (const auto& q : batch.vectors) {
    for (const auto& hit : index.top_k(q, config.per_mention_k, config.entity_threshold)) {
      if (hit.score <= config.entity_threshold) continue;
      auto [it, inserted] = pooled.emplace(hit.key, hit.score);
      if (!inserted) it->second = std::max(it->second, hit.score);
    }
  }
  std::vector<SeedEntity> seeds;
  seeds.reserve(pooled.size());
  for (const auto& [name, sim] : pooled) {
    auto id = graph.find(name);
    if (!id) throw SeedNotInGraph(name);
    seeds.push_back({*id, name, sim});
  }
  std::sort(seeds.begin(), seeds.end(), [](const SeedEntity& a, const SeedEntity& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.entity < b.entity;
  });
  if (seeds.size() > config.seed_entities) seeds.resize(config.seed_entities);
  return seeds;
}

GraphRetrieval graph_retrieve(std::string_view query, const kgraph::KnowledgeGraph& graph,
                              backends::LlmBackend& llm, backends::EmbeddingBackend& embedder,
                              const GraphConfig& config, backends::TokenUsage* spent,
                              const text::Tokenizer& tokenizer) {
  GraphRetrieval out;
  out.mentions = extract_query_entities(query, llm, spent);
  out.seeds = match_seeds(out.mentions, graph, embedder, config, spent);
  if (out.seeds.empty()) throw NoSeedsFound();

  // Phase 2: PPR expansion.
  out.ppr = personalized_pagerank(graph, out.seeds, config.ppr);
  const auto& pi = out.ppr.scores;
  std::vector<std::size_t> ranked;
  for (std::size_t v = 0; v < pi.size(); ++v) {
    if (pi[v] >= config.ppr_threshold) ranked.push_back(v);
  }
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    if (pi[a] != pi[b]) return pi[a] > pi[b];
    return graph.name(a) < graph.name(b);
  });
  if (ranked.size() > config.ppr_max_nodes) ranked.resize(config.ppr_max_nodes);
  std::vector<char> in_subgraph(graph.node_count(), 0);
  for (std::size_t v : ranked) in_subgraph[v] = 1;
  for (const SeedEntity& s : out.seeds) {
    if (!in_subgraph[s.node]) {
      in_subgraph[s.node] = 1;
      ranked.push_back(s.node);
    }
  }
  out.expanded_nodes = std::move(ranked);

  // Phase 3: induced triplets by seed similarity.
  std::vector<double> seed_sim(graph.node_count(), 0.0);
  for (const SeedEntity& s : out.seeds) seed_sim[s.node] = s.similarity;
  const auto& edges = graph.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (in_subgraph[edges[e].u] && in_subgraph[edges[e].v]) {
      out.triplets.push_back({e, std::max(seed_sim[edges[e].u], seed_sim[edges[e].v])});
    }
  }
  std::sort(out.triplets.begin(), out.triplets.end(),
            [&](const RankedTriplet& a, const RankedTriplet& b) {
              if (a.score != b.score) return a.score > b.score;
              const auto& x = edges[a.edge];
              const auto& y = edges[b.edge];
              return std::tie(graph.name(x.u), x.relation, graph.name(x.v)) <
                     std::tie(graph.name(y.u), y.relation, graph.name(y.v));
            });
  if (out.triplets.size() > config.max_triplets) out.triplets.resize(config.max_triplets);

  std::unordered_set<std::string> seen_sentences;
  std::unordered_set<std::string> admitted;
  std::unordered_map<std::string, std::size_t> chunk_pos;
  std::vector<std::string> parts;
  std::size_t used = 0;
  for (const RankedTriplet& t : out.triplets) {
    const kgraph::Edge& edge = edges[t.edge];
    for (const std::string& chunk : edge.source_chunk_ids) {
      if (chunk_pos.emplace(chunk, out.supporting.size()).second) {
        out.supporting.push_back({chunk, t.score, out.supporting.size() + 1, Source::graph});
      }
    }
    bool budget_hit = false;
    for (const std::string& s : edge.source_sentences) {
      if (seen_sentences.insert(s).second) {
        out.sentences.push_back({s, tokenizer.count(s)});
      }
      if (budget_hit || admitted.count(s)) continue;
      const std::size_t n = tokenizer.count(s);
      if (used + n > config.token_budget) {
        budget_hit = true;
        continue;
      }
      admitted.insert(s);
      parts.push_back(s);
      used += n;
    }
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.context += '\n';
    out.context += parts[i];
  }
  out.context_tokens = tokenizer.count(out.context);
  return out;
}

}  // namespace ragbench::retrievers
