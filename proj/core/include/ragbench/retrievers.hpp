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

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ragbench/backends.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/kgraph.hpp"
#include "ragbench/vindex.hpp"

namespace ragbench::retrievers {

enum class Source { naive, graph };

std::string_view to_string(Source s);

struct ScoredChunk {
  std::string chunk_id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  Source source = Source::naive;

  friend bool operator==(const ScoredChunk&, const ScoredChunk&) = default;
};

struct SeedEntity {
  std::size_t node = 0;
  std::string entity;
  double similarity = 0.0;
};

// Stationary scores indexed by node id.
struct RankVector {
  std::vector<double> scores;
  double alpha = 0.85;
  int iterations = 0;
  bool converged = false;
};

class NoSeedsFound : public DataError {
 public:
  NoSeedsFound() : DataError("no graph entity matched the query above the entity threshold") {}
};

class SeedNotInGraph : public DataError {
 public:
  explicit SeedNotInGraph(const std::string& entity)
      : DataError("seed entity not in graph: " + entity) {}
};

// ---------------------------------------------------------------------------
// Dense retrieval
// ---------------------------------------------------------------------------

struct NaiveConfig {
  std::size_t top_k = 100;
  double min_score = 0.4;
};

// Embeds the query and returns the index's top hits. An empty index yields
// nothing. Embedding usage is added to `spent`.
std::vector<ScoredChunk> naive_retrieve(std::string_view query, const vindex::VectorIndex& index,
                                        backends::EmbeddingBackend& embedder,
                                        const NaiveConfig& config = {},
                                        backends::TokenUsage* spent = nullptr);

// ---------------------------------------------------------------------------
// Graph retrieval
// ---------------------------------------------------------------------------

// LLM entity mentions of the question. Falls back to the whole question when
// the reply lists nothing, fails to parse, or the backend gives up.
std::vector<std::string> extract_query_entities(std::string_view query, backends::LlmBackend& llm,
                                                backends::TokenUsage* spent = nullptr);

struct PprConfig {
  double alpha = 0.85;
  int max_iterations = 100;
  // L1 change between iterates below which iteration stops.
  double tolerance = 1e-10;
};

// Power iteration of pi <- alpha * A * pi + (1 - alpha) * p over a simple
// undirected adjacency list, A column-normalized. The mass of nodes without
// neighbors is returned through p. `personalization` must be nonnegative with
// a positive sum; it is normalized here.
RankVector pagerank(const std::vector<std::vector<std::size_t>>& adjacency,
                    std::vector<double> personalization, const PprConfig& config = {});

// p[v] proportional to the seed similarity of v.
RankVector personalized_pagerank(const kgraph::KnowledgeGraph& graph,
                                 const std::vector<SeedEntity>& seeds,
                                 const PprConfig& config = {});

struct GraphConfig {
  std::size_t seed_entities = 20;
  std::size_t per_mention_k = 20;
  double entity_threshold = 0.4;
  PprConfig ppr;
  double ppr_threshold = 1e-5;
  std::size_t ppr_max_nodes = 100;
  std::size_t max_triplets = 500;
  std::size_t token_budget = 8000;
};

struct RankedTriplet {
  std::size_t edge = 0;
  double score = 0.0;  // max seed similarity of the endpoints
};

struct EvidenceSentence {
  std::string text;
  std::size_t tokens = 0;
};

struct GraphRetrieval {
  std::vector<std::string> mentions;
  std::vector<SeedEntity> seeds;
  RankVector ppr;
  // PPR score descending, then name.
  std::vector<std::size_t> expanded_nodes;
  std::vector<RankedTriplet> triplets;
  // Distinct source sentences in triplet order, before budgeting.
  std::vector<EvidenceSentence> sentences;
  std::string context;
  std::size_t context_tokens = 0;
  std::vector<ScoredChunk> supporting;
};

// Seeds from entity-embedding search, PPR expansion, then source sentences of
// the induced triplets under the token budget. Throws NoSeedsFound.
GraphRetrieval graph_retrieve(std::string_view query, const kgraph::KnowledgeGraph& graph,
                              backends::LlmBackend& llm, backends::EmbeddingBackend& embedder,
                              const GraphConfig& config = {},
                              backends::TokenUsage* spent = nullptr,
                              const text::Tokenizer& tokenizer = text::default_tokenizer());

// Phase 1 alone, exposed for tests.
std::vector<SeedEntity> match_seeds(const std::vector<std::string>& mentions,
                                    const kgraph::KnowledgeGraph& graph,
                                    backends::EmbeddingBackend& embedder,
                                    const GraphConfig& config = {},
                                    backends::TokenUsage* spent = nullptr);

}  // namespace ragbench::retrievers
