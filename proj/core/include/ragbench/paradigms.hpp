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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"
#include "ragbench/corpus.hpp"
#include "ragbench/costs.hpp"
#include "ragbench/kgraph.hpp"
#include "ragbench/paradigm_kind.hpp"
#include "ragbench/retrievers.hpp"
#include "ragbench/vindex.hpp"

namespace ragbench::paradigms {

// Greedy admission in rank order: an item that would overflow `budget` is
// skipped and later items are still considered. Returns kept positions.
std::vector<std::size_t> apply_token_budget(std::span<const std::size_t> sizes,
                                            std::size_t budget);

struct EvaluatorVerdict {
  bool sufficient = false;
  std::string reason;
  std::optional<std::string> sub_question;  // never set when sufficient
};

// Reads {"sufficient", "reason", "sub_question"} from the evaluator reply.
std::optional<EvaluatorVerdict> parse_verdict(std::string_view reply);

struct FusedChunk {
  std::string chunk_id;
  double score = 0.0;
  std::size_t rank = 0;
  // Rank in each input list, 0 when absent.
  std::vector<std::size_t> ranks;
};

// Reciprocal rank fusion: score(d) = sum over lists holding d of
// 1 / (k + rank). Ties go to the better rank in the first list, then chunk id.
std::vector<FusedChunk> rrf_fuse(const std::vector<std::vector<retrievers::ScoredChunk>>& lists,
                                 double k = 60.0);

enum class StepKind { retrieval, generation, evaluation };
std::string_view to_string(StepKind k);

struct TraceStep {
  StepKind kind = StepKind::generation;
  int round = 0;
  std::string query;
  std::vector<std::string> items;
  std::string text;
  std::optional<EvaluatorVerdict> verdict;
  backends::TokenUsage usage;
  // Evidence units held after a retrieval step (iterative runs).
  std::size_t accumulated = 0;
};

struct ParadigmRun {
  std::string query_id;
  ParadigmKind paradigm = ParadigmKind::llm_only;
  std::string query;
  std::string answer;
  std::string context;
  std::size_t context_tokens = 0;
  costs::CostLedgerEntry ledger;
  std::vector<TraceStep> trace;
  bool failed = false;
  std::string error;
};

nlohmann::json to_json(const ParadigmRun& run);
// Throws DataError on a record that does not follow the run schema.
ParadigmRun run_from_json(const nlohmann::json& j);

struct GenerationConfig {
  double llm_only_temperature = 0.7;
  double rag_temperature = 0.3;
  double eval_temperature = 0.1;
  int max_output_tokens = 1000;
};

struct ParadigmConfig {
  std::size_t token_budget = 8000;
  int max_iterations = 3;
  double rrf_k = 60.0;
  GenerationConfig generation;
  retrievers::NaiveConfig naive;
  retrievers::GraphConfig graph;
};

ParadigmRun answer_llm_only(const std::string& query_id, const std::string& query,
                            backends::LlmBackend& llm, const ParadigmConfig& config = {});

// The shared RAG prompt; an empty context is announced as such.
std::string answer_with_context(std::string_view query, std::string_view context,
                                backends::LlmBackend& llm, const ParadigmConfig& config = {},
                                backends::TokenUsage* spent = nullptr);

struct EvidenceUnit {
  std::string key;  // identity for de-duplication
  std::string text;
  std::size_t tokens = 0;
};

// Base retriever of the iterative loop. Usage of any backend call is added to
// `spent`; `items` receives identifiers for the trace.
using EvidenceRetriever = std::function<std::vector<EvidenceUnit>(
    const std::string& query, backends::TokenUsage& spent, std::vector<std::string>& items)>;

// Round 0 answers without context; rounds 1..T retrieve with the current
// sub-question, accumulate evidence, and answer the original question. Stops
// on a sufficient verdict, a missing or repeated sub-question, or round T.
// A backend failure marks the run failed and keeps the partial trace.
ParadigmRun run_iterative(const std::string& query_id, const std::string& query,
                          ParadigmKind kind, const EvidenceRetriever& base,
                          backends::LlmBackend& llm, const ParadigmConfig& config = {},
                          const text::Tokenizer& tokenizer = text::default_tokenizer());

struct Resources {
  const std::vector<corpus::Chunk>* chunks = nullptr;
  const vindex::VectorIndex* chunk_index = nullptr;
  const kgraph::KnowledgeGraph* graph = nullptr;
  backends::LlmBackend* llm = nullptr;
  backends::EmbeddingBackend* embedder = nullptr;
  const text::Tokenizer* tokenizer = &text::default_tokenizer();
};

// Runs any paradigm over shared read-only artifacts. Safe to call from
// several threads when the backends are.
class Executor {
 public:
  Executor(Resources resources, ParadigmConfig config);

  ParadigmRun run(ParadigmKind kind, const std::string& query_id, const std::string& query) const;

  const ParadigmConfig& config() const { return config_; }

 private:
  void run_naive(ParadigmRun& run) const;
  void run_graph(ParadigmRun& run) const;
  void run_hybrid(ParadigmRun& run) const;
  EvidenceRetriever naive_evidence() const;
  EvidenceRetriever graph_evidence() const;
  retrievers::GraphConfig graph_config() const;
  const corpus::Chunk& chunk(const std::string& id) const;
  void generate(ParadigmRun& run, const std::vector<EvidenceUnit>& candidates) const;

  Resources res_;
  ParadigmConfig config_;
  std::unordered_map<std::string, std::size_t> chunk_pos_;
};

}  // namespace ragbench::paradigms
