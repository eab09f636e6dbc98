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
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"
#include "ragbench/corpus.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/kgraph.hpp"

namespace ragbench::querygen {

enum class QueryType { factual, reasoning_2hop, reasoning_3hop, summary };

std::string_view to_string(QueryType t);
std::optional<QueryType> query_type_from_string(std::string_view s);

constexpr bool is_reasoning(QueryType t) {
  return t == QueryType::reasoning_2hop || t == QueryType::reasoning_3hop;
}

// Exact supporting-fact count for factual and reasoning kinds; the minimum for
// summaries.
constexpr std::size_t required_support(QueryType t) {
  switch (t) {
    case QueryType::factual: return 1;
    case QueryType::reasoning_2hop: return 2;
    case QueryType::reasoning_3hop: return 3;
    case QueryType::summary: return 2;
  }
  return 1;
}

enum class FailedCheck { grounding, shortcut, lexical_leak, parametric_leak };
std::string_view to_string(FailedCheck c);

enum class ValidationStatus { pending, passed, failed, unvalidated };
std::string_view to_string(ValidationStatus s);

struct ValidationOutcome {
  ValidationStatus status = ValidationStatus::pending;
  std::optional<FailedCheck> failed_check;  // set iff status == failed
  // Checks in the order they ran, e.g. "grounding", "shortcut:d1#0".
  std::vector<std::string> steps;
  std::string error;

  bool passed() const { return status == ValidationStatus::passed; }
};

struct QueryRecord {
  std::string query_id;
  std::string text;
  std::string gold_answer;
  QueryType type = QueryType::factual;
  std::vector<std::string> supporting_fact_ids;  // chunk ids
  std::string reasoning;
  ValidationOutcome validation;
};

class InsufficientStructure : public DataError {
 public:
  explicit InsufficientStructure(const std::string& what) : DataError(what) {}
};

struct QuerygenConfig {
  double temperature = 0.7;
  int max_output_tokens = 1000;
  // Draws tried per requested record before giving up on it.
  int attempts_per_record = 5;
  std::size_t summary_max_docs = 10;
  std::string id_prefix;
};

// Records carry chunk ids as supporting facts. Throws InsufficientStructure
// when the corpus or graph cannot supply the requested kind at all.
std::vector<QueryRecord> generate_queries(QueryType type, const std::vector<corpus::Chunk>& chunks,
                                          const kgraph::KnowledgeGraph* graph,
                                          backends::LlmBackend& llm, std::size_t n,
                                          std::mt19937_64& rng, const QuerygenConfig& config = {},
                                          backends::TokenUsage* spent = nullptr);

// Reads {"question", "answer"[, "reasoning"]}.
struct GeneratedQa {
  std::string question;
  std::string answer;
  std::string reasoning;
};
std::optional<GeneratedQa> parse_generated(std::string_view reply);

struct ValidationConfig {
  // Judge-verdict checks by default; with thresholds the answer/gold cosine
  // decides instead.
  bool similarity_mode = false;
  double strict_threshold = 0.8;
  double leak_threshold = 0.8;
  double temperature = 0.0;
};

// Grounding, then shortcut (reasoning kinds only), then lexical and
// parametric leakage. The first failing check ends validation. Backend
// failures leave the record unvalidated.
ValidationOutcome verify_then_filter(const QueryRecord& record,
                                     const std::vector<corpus::Chunk>& chunks,
                                     backends::LlmBackend& llm,
                                     backends::EmbeddingBackend* embedder = nullptr,
                                     const ValidationConfig& config = {},
                                     backends::TokenUsage* spent = nullptr);

// Case-folded, punctuation-stripped substring test of the gold answer.
bool lexical_leak(std::string_view query, std::string_view gold);

nlohmann::json to_json(const QueryRecord& r);
QueryRecord query_from_json(const nlohmann::json& j);
void write_queries(const std::filesystem::path& path, const std::vector<QueryRecord>& records);
std::vector<QueryRecord> read_queries(const std::filesystem::path& path);

}  // namespace ragbench::querygen
