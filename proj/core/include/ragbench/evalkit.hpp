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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/paradigms.hpp"

namespace ragbench::evalkit {

class EmptyText : public DataError {
 public:
  explicit EmptyText(const std::string& which) : DataError(which + " has no tokens") {}
};

class EmptyReference : public DataError {
 public:
  EmptyReference() : DataError("reference has no sentences") {}
};

class EmptyAnswer : public DataError {
 public:
  EmptyAnswer() : DataError("answer has no sentences") {}
};

class EmptyContext : public DataError {
 public:
  EmptyContext() : DataError("retrieved context has no sentences") {}
};

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Greedy max-cosine token matching between the two texts' word tokens.
F1Score semantic_f1(std::string_view prediction, std::string_view reference,
                    backends::TokenEmbedder& embedder,
                    const text::Tokenizer& tokenizer = text::default_tokenizer());

// Mean over reference sentences of the best cosine to any prediction
// sentence; 0 when the prediction has no sentences.
double soft_coverage(std::string_view prediction, std::string_view reference,
                     backends::EmbeddingBackend& embedder,
                     const text::SentenceSplitter& splitter = text::default_sentence_splitter());

struct Faithfulness {
  double hard = 0.0;  // share of answer sentences with support >= tau
  double soft = 0.0;  // mean support
};

Faithfulness faithfulness(std::string_view answer, std::string_view context,
                          backends::EmbeddingBackend& embedder, double tau = 0.7,
                          const text::SentenceSplitter& splitter = text::default_sentence_splitter());

// Paradigms for which faithfulness is reported.
constexpr bool reports_faithfulness(ParadigmKind k) {
  return k == ParadigmKind::naive || k == ParadigmKind::graph;
}

enum class JudgeLabel { correct, incorrect, incomplete };
std::string_view to_string(JudgeLabel l);
std::optional<JudgeLabel> judge_label_from_string(std::string_view s);

struct JudgeVerdict {
  JudgeLabel label = JudgeLabel::incomplete;
  std::string rationale;
};

// Reads {"label", "rationale"}; a bare label word is accepted too.
std::optional<JudgeVerdict> parse_judge_reply(std::string_view reply);

// Refusals are labelled incomplete without a judge call. Backend errors
// propagate so the caller can mark the run unevaluated.
JudgeVerdict llm_judge(std::string_view query, std::string_view prediction,
                       std::string_view gold, backends::LlmBackend& llm,
                       backends::TokenUsage* spent = nullptr);

struct EvalConfig {
  double faithfulness_tau = 0.7;
};

struct EvalBackends {
  backends::TokenEmbedder* token_embedder = nullptr;
  backends::EmbeddingBackend* sentence_embedder = nullptr;
  backends::LlmBackend* judge = nullptr;
};

struct MetricReport {
  std::string query_id;
  ParadigmKind paradigm = ParadigmKind::llm_only;
  std::string query_type;
  F1Score semantic_f1;
  double coverage = 0.0;
  std::optional<Faithfulness> faith;
  // Unset when the run failed or the judge backend gave up.
  std::optional<JudgeVerdict> judge;
  std::int64_t total_tokens = 0;  // run ledger total
  std::string note;
};

MetricReport evaluate_run(const paradigms::ParadigmRun& run, std::string_view gold,
                          std::string_view query_type, const EvalBackends& backends,
                          const EvalConfig& config = {});

struct AggregateRow {
  std::string dataset;
  ParadigmKind paradigm = ParadigmKind::llm_only;
  std::string query_type;
  std::size_t runs = 0;
  double semantic_f1 = 0.0;
  double coverage = 0.0;
  std::optional<double> faith_hard;
  std::optional<double> faith_soft;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t incomplete = 0;
  std::size_t unevaluated = 0;
  double avg_total_tokens = 0.0;
  // correct / (runs - unevaluated) * 100; 0 when nothing was judged.
  double correct_pct = 0.0;
};

// One row per (dataset, paradigm, query type) plus an "all" query-type row
// per (dataset, paradigm).
std::vector<AggregateRow> aggregate(const std::vector<MetricReport>& reports,
                                    const std::string& dataset);

nlohmann::json to_json(const MetricReport& r);
MetricReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AggregateRow& r);
AggregateRow aggregate_row_from_json(const nlohmann::json& j);

}  // namespace ragbench::evalkit
