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

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"
#include "ragbench/paradigm_kind.hpp"

namespace ragbench::costs {

enum class Phase { retrieval, generation };

struct CostLedgerEntry {
  std::int64_t ret_in = 0;
  std::int64_t ret_out = 0;
  std::int64_t gen_in = 0;
  std::int64_t gen_out = 0;
  std::int64_t context_tokens = 0;

  std::int64_t retrieval() const { return ret_in + ret_out; }
  std::int64_t generation() const { return gen_in + gen_out; }
  std::int64_t total() const { return retrieval() + generation(); }

  friend bool operator==(const CostLedgerEntry&, const CostLedgerEntry&) = default;
};

void record_usage(CostLedgerEntry& entry, Phase phase, const backends::TokenUsage& usage);

// One-time knowledge-graph construction spend.
struct ConstructionCost {
  std::int64_t corpus_tokens_in = 0;
  std::int64_t triplet_tokens_out = 0;
  std::int64_t embedding_tokens = 0;

  std::int64_t total() const { return corpus_tokens_in + triplet_tokens_out + embedding_tokens; }
};

struct RunCost {
  ParadigmKind paradigm = ParadigmKind::llm_only;
  CostLedgerEntry ledger;
};

struct CostRow {
  std::string dataset;
  ParadigmKind method = ParadigmKind::llm_only;
  std::size_t n = 0;
  double avg_ctx = 0.0;
  std::int64_t ret_in = 0;
  std::int64_t ret_out = 0;
  std::int64_t gen_in = 0;
  std::int64_t gen_out = 0;
  // ret_in + ret_out + gen_in + gen_out.
  std::int64_t total = 0;
  // Per-query construction share times n; zero for graph-free paradigms.
  double amortized_construction = 0.0;
  double total_with_construction = 0.0;
};

struct CostReport {
  std::vector<CostRow> rows;  // paradigm enum order
  ConstructionCost construction;
  std::size_t query_count = 0;
  double construction_per_query = 0.0;
  double grand_total = 0.0;  // every row's total_with_construction
};

// Throws std::invalid_argument when query_count is 0.
CostReport summarize_costs(const std::vector<RunCost>& runs, const ConstructionCost& construction,
                           std::size_t query_count, const std::string& dataset = "");

nlohmann::json to_json(const CostLedgerEntry& e);
CostLedgerEntry ledger_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ConstructionCost& c);
ConstructionCost construction_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CostReport& r);

}  // namespace ragbench::costs
