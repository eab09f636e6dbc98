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

#include "ragbench/costs.hpp"

#include <stdexcept>

namespace ragbench {

std::string_view to_string(ParadigmKind kind) {
  switch (kind) {
    case ParadigmKind::llm_only: return "llm_only";
    case ParadigmKind::naive: return "naive";
    case ParadigmKind::graph: return "graph";
    case ParadigmKind::hybrid: return "hybrid";
    case ParadigmKind::iterative_naive: return "iterative_naive";
    case ParadigmKind::iterative_graph: return "iterative_graph";
  }
  return "unknown";
}

std::optional<ParadigmKind> paradigm_from_string(std::string_view name) {
  for (ParadigmKind k : kAllParadigms) {
    if (to_string(k) == name) return k;
  }
  if (name == "iterative") return ParadigmKind::iterative_graph;
  return std::nullopt;
}

namespace costs {

void record_usage(CostLedgerEntry& entry, Phase phase, const backends::TokenUsage& usage) {
  if (phase == Phase::retrieval) {
    entry.ret_in += usage.input_tokens;
    entry.ret_out += usage.output_tokens;
  } else {
    entry.gen_in += usage.input_tokens;
    entry.gen_out += usage.output_tokens;
  }
}

CostReport summarize_costs(const std::vector<RunCost>& runs, const ConstructionCost& construction,
                           std::size_t query_count, const std::string& dataset) {
  if (query_count == 0) throw std::invalid_argument("summarize_costs: query count must be >= 1");
  CostReport report;
  report.construction = construction;
  report.query_count = query_count;
  report.construction_per_query =
      static_cast<double>(construction.total()) / static_cast<double>(query_count);

  std::map<ParadigmKind, CostRow> rows;
  std::map<ParadigmKind, std::int64_t> ctx;
  for (const RunCost& r : runs) {
    CostRow& row = rows[r.paradigm];
    row.method = r.paradigm;
    row.dataset = dataset;
    ++row.n;
    row.ret_in += r.ledger.ret_in;
    row.ret_out += r.ledger.ret_out;
    row.gen_in += r.ledger.gen_in;
    row.gen_out += r.ledger.gen_out;
    ctx[r.paradigm] += r.ledger.context_tokens;
  }
  for (auto& [kind, row] : rows) {
    row.avg_ctx = static_cast<double>(ctx[kind]) / static_cast<double>(row.n);
    row.total = row.ret_in + row.ret_out + row.gen_in + row.gen_out;
    if (uses_graph(kind)) {
      row.amortized_construction = report.construction_per_query * static_cast<double>(row.n);
    }
    row.total_with_construction = static_cast<double>(row.total) + row.amortized_construction;
    report.grand_total += row.total_with_construction;
    report.rows.push_back(row);
  }
  return report;
}

nlohmann::json to_json(const CostLedgerEntry& e) {
  return {{"ret_in", e.ret_in},   {"ret_out", e.ret_out}, {"gen_in", e.gen_in},
          {"gen_out", e.gen_out}, {"total", e.total()},   {"context_tokens", e.context_tokens}};
}

CostLedgerEntry ledger_from_json(const nlohmann::json& j) {
  CostLedgerEntry e;
  e.ret_in = j.value("ret_in", std::int64_t{0});
  e.ret_out = j.value("ret_out", std::int64_t{0});
  e.gen_in = j.value("gen_in", std::int64_t{0});
  e.gen_out = j.value("gen_out", std::int64_t{0});
  e.context_tokens = j.value("context_tokens", std::int64_t{0});
  return e;
}

nlohmann::json to_json(const ConstructionCost& c) {
  return {{"corpus_tokens_in", c.corpus_tokens_in},
          {"triplet_tokens_out", c.triplet_tokens_out},
          {"embedding_tokens", c.embedding_tokens},
          {"total", c.total()}};
}

ConstructionCost construction_from_json(const nlohmann::json& j) {
  ConstructionCost c;
  c.corpus_tokens_in = j.value("corpus_tokens_in", std::int64_t{0});
  c.triplet_tokens_out = j.value("triplet_tokens_out", std::int64_t{0});
  c.embedding_tokens = j.value("embedding_tokens", std::int64_t{0});
  return c;
}

nlohmann::json to_json(const CostReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const CostRow& row : r.rows) {
    rows.push_back({{"dataset", row.dataset},
                    {"method", std::string(to_string(row.method))},
                    {"n", row.n},
                    {"avg_ctx", row.avg_ctx},
                    {"ret_in", row.ret_in},
                    {"ret_out", row.ret_out},
                    {"gen_in", row.gen_in},
                    {"gen_out", row.gen_out},
                    {"total", row.total},
                    {"amortized_construction", row.amortized_construction},
                    {"total_with_construction", row.total_with_construction}});
  }
  return {{"rows", rows},
          {"construction", to_json(r.construction)},
          {"query_count", r.query_count},
          {"construction_per_query", r.construction_per_query},
          {"grand_total", r.grand_total}};
}

}  // namespace costs
}  // namespace ragbench
