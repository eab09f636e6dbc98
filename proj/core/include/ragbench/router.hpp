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

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/errors.hpp"
#include "ragbench/evalkit.hpp"
#include "ragbench/paradigm_kind.hpp"

namespace ragbench::router {

class EmptyProfileSet : public DataError {
 public:
  EmptyProfileSet() : DataError("no paradigm profiles to route over") {}
};

struct ParadigmProfile {
  ParadigmKind paradigm = ParadigmKind::llm_only;
  double quality = 0.0;  // [0, 1]
  double avg_total_tokens = 0.0;
};

struct UtilityConfig {
  double lambda_cost = 0.0;  // utility lost per token
};

// quality - lambda * tokens
double utility(const ParadigmProfile& p, const UtilityConfig& cfg);

// Highest utility; ties go to fewer tokens, then enum order. Throws
// EmptyProfileSet, and std::invalid_argument on out-of-range profiles.
ParadigmKind select_paradigm(std::span<const ParadigmProfile> profiles,
                             const UtilityConfig& cfg);

struct RouteDecision {
  std::string dataset;
  std::string query_type;
  ParadigmKind selected = ParadigmKind::llm_only;
  double utility = 0.0;
  std::vector<ParadigmProfile> candidates;
};

// Groups aggregate rows by (dataset, query type). Quality is the judge-correct
// share; cost is the average ledger total per run.
std::vector<RouteDecision> route(const std::vector<evalkit::AggregateRow>& rows,
                                 const UtilityConfig& cfg);

nlohmann::json to_json(const RouteDecision& d);

}  // namespace ragbench::router
