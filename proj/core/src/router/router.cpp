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

#include "ragbench/router.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace ragbench::router {

double utility(const ParadigmProfile& p, const UtilityConfig& cfg) {
  return p.quality - cfg.lambda_cost * p.avg_total_tokens;
}

ParadigmKind select_paradigm(std::span<const ParadigmProfile> profiles, const UtilityConfig& cfg) {
  if (profiles.empty()) throw EmptyProfileSet();
  if (!std::isfinite(cfg.lambda_cost) || cfg.lambda_cost < 0.0) {
    throw std::invalid_argument("router: lambda must be finite and >= 0");
  }
  const ParadigmProfile* best = nullptr;
  double best_u = 0.0;
  for (const ParadigmProfile& p : profiles) {
    if (!(p.quality >= 0.0 && p.quality <= 1.0) || !(p.avg_total_tokens >= 0.0)) {
      throw std::invalid_argument("router: quality must lie in [0, 1] and tokens be >= 0");
    }
    const double u = utility(p, cfg);
    bool better = best == nullptr || u > best_u;
    if (!better && u == best_u) {
      better = p.avg_total_tokens < best->avg_total_tokens ||
               (p.avg_total_tokens == best->avg_total_tokens && p.paradigm < best->paradigm);
    }
    if (better) {
      best = &p;
      best_u = u;
    }
  }
  return best->paradigm;
}

std::vector<RouteDecision> route(const std::vector<evalkit::AggregateRow>& rows,
                                 const UtilityConfig& cfg) {
  std::map<std::pair<std::string, std::string>, std::vector<ParadigmProfile>> groups;
  for (const auto& r : rows) {
    groups[{r.dataset, r.query_type}].push_back(
        {r.paradigm, r.correct_pct / 100.0, r.avg_total_tokens});
  }
  std::vector<RouteDecision> out;
  for (auto& [key, profiles] : groups) {
    RouteDecision d;
    d.dataset = key.first;
    d.query_type = key.second;
    d.selected = select_paradigm(profiles, cfg);
    for (const auto& p : profiles) {
      if (p.paradigm == d.selected) d.utility = utility(p, cfg);
    }
    d.candidates = std::move(profiles);
    out.push_back(std::move(d));
  }
  return out;
}

nlohmann::json to_json(const RouteDecision& d) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& p : d.candidates) {
    cands.push_back({{"paradigm", std::string(to_string(p.paradigm))},
                     {"quality", p.quality},
                     {"avg_total_tokens", p.avg_total_tokens}});
  }
  return {{"dataset", d.dataset},
          {"query_type", d.query_type},
          {"selected", std::string(to_string(d.selected))},
          {"utility", d.utility},
          {"candidates", cands}};
}

}  // namespace ragbench::router
