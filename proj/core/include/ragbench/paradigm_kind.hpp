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

#include <array>
#include <optional>
#include <string_view>

namespace ragbench {

// Enum order doubles as the router's final tie-break.
enum class ParadigmKind { llm_only, naive, graph, hybrid, iterative_naive, iterative_graph };

inline constexpr std::array<ParadigmKind, 6> kAllParadigms = {
    ParadigmKind::llm_only, ParadigmKind::naive,           ParadigmKind::graph,
    ParadigmKind::hybrid,   ParadigmKind::iterative_naive, ParadigmKind::iterative_graph};

std::string_view to_string(ParadigmKind kind);
// Accepts the enum names plus "iterative" (graph base).
std::optional<ParadigmKind> paradigm_from_string(std::string_view name);

// Paradigms whose retrieval depends on the knowledge graph.
constexpr bool uses_graph(ParadigmKind k) {
  return k == ParadigmKind::graph || k == ParadigmKind::hybrid ||
         k == ParadigmKind::iterative_graph;
}

constexpr bool is_iterative(ParadigmKind k) {
  return k == ParadigmKind::iterative_naive || k == ParadigmKind::iterative_graph;
}

}  // namespace ragbench
