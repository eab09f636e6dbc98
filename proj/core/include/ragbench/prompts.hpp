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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ragbench::prompts {

enum class PromptKind {
  triplet_extraction,
  entity_extraction,
  direct_generation,
  context_generation,
  iterative_eval,
  judge,
  querygen_factual,
  querygen_reasoning,
  querygen_summary,
};

std::string_view to_string(PromptKind kind);
std::optional<PromptKind> prompt_kind_from_string(std::string_view name);

// Marker substituted for an empty context block.
inline constexpr std::string_view kNoContext = "No relevant context was found.";

// Every template wraps its variable inputs in labelled blocks:
//
//   <<<Label
//   ...content...
//   >>>
//
// so mock backends and logs can recover the inputs with `section()`.
std::optional<std::string> section(std::string_view prompt, std::string_view label);

std::string triplet_extraction(std::string_view chunk_text);
std::string entity_extraction(std::string_view question);
std::string direct_generation(std::string_view question);
std::string context_generation(std::string_view context, std::string_view question);
// `context` empty means the round had no retrieval; kNoContext is shown.
std::string iterative_eval(std::string_view question, std::string_view answer,
                           std::string_view context);
std::string judge(std::string_view question, std::string_view prediction,
                  std::string_view gold);
std::string querygen_factual(std::string_view chunk_text);
std::string querygen_reasoning(const std::vector<std::string>& documents, int hops);
std::string querygen_summary(std::string_view entity,
                             const std::vector<std::string>& documents);

}  // namespace ragbench::prompts
