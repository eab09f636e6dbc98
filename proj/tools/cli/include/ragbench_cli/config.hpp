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
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"
#include "ragbench/corpus.hpp"
#include "ragbench/evalkit.hpp"
#include "ragbench/kgraph.hpp"
#include "ragbench/paradigms.hpp"
#include "ragbench/querygen.hpp"
#include "ragbench/router.hpp"

namespace ragbench::cli {

// kind: "rule" | "remote" for chat models; "hashing" | "onehot" | "remote"
// for embedders.
struct BackendSpec {
  std::string kind;
  std::filesystem::path rules;  // rule mocks only
  std::size_t dimension = 0;
  std::size_t batch_size = 30;
  backends::RemoteConfig remote;
};

struct ExperimentConfig {
  std::filesystem::path corpus;
  std::filesystem::path queries;
  std::filesystem::path output_dir;
  std::string dataset = "default";
  std::uint64_t seed = 42;
  std::size_t workers = 4;

  BackendSpec llm;
  BackendSpec judge;
  BackendSpec embedding;
  BackendSpec token_embedding;

  corpus::ChunkingConfig chunking;
  kgraph::ExtractionConfig extraction;
  paradigms::ParadigmConfig paradigm;
  std::vector<ParadigmKind> paradigms;

  querygen::QuerygenConfig querygen;
  std::map<querygen::QueryType, std::size_t> query_counts;
  bool validate_queries = true;
  querygen::ValidationConfig validation;

  evalkit::EvalConfig evaluation;
  router::UtilityConfig utility;

  // The effective configuration, defaults filled in; hashed by ingest.
  nlohmann::json resolved;
};

// Every default, as it appears in configs/default.json.
nlohmann::json default_config_json();

// Applies "a.b.c=value" overrides; the value is parsed as JSON when it can be,
// otherwise taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Merges `j` over the defaults, resolves relative paths against `base_dir`
// and validates ranges. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

std::unique_ptr<backends::LlmBackend> make_llm(const BackendSpec& spec);
std::unique_ptr<backends::EmbeddingBackend> make_embedder(const BackendSpec& spec);
std::unique_ptr<backends::TokenEmbedder> make_token_embedder(const BackendSpec& spec);

// Rule file: {"default_response": "...", "rules": [{"kind", "section",
// "all_of", "none_of", "response" | "responder"}]}.
std::unique_ptr<backends::RuleLlm> load_rule_llm(const std::filesystem::path& path);

}  // namespace ragbench::cli
