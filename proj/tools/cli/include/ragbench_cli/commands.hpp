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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragbench/costs.hpp"
#include "ragbench/errors.hpp"
#include "ragbench_cli/config.hpp"

namespace ragbench::cli {

// Artifact names under the output directory.
namespace files {
inline constexpr const char* chunks = "chunks.jsonl";
inline constexpr const char* triplets = "triplets.jsonl";
inline constexpr const char* graph = "graph.json";
inline constexpr const char* chunk_index = "chunks.vidx";
inline constexpr const char* entity_index = "entities.vidx";
inline constexpr const char* construction = "construction.json";
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* runs = "runs.jsonl";
inline constexpr const char* metrics = "metrics.jsonl";
inline constexpr const char* aggregate = "aggregate.json";
inline constexpr const char* costs = "costs.json";
inline constexpr const char* routes = "routes.json";
inline constexpr const char* fingerprint = "fingerprint.json";
}  // namespace files

// 0 ok, 1 config, 2 data, 3 backend.
int exit_code_for(const std::exception& e);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct IngestResult {
  bool skipped = false;  // inputs and outputs matched the manifest
  std::size_t chunks = 0;
  std::size_t triplets = 0;
  std::size_t skipped_chunks = 0;  // extraction gave up on these
  std::size_t nodes = 0;
  std::size_t edges = 0;
  costs::ConstructionCost construction;
  backends::TokenUsage chunk_embedding;
  std::map<std::string, std::string> artifact_hashes;
};

// Phases: 1 load and chunk, 2 triplet extraction, 3 graph construction,
// 4 chunk index, 5 entity embeddings. A failure is rethrown with the phase
// named and its error class kept.
IngestResult cmd_ingest(const ExperimentConfig& cfg);

// Artifacts of a finished ingest, loaded for querying.
struct Artifacts {
  std::vector<corpus::Chunk> chunks;
  vindex::VectorIndex chunk_index;
  kgraph::KnowledgeGraph graph;
  costs::ConstructionCost construction;
};
Artifacts load_artifacts(const std::filesystem::path& dir);

nlohmann::json cmd_fingerprint(const ExperimentConfig& cfg);

struct QuerygenResult {
  std::map<std::string, std::size_t> generated;  // per query type
  std::map<std::string, std::size_t> passed;
  std::size_t written = 0;
};
// Writes every record, validated or not; `only_passed` drops the rest.
QuerygenResult cmd_querygen(const ExperimentConfig& cfg, const std::filesystem::path& out,
                            bool only_passed = false);

struct RunResult {
  std::size_t planned = 0;
  std::size_t resumed = 0;  // pairs already on disk
  std::size_t executed = 0;
  std::size_t failed = 0;
};
// Executes every pending (query, paradigm) pair; `limit` stops after that many
// new lines (simulated interruption in tests).
RunResult cmd_run(const ExperimentConfig& cfg, std::optional<std::size_t> limit = std::nullopt);

struct EvaluateResult {
  std::size_t reports = 0;
  std::vector<evalkit::AggregateRow> rows;
};
EvaluateResult cmd_evaluate(const ExperimentConfig& cfg);

costs::CostReport cmd_costs(const ExperimentConfig& cfg);

std::vector<router::RouteDecision> cmd_route(const ExperimentConfig& cfg,
                                             const std::filesystem::path& aggregate_path);

std::vector<paradigms::ParadigmRun> read_runs(const std::filesystem::path& path);

}  // namespace ragbench::cli
