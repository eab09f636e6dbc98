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
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ragbench/backends.hpp"
#include "ragbench/corpus.hpp"
#include "ragbench/errors.hpp"
#include "ragbench/vindex.hpp"

namespace ragbench::kgraph {

struct Triplet {
  std::string subject;
  std::string relation;
  std::string object;
  std::string source_chunk_id;
  std::vector<std::string> source_sentences;
};

class ExtractionSkipped : public DataError {
 public:
  ExtractionSkipped(const std::string& chunk_id, int attempts);
};

struct ExtractionConfig {
  int max_attempts = 3;
  double temperature = 0.0;
  int max_output_tokens = 1000;
};

// Parses a JSON array of {subject, relation, object}. Text around the array
// (code fences, commentary) is ignored. Elements with an empty subject,
// relation or object are dropped. Returns nullopt when no array parses.
std::optional<std::vector<Triplet>> parse_triplet_reply(std::string_view reply);

// Sentences of `chunk_text` mentioning both endpoints (case-insensitive); the
// whole chunk text when none does.
std::vector<std::string> source_sentences_for(
    std::string_view chunk_text, std::string_view subject, std::string_view object,
    const text::SentenceSplitter& splitter = text::default_sentence_splitter());

// Prompts with the triplet-extraction template and re-asks on unparseable
// output. Token usage of every call is added to `spent`. Throws
// ExtractionSkipped after `max_attempts` unparseable replies; backend errors
// propagate.
std::vector<Triplet> extract_triplets_from_chunk(const corpus::Chunk& chunk,
                                                 backends::LlmBackend& llm,
                                                 backends::TokenUsage& spent,
                                                 const ExtractionConfig& config = {});

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::string relation;
  std::vector<std::string> source_chunk_ids;
  std::vector<std::string> source_sentences;
};

// Undirected multigraph over canonical entity names. Identical
// (subject, relation, object) triplets collapse into one edge whose provenance
// is the union of theirs; distinct relations between the same pair stay
// parallel edges.
class KnowledgeGraph {
 public:
  // Whitespace-trimmed, case-folded entity identity.
  static std::string canonical(std::string_view name);

  std::size_t add_node(std::string_view name);
  // Returns the edge index.
  std::size_t add_triplet(const Triplet& triplet);

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return names_.empty(); }

  const std::string& name(std::size_t id) const { return names_[id]; }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;

  const std::vector<Edge>& edges() const { return edges_; }
  // Simple neighborhood: sorted, unique, no self.
  const std::vector<std::size_t>& neighbors(std::size_t id) const { return adjacency_[id]; }
  // Indices of edges incident to `id` (self-loops included once).
  const std::vector<std::size_t>& incident_edges(std::size_t id) const { return incident_[id]; }

  bool has_entity_index() const { return !entity_index_.empty() || names_.empty(); }
  const vindex::VectorIndex& entity_index() const { return entity_index_; }
  void set_entity_index(vindex::VectorIndex index);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<Edge> edges_;
  std::map<std::tuple<std::size_t, std::string, std::size_t>, std::size_t> edge_ids_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::vector<std::size_t>> incident_;
  vindex::VectorIndex entity_index_;
};

KnowledgeGraph build_graph(const std::vector<Triplet>& triplets);

// Embeds every node name once (batched by the backend) and attaches the
// resulting entity index, keyed by canonical name.
KnowledgeGraph embed_entities(KnowledgeGraph graph, backends::EmbeddingBackend& embedder,
                              backends::TokenUsage* spent = nullptr);

// JSONL: {"subject","relation","object","source_chunk_id","source_sentences"}.
void write_triplets(const std::filesystem::path& path, const std::vector<Triplet>& triplets);
std::vector<Triplet> read_triplets(const std::filesystem::path& path);

}  // namespace ragbench::kgraph
