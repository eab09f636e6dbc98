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

#include "ragbench/kgraph.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace ragbench::kgraph {
namespace {

using json = nlohmann::json;

void insert_sorted(std::vector<std::size_t>& v, std::size_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

void append_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace

ExtractionSkipped::ExtractionSkipped(const std::string& chunk_id, int attempts)
    : DataError("triplet extraction skipped for chunk " + chunk_id + " after " +
                std::to_string(attempts) + " unparseable replies") {}

std::optional<std::vector<Triplet>> parse_triplet_reply(std::string_view reply) {
  const auto b = reply.find('[');
  const auto e = reply.rfind(']');
  if (b == std::string_view::npos || e == std::string_view::npos || e < b) return std::nullopt;
  json arr = json::parse(reply.substr(b, e - b + 1), nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) return std::nullopt;
  std::vector<Triplet> out;
  for (const json& item : arr) {
    if (!item.is_object()) continue;
    auto field = [&](const char* k) -> std::string {
      auto it = item.find(k);
      return (it != item.end() && it->is_string()) ? text::trim(it->get<std::string>())
                                                   : std::string();
    };
    Triplet t;
    t.subject = field("subject");
    t.relation = field("relation");
    t.object = field("object");
    if (t.subject.empty() || t.object.empty() || t.relation.empty()) continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> source_sentences_for(std::string_view chunk_text,
                                              std::string_view subject,
                                              std::string_view object,
                                              const text::SentenceSplitter& splitter) {
  std::vector<std::string> out;
  for (std::string& s : splitter.split(chunk_text)) {
    if (text::contains_folded(s, subject) && text::contains_folded(s, object)) {
      out.push_back(std::move(s));
    }
  }
  if (out.empty()) out.push_back(text::trim(chunk_text));
  return out;
}

std::vector<Triplet> extract_triplets_from_chunk(const corpus::Chunk& chunk,
                                                 backends::LlmBackend& llm,
                                                 backends::TokenUsage& spent,
                                                 const ExtractionConfig& config) {
  if (text::trim(chunk.text).empty()) {
    throw std::invalid_argument("extract_triplets_from_chunk: empty chunk");
  }
  backends::ChatRequest req;
  req.kind = prompts::PromptKind::triplet_extraction;
  req.prompt = prompts::triplet_extraction(chunk.text);
  req.temperature = config.temperature;
  req.max_output_tokens = config.max_output_tokens;

  const int attempts = std::max(1, config.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    backends::ChatResponse res = llm.complete(req);
    spent += res.usage;
    auto parsed = parse_triplet_reply(res.text);
    if (!parsed) {
      spdlog::debug("chunk {}: unparseable extraction reply (attempt {}/{})", chunk.chunk_id,
                    attempt, attempts);
      continue;
    }
    for (Triplet& t : *parsed) {
      t.source_chunk_id = chunk.chunk_id;
      t.source_sentences = source_sentences_for(chunk.text, t.subject, t.object);
    }
    return std::move(*parsed);
  }
  throw ExtractionSkipped(chunk.chunk_id, attempts);
}

std::string KnowledgeGraph::canonical(std::string_view name) {
  return text::casefold(text::trim(name));
}

std::size_t KnowledgeGraph::add_node(std::string_view name) {
  std::string key = canonical(name);
  if (key.empty()) throw std::invalid_argument("knowledge graph: empty entity name");
  auto [it, inserted] = ids_.emplace(key, names_.size());
  if (inserted) {
    names_.push_back(std::move(key));
    adjacency_.emplace_back();
    incident_.emplace_back();
  }
  return it->second;
}

std::size_t KnowledgeGraph::add_triplet(const Triplet& t) {
  const std::size_t u = add_node(t.subject);
  const std::size_t v = add_node(t.object);
  const std::string relation = text::trim(t.relation);
  auto key = std::make_tuple(u, relation, v);
  auto it = edge_ids_.find(key);
  std::size_t id;
  if (it == edge_ids_.end()) {
    id = edges_.size();
    edge_ids_.emplace(std::move(key), id);
    edges_.push_back(Edge{u, v, relation, {}, {}});
    if (u != v) {
      insert_sorted(adjacency_[u], v);
      insert_sorted(adjacency_[v], u);
      incident_[v].push_back(id);
    }
    incident_[u].push_back(id);
  } else {
    id = it->second;
  }
  Edge& e = edges_[id];
  if (!t.source_chunk_id.empty()) append_unique(e.source_chunk_ids, t.source_chunk_id);
  for (const auto& s : t.source_sentences) append_unique(e.source_sentences, s);
  return id;
}

std::optional<std::size_t> KnowledgeGraph::find(std::string_view name) const {
  auto it = ids_.find(canonical(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void KnowledgeGraph::set_entity_index(vindex::VectorIndex index) {
  for (const auto& n : names_) {
    if (index.find(n) == index.size()) {
      throw DataError("entity index lacks an embedding for entity: " + n);
    }
  }
  entity_index_ = std::move(index);
}

KnowledgeGraph build_graph(const std::vector<Triplet>& triplets) {
  KnowledgeGraph g;
  for (const Triplet& t : triplets) g.add_triplet(t);
  return g;
}

KnowledgeGraph embed_entities(KnowledgeGraph graph, backends::EmbeddingBackend& embedder,
                              backends::TokenUsage* spent) {
  if (graph.empty()) return graph;
  backends::EmbeddingBatch batch = embedder.embed(graph.names());
  if (spent) *spent += batch.usage;
  std::vector<std::pair<std::string, backends::EmbeddingVector>> items;
  items.reserve(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    items.emplace_back(graph.name(i), std::move(batch.vectors[i]));
  }
  graph.set_entity_index(vindex::VectorIndex::build(items));
  return graph;
}

void write_triplets(const std::filesystem::path& path, const std::vector<Triplet>& triplets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write triplet file: " + path.string());
  for (const Triplet& t : triplets) {
    json j = {{"subject", t.subject},
              {"relation", t.relation},
              {"object", t.object},
              {"source_chunk_id", t.source_chunk_id},
              {"source_sentences", t.source_sentences}};
    out << j.dump() << '\n';
  }
}

std::vector<Triplet> read_triplets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open triplet file: " + path.string());
  std::vector<Triplet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw corpus::ParseError(lineno, "invalid triplet");
    try {
      Triplet t;
      t.subject = j.at("subject").get<std::string>();
      t.relation = j.at("relation").get<std::string>();
      t.object = j.at("object").get<std::string>();
      t.source_chunk_id = j.value("source_chunk_id", std::string());
      t.source_sentences = j.value("source_sentences", std::vector<std::string>{});
      out.push_back(std::move(t));
    } catch (const json::exception& e) {
      throw corpus::ParseError(lineno, e.what());
    }
  }
  return out;
}

}  // namespace ragbench::kgraph
