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

#include "ragbench/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace ragbench::corpus {
namespace {

using json = nlohmann::json;

std::string required_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw ParseError(line, std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace

std::string Document::full_text() const {
  if (title.empty()) return body;
  if (body.empty()) return title;
  return title + "\n" + body;
}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : DataError("parse error at line " + std::to_string(line) + ": " + reason), line_(line) {}

DuplicateId::DuplicateId(const std::string& id) : DataError("duplicate document id: " + id) {}

EmptyDocument::EmptyDocument(const std::string& id)
    : DataError("document has no tokens: " + id) {}

std::vector<Document> parse_corpus(const std::string& jsonl) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw ParseError(lineno, "invalid JSON object");
    Document d;
    d.id = required_string(obj, "id", lineno);
    d.title = obj.contains("title") && obj["title"].is_string() ? obj["title"].get<std::string>()
                                                                : std::string();
    d.body = required_string(obj, "text", lineno);
    if (d.id.empty()) throw ParseError(lineno, "empty id");
    if (!seen.insert(d.id).second) throw DuplicateId(d.id);
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str());
}

std::vector<Chunk> chunk_document(const Document& doc, const ChunkingConfig& config,
                                  const text::Tokenizer& tokenizer) {
  if (config.size == 0 || config.overlap >= config.size) {
    throw std::invalid_argument("chunking requires 0 <= overlap < size");
  }
  const std::string full = doc.full_text();
  const std::vector<text::TokenSpan> spans = tokenizer.split(full);
  if (spans.empty()) throw EmptyDocument(doc.id);

  const std::size_t stride = config.size - config.overlap;
  std::vector<Chunk> chunks;
  for (std::size_t start = 0; start < spans.size(); start += stride) {
    const std::size_t end = std::min(start + config.size, spans.size());
    if (config.drop_redundant_tail && !chunks.empty()) {
      const Chunk& prev = chunks.back();
      if (end <= prev.start_offset + prev.token_count) break;
    }
    Chunk c;
    c.doc_id = doc.id;
    c.chunk_id = doc.id + "#" + std::to_string(chunks.size());
    c.start_offset = start;
    c.token_count = end - start;
    c.text = std::string(text::Tokenizer::decode(full, spans, start, end));
    chunks.push_back(std::move(c));
  }
  return chunks;
}

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkingConfig& config,
                                const text::Tokenizer& tokenizer) {
  std::vector<Chunk> all;
  for (const Document& d : docs) {
    auto chunks = chunk_document(d, config, tokenizer);
    all.insert(all.end(), std::make_move_iterator(chunks.begin()),
               std::make_move_iterator(chunks.end()));
  }
  return all;
}

void write_chunks(const std::filesystem::path& path, const std::vector<Chunk>& chunks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write chunk store: " + path.string());
  for (const Chunk& c : chunks) {
    json j = {{"chunk_id", c.chunk_id},
              {"doc_id", c.doc_id},
              {"start_offset", c.start_offset},
              {"token_count", c.token_count},
              {"text", c.text}};
    out << j.dump() << '\n';
  }
}

std::vector<Chunk> read_chunks(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open chunk store: " + path.string());
  std::vector<Chunk> chunks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(lineno, "invalid chunk record");
    try {
      Chunk c;
      c.chunk_id = j.at("chunk_id").get<std::string>();
      c.doc_id = j.at("doc_id").get<std::string>();
      c.start_offset = j.at("start_offset").get<std::size_t>();
      c.token_count = j.at("token_count").get<std::size_t>();
      c.text = j.at("text").get<std::string>();
      chunks.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return chunks;
}

}  // namespace ragbench::corpus
