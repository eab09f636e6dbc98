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
#include <string>
#include <vector>

#include "ragbench/errors.hpp"
#include "ragbench/text.hpp"

namespace ragbench::corpus {

struct Document {
  std::string id;
  std::string title;
  std::string body;

  // Title and body joined by a single newline; the body alone when the title
  // is empty.
  std::string full_text() const;
};

struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  std::string text;
  std::size_t token_count = 0;
  std::size_t start_offset = 0;
};

struct ChunkingConfig {
  std::size_t size = 512;
  std::size_t overlap = 100;
  // Drops a final window lying entirely inside its predecessor.
  bool drop_redundant_tail = false;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public DataError {
 public:
  explicit DuplicateId(const std::string& id);
};

class EmptyDocument : public DataError {
 public:
  explicit EmptyDocument(const std::string& id);
};

// JSONL with one {"id", "title", "text"} object per line; blank lines are
// skipped. Line numbers in errors are 1-based.
std::vector<Document> load_corpus(const std::filesystem::path& path);
std::vector<Document> parse_corpus(const std::string& jsonl);

// Sliding windows at 0, L-O, 2(L-O), ... while the start is inside the
// document. Chunk ids are "<doc_id>#<window index>".
std::vector<Chunk> chunk_document(const Document& doc, const ChunkingConfig& config,
                                  const text::Tokenizer& tokenizer = text::default_tokenizer());

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkingConfig& config,
                                const text::Tokenizer& tokenizer = text::default_tokenizer());

void write_chunks(const std::filesystem::path& path, const std::vector<Chunk>& chunks);
std::vector<Chunk> read_chunks(const std::filesystem::path& path);

}  // namespace ragbench::corpus
