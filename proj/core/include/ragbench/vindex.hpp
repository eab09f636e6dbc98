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
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ragbench/backends.hpp"
#include "ragbench/errors.hpp"

namespace ragbench::vindex {

using backends::EmbeddingVector;

class DuplicateKey : public DataError {
 public:
  explicit DuplicateKey(const std::string& key) : DataError("duplicate index key: " + key) {}
};

class EmptyIndex : public DataError {
 public:
  EmptyIndex() : DataError("vector index is empty") {}
};

struct SearchHit {
  std::string key;
  double score = 0.0;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Exact inner-product index over unit-norm rows (cosine similarity).
// Immutable after construction; concurrent reads are safe.
class VectorIndex {
 public:
  VectorIndex() = default;

  // Rows are re-normalized. Throws DimensionMismatch and DuplicateKey.
  static VectorIndex build(const std::vector<std::pair<std::string, EmbeddingVector>>& items);

  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  std::size_t dimension() const { return dimension_; }
  const std::vector<std::string>& keys() const { return keys_; }
  std::span<const float> row(std::size_t i) const {
    return {matrix_.data() + i * dimension_, dimension_};
  }
  EmbeddingVector vector(std::size_t i) const;
  // Position of `key`, or size() when absent.
  std::size_t find(const std::string& key) const;

  // Best `k` rows by cosine, descending; ties by ascending key. Scores below
  // `min_score` are dropped. Throws EmptyIndex, DimensionMismatch.
  std::vector<SearchHit> top_k(const EmbeddingVector& query, std::size_t k,
                               double min_score = -std::numeric_limits<double>::infinity()) const;

  // Binary format: "RBVX", u32 version, u32 dimension, u64 count; then per row
  // u32 key length, key bytes, dimension little-endian float32 values.
  void save(const std::filesystem::path& path) const;
  static VectorIndex load(const std::filesystem::path& path);

  friend bool operator==(const VectorIndex&, const VectorIndex&) = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<std::string> keys_;
  std::vector<float> matrix_;
  std::unordered_map<std::string, std::size_t> positions_;
};

}  // namespace ragbench::vindex
