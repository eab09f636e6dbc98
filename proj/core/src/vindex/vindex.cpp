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

#include "ragbench/vindex.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

namespace ragbench::vindex {
namespace {

constexpr char kMagic[4] = {'R', 'B', 'V', 'X'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DataError("vector index file truncated");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

VectorIndex VectorIndex::build(
    const std::vector<std::pair<std::string, EmbeddingVector>>& items) {
  VectorIndex idx;
  if (items.empty()) return idx;
  idx.dimension_ = items.front().second.dimension();
  idx.keys_.reserve(items.size());
  idx.matrix_.reserve(items.size() * idx.dimension_);
  for (const auto& [key, vec] : items) {
    if (vec.dimension() != idx.dimension_) {
      throw backends::DimensionMismatch(idx.dimension_, vec.dimension());
    }
    if (!idx.positions_.emplace(key, idx.keys_.size()).second) throw DuplicateKey(key);
    EmbeddingVector unit = vec;
    unit.normalize();
    idx.keys_.push_back(key);
    idx.matrix_.insert(idx.matrix_.end(), unit.values.begin(), unit.values.end());
  }
  return idx;
}

EmbeddingVector VectorIndex::vector(std::size_t i) const {
  auto r = row(i);
  return EmbeddingVector{std::vector<float>(r.begin(), r.end())};
}

std::size_t VectorIndex::find(const std::string& key) const {
  auto it = positions_.find(key);
  return it == positions_.end() ? size() : it->second;
}

std::vector<SearchHit> VectorIndex::top_k(const EmbeddingVector& query, std::size_t k,
                                          double min_score) const {
  if (empty()) throw EmptyIndex();
  if (query.dimension() != dimension_) {
    throw backends::DimensionMismatch(dimension_, query.dimension());
  }
  const double qn = query.norm();
  const float* q = query.values.data();
  // Score by row position and copy keys only for the survivors.
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const float* r = matrix_.data() + i * dimension_;
    // Four partial sums break the add dependency chain.
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t d = 0;
    for (; d + 4 <= dimension_; d += 4) {
      for (std::size_t j = 0; j < 4; ++j) acc[j] += static_cast<double>(r[d + j]) * q[d + j];
    }
    for (; d < dimension_; ++d) acc[0] += static_cast<double>(r[d]) * q[d];
    double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    if (qn > 0.0) s /= qn;
    if (s < min_score) continue;
    scored.emplace_back(s, i);
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [this](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return keys_[a.second] < keys_[b.second];
                    });
  std::vector<SearchHit> hits;
  hits.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) hits.push_back({keys_[scored[i].second], scored[i].first});
  return hits;
}

void VectorIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write vector index: " + path.string());
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(size()));
  for (std::size_t i = 0; i < size(); ++i) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(keys_[i].size()));
    out.write(keys_[i].data(), static_cast<std::streamsize>(keys_[i].size()));
    for (float v : row(i)) put_le<float>(out, v);
  }
  if (!out) throw DataError("failed writing vector index: " + path.string());
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vector index: " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a vector index file: " + path.string());
  }
  if (get_le<std::uint32_t>(in) != kVersion) throw DataError("unsupported vector index version");
  VectorIndex idx;
  idx.dimension_ = get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  idx.keys_.reserve(count);
  idx.matrix_.reserve(count * idx.dimension_);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = get_le<std::uint32_t>(in);
    std::string key(len, '\0');
    if (!in.read(key.data(), len)) throw DataError("vector index file truncated");
    if (!idx.positions_.emplace(key, idx.keys_.size()).second) throw DuplicateKey(key);
    idx.keys_.push_back(std::move(key));
    for (std::size_t d = 0; d < idx.dimension_; ++d) idx.matrix_.push_back(get_le<float>(in));
  }
  return idx;
}

}  // namespace ragbench::vindex
