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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "ragbench/backends.hpp"

namespace ragbench::backends {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",     "an",   "the",  "of",    "in",   "on",    "at",    "to",   "for",
      "by",    "with", "from", "and",   "or",   "but",   "is",    "are",  "was",
      "were",  "be",   "been", "being", "it",   "its",   "this",  "that", "these",
      "those", "as",   "what", "which", "who",  "whom",  "whose", "when", "where",
      "how",   "why",  "did",  "does",  "do",   "has",   "have",  "had",  "he",
      "she",   "they", "his",  "her",   "their", "them", "i",     "you",  "we"};
  return kWords;
}

}  // namespace

void ChatRequest::validate() const {
  if (prompt.empty()) throw std::invalid_argument("chat request: empty prompt");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw std::invalid_argument("chat request: temperature outside [0, 2]");
  }
  if (max_output_tokens < 1) {
    throw std::invalid_argument("chat request: max_output_tokens must be >= 1");
  }
}

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (float v : values) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

void EmbeddingVector::normalize() {
  const double n = norm();
  if (n == 0.0) return;
  for (float& v : values) v = static_cast<float>(v / n);
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch(a.dimension(), b.dimension());
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    s += static_cast<double>(a.values[i]) * b.values[i];
  }
  return s;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

AllRetriesExhausted::AllRetriesExhausted(int attempts, const std::string& last_error)
    : BackendError("all " + std::to_string(attempts) +
                   " attempt(s) failed; last error: " + last_error),
      attempts_(attempts) {}

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual)
    : DataError("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(actual)) {}

EmbeddingBatch EmbeddingBackend::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw std::invalid_argument("embed: empty text list");
  for (const auto& t : texts) {
    if (t.empty()) throw std::invalid_argument("embed: empty text");
  }
  EmbeddingBatch out;
  out.vectors.reserve(texts.size());
  const std::size_t step = std::max<std::size_t>(1, batch_size());
  for (std::size_t b = 0; b < texts.size(); b += step) {
    auto slice = texts.subspan(b, std::min(step, texts.size() - b));
    RawBatch raw = embed_batch(slice);
    if (raw.vectors.size() != slice.size()) {
      throw MalformedResponse("embedding backend returned " +
                              std::to_string(raw.vectors.size()) + " vectors for " +
                              std::to_string(slice.size()) + " inputs");
    }
    for (auto& v : raw.vectors) {
      if (v.dimension() != dimension()) throw DimensionMismatch(dimension(), v.dimension());
      for (float x : v.values) {
        if (!std::isfinite(x)) throw MalformedResponse("non-finite embedding entry");
      }
      v.normalize();
      out.vectors.push_back(std::move(v));
    }
    out.usage += raw.usage;
    ++out.batches;
  }
  return out;
}

EmbeddingVector EmbeddingBackend::embed_one(const std::string& text, TokenUsage* usage) {
  EmbeddingBatch b = embed(std::span<const std::string>(&text, 1));
  if (usage) *usage += b.usage;
  return std::move(b.vectors.front());
}

OneHotEmbedder::OneHotEmbedder(std::size_t dimension, std::size_t batch_size,
                               const text::Tokenizer& tokenizer)
    : dimension_(dimension), batch_size_(batch_size), tokenizer_(tokenizer) {
  if (dimension_ == 0) throw std::invalid_argument("one-hot embedder: zero dimension");
}

std::size_t OneHotEmbedder::vocabulary_size() const {
  std::lock_guard lock(mu_);
  return axes_.size();
}

std::size_t OneHotEmbedder::axis_of(const std::string& text) {
  std::string key = text::normalize_for_match(text);
  if (key.empty()) key = text::trim(text);
  std::lock_guard lock(mu_);
  auto it = axes_.find(key);
  if (it != axes_.end()) return it->second;
  if (axes_.size() >= dimension_) {
    throw BackendError("one-hot embedder: vocabulary exceeds dimension " +
                       std::to_string(dimension_));
  }
  const std::size_t axis = axes_.size();
  axes_.emplace(std::move(key), axis);
  return axis;
}

EmbeddingBackend::RawBatch OneHotEmbedder::embed_batch(std::span<const std::string> texts) {
  RawBatch raw;
  for (const auto& t : texts) {
    EmbeddingVector v;
    v.values.assign(dimension_, 0.0f);
    v.values[axis_of(t)] = 1.0f;
    raw.vectors.push_back(std::move(v));
    raw.usage.input_tokens += static_cast<std::int64_t>(tokenizer_.count(t));
  }
  return raw;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension, std::size_t batch_size,
                                 const text::Tokenizer& tokenizer)
    : dimension_(dimension), batch_size_(batch_size), tokenizer_(tokenizer) {
  if (dimension_ == 0) throw std::invalid_argument("hashing embedder: zero dimension");
}

EmbeddingBackend::RawBatch HashingEmbedder::embed_batch(std::span<const std::string> texts) {
  RawBatch raw;
  for (const auto& t : texts) {
    EmbeddingVector v;
    v.values.assign(dimension_, 0.0f);
    const std::vector<std::string> words = text::word_tokens(t, tokenizer_);
    bool any = false;
    for (const auto& w : words) {
      if (stopwords().count(w)) continue;
      v.values[fnv1a(w) % dimension_] += 1.0f;
      any = true;
    }
    if (!any) {
      for (const auto& w : words) v.values[fnv1a(w) % dimension_] += 1.0f;
      if (words.empty()) v.values[fnv1a(text::trim(t)) % dimension_] = 1.0f;
    }
    raw.vectors.push_back(std::move(v));
    raw.usage.input_tokens += static_cast<std::int64_t>(tokenizer_.count(t));
  }
  return raw;
}

OneHotTokenEmbedder::OneHotTokenEmbedder(std::size_t dimension) : embedder_(dimension) {}

std::vector<EmbeddingVector> OneHotTokenEmbedder::embed_tokens(
    const std::vector<std::string>& tokens) {
  std::vector<EmbeddingVector> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    EmbeddingVector v;
    v.values.assign(embedder_.dimension(), 0.0f);
    v.values[embedder_.axis_of(tok)] = 1.0f;
    out.push_back(std::move(v));
  }
  return out;
}

std::chrono::milliseconds RetryPolicy::backoff_after(int attempt) const {
  if (attempt < 1) return std::chrono::milliseconds{0};
  return initial_backoff * (1LL << std::min(attempt - 1, 20));
}

}  // namespace ragbench::backends
