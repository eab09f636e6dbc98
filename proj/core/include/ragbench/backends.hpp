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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragbench/errors.hpp"
#include "ragbench/prompts.hpp"
#include "ragbench/text.hpp"

namespace ragbench::backends {

using prompts::PromptKind;

struct TokenUsage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;

  TokenUsage& operator+=(const TokenUsage& o) {
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    return *this;
  }
  friend TokenUsage operator+(TokenUsage a, const TokenUsage& b) { return a += b; }
  friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
  std::int64_t total() const { return input_tokens + output_tokens; }
};

struct ChatRequest {
  PromptKind kind = PromptKind::direct_generation;
  std::string prompt;
  double temperature = 0.3;
  int max_output_tokens = 1000;

  // Throws std::invalid_argument on an empty prompt, a temperature outside
  // [0, 2] or a non-positive token limit.
  void validate() const;
};

struct ChatResponse {
  std::string text;
  TokenUsage usage;
};

struct EmbeddingVector {
  std::vector<float> values;

  std::size_t dimension() const { return values.size(); }
  double norm() const;
  // Scales to unit L2 norm; a zero vector is left unchanged.
  void normalize();
};

double dot(const EmbeddingVector& a, const EmbeddingVector& b);
// Cosine similarity; 0 when either vector is zero.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct EmbeddingBatch {
  std::vector<EmbeddingVector> vectors;
  TokenUsage usage;
  std::size_t batches = 0;
};

class AllRetriesExhausted : public BackendError {
 public:
  AllRetriesExhausted(int attempts, const std::string& last_error);
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class MalformedResponse : public BackendError {
 public:
  explicit MalformedResponse(const std::string& what) : BackendError(what) {}
};

class DimensionMismatch : public DataError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual);
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Batches, validates and L2-normalizes; subclasses embed one batch.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  // Order-preserving; requires a non-empty list of non-empty texts.
  EmbeddingBatch embed(std::span<const std::string> texts);
  EmbeddingVector embed_one(const std::string& text, TokenUsage* usage = nullptr);

  virtual std::size_t dimension() const = 0;
  virtual std::size_t batch_size() const { return 30; }

 protected:
  struct RawBatch {
    std::vector<EmbeddingVector> vectors;
    TokenUsage usage;
  };
  virtual RawBatch embed_batch(std::span<const std::string> texts) = 0;
};

// Produces one contextual vector per token of a token sequence.
class TokenEmbedder {
 public:
  virtual ~TokenEmbedder() = default;
  virtual std::vector<EmbeddingVector> embed_tokens(
      const std::vector<std::string>& tokens) = 0;
};

// ---------------------------------------------------------------------------
// Deterministic local mocks
// ---------------------------------------------------------------------------

// Returns pre-seeded responses in order. A queued failure makes that call
// throw AllRetriesExhausted, as a remote backend would after its retries.
class ScriptedLlm final : public LlmBackend {
 public:
  explicit ScriptedLlm(const text::Tokenizer& tokenizer = text::default_tokenizer());

  ScriptedLlm& push(std::string response);
  ScriptedLlm& push_failure(int times = 1);

  ChatResponse complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t remaining() const;

 private:
  const text::Tokenizer& tokenizer_;
  mutable std::mutex mu_;
  std::deque<std::optional<std::string>> script_;
  std::vector<ChatRequest> requests_;
};

// Keyword-lookup mock. Rules are tried in order; the first rule whose prompt
// kind matches and whose keywords all occur (case-insensitively) in the chosen
// prompt section answers the call.
class RuleLlm final : public LlmBackend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  struct Rule {
    std::optional<PromptKind> kind;
    // Section to search; empty means the whole prompt.
    std::string section;
    std::vector<std::string> all_of;
    std::vector<std::string> none_of;
    Responder respond;
  };

  explicit RuleLlm(std::string default_response = "I cannot answer",
                   const text::Tokenizer& tokenizer = text::default_tokenizer());

  RuleLlm& add(Rule rule);
  RuleLlm& add_literal(std::optional<PromptKind> kind, std::vector<std::string> all_of,
                       std::string response, std::string section = "");

  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::string default_response_;
  const text::Tokenizer& tokenizer_;
  std::vector<Rule> rules_;
};

// Built-in responders used by rule mocks over toy corpora.
namespace responders {

// Triplets from sentences holding two or more capitalized entity spans:
// (first span, words in between, second span).
std::string capitalized_triplets(const ChatRequest& request);
// Capitalized spans of the question as a JSON array.
std::string capitalized_entities(const ChatRequest& request);
// Judge: "correct" iff the normalized gold text occurs in the prediction,
// "incomplete" for refusals, otherwise "incorrect".
std::string containment_judge(const ChatRequest& request);
// Evaluator that always reports the answer as sufficient.
std::string always_sufficient(const ChatRequest& request);

}  // namespace responders

// Each distinct normalized text gets its own axis, so equal texts have cosine 1
// and different texts cosine 0. Axes are assigned in first-seen order.
class OneHotEmbedder final : public EmbeddingBackend {
 public:
  explicit OneHotEmbedder(std::size_t dimension = 4096, std::size_t batch_size = 30,
                          const text::Tokenizer& tokenizer = text::default_tokenizer());

  std::size_t dimension() const override { return dimension_; }
  std::size_t batch_size() const override { return batch_size_; }
  std::size_t vocabulary_size() const;

  std::size_t axis_of(const std::string& text);

 protected:
  RawBatch embed_batch(std::span<const std::string> texts) override;

 private:
  std::size_t dimension_;
  std::size_t batch_size_;
  const text::Tokenizer& tokenizer_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::size_t> axes_;
};

// Bag of case-folded content words hashed (FNV-1a) into a fixed number of
// buckets. A pure function of the text.
class HashingEmbedder final : public EmbeddingBackend {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256, std::size_t batch_size = 30,
                           const text::Tokenizer& tokenizer = text::default_tokenizer());

  std::size_t dimension() const override { return dimension_; }
  std::size_t batch_size() const override { return batch_size_; }

 protected:
  RawBatch embed_batch(std::span<const std::string> texts) override;

 private:
  std::size_t dimension_;
  std::size_t batch_size_;
  const text::Tokenizer& tokenizer_;
};

// One-hot per token string via a shared OneHotEmbedder.
class OneHotTokenEmbedder final : public TokenEmbedder {
 public:
  explicit OneHotTokenEmbedder(std::size_t dimension = 4096);
  std::vector<EmbeddingVector> embed_tokens(const std::vector<std::string>& tokens) override;

 private:
  OneHotEmbedder embedder_;
};

// ---------------------------------------------------------------------------
// Instrumentation
// ---------------------------------------------------------------------------

class InstrumentedLlm final : public LlmBackend {
 public:
  explicit InstrumentedLlm(LlmBackend& inner) : inner_(inner) {}
  ChatResponse complete(const ChatRequest& request) override;

  std::size_t calls() const { return calls_; }
  TokenUsage usage() const;

 private:
  LlmBackend& inner_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  TokenUsage usage_;
};

class InstrumentedEmbedder final : public EmbeddingBackend {
 public:
  explicit InstrumentedEmbedder(EmbeddingBackend& inner) : inner_(inner) {}

  std::size_t dimension() const override { return inner_.dimension(); }
  std::size_t batch_size() const override { return inner_.batch_size(); }

  std::size_t batches() const { return batches_; }
  std::vector<std::size_t> batch_sizes() const;
  TokenUsage usage() const;

 protected:
  RawBatch embed_batch(std::span<const std::string> texts) override;

 private:
  EmbeddingBackend& inner_;
  std::atomic<std::size_t> batches_{0};
  mutable std::mutex mu_;
  std::vector<std::size_t> batch_sizes_;
  TokenUsage usage_;
};

// ---------------------------------------------------------------------------
// Remote JSON-over-HTTP backends
// ---------------------------------------------------------------------------

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  // Called between attempts; replaceable so tests need not sleep.
  std::function<void(std::chrono::milliseconds)> sleep;

  // Delay before attempt `attempt + 1` (1-based): initial * 2^(attempt - 1).
  std::chrono::milliseconds backoff_after(int attempt) const;
};

struct RemoteConfig {
  std::string base_url;  // e.g. "https://api.example.com/v1"
  std::string api_key;
  std::string model;
  std::string path;      // defaults to /chat/completions or /embeddings
  std::chrono::milliseconds timeout{120000};
  RetryPolicy retry;
  int concurrency = 15;
  std::size_t batch_size = 30;
  std::size_t dimension = 1536;

  // Reads base_url and api_key from the environment when unset.
  void apply_environment(const char* base_var = "RAGBENCH_API_BASE",
                         const char* key_var = "RAGBENCH_API_KEY");
};

// Caps the number of requests in flight.
class AdmissionGate {
 public:
  explicit AdmissionGate(int limit);

  class Ticket {
   public:
    explicit Ticket(AdmissionGate& gate);
    ~Ticket();
    Ticket(const Ticket&) = delete;
    Ticket& operator=(const Ticket&) = delete;

   private:
    AdmissionGate& gate_;
  };

  int limit() const { return limit_; }
  int in_flight() const { return in_flight_; }
  int peak() const { return peak_; }

 private:
  int limit_;
  std::counting_semaphore<> slots_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

class RemoteLlm final : public LlmBackend {
 public:
  explicit RemoteLlm(RemoteConfig config);
  ~RemoteLlm() override;

  ChatResponse complete(const ChatRequest& request) override;
  const AdmissionGate& gate() const { return gate_; }

 private:
  RemoteConfig config_;
  AdmissionGate gate_;
};

class RemoteEmbedder final : public EmbeddingBackend {
 public:
  explicit RemoteEmbedder(RemoteConfig config);
  ~RemoteEmbedder() override;

  std::size_t dimension() const override { return config_.dimension; }
  std::size_t batch_size() const override { return config_.batch_size; }
  const AdmissionGate& gate() const { return gate_; }

 protected:
  RawBatch embed_batch(std::span<const std::string> texts) override;

 private:
  RemoteConfig config_;
  AdmissionGate gate_;
};

}  // namespace ragbench::backends
