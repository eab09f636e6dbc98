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
#include <cctype>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"

namespace ragbench::backends {
namespace {

TokenUsage usage_for(const text::Tokenizer& tokenizer, const ChatRequest& request,
                     const std::string& reply) {
  TokenUsage usage;
  usage.input_tokens = static_cast<std::int64_t>(tokenizer.count(request.prompt));
  usage.output_tokens = static_cast<std::int64_t>(tokenizer.count(reply));
  return usage;
}

const char* const kLeadStopwords[] = {
    "the", "a", "an", "in", "on", "at", "she", "he", "it", "they", "this",
    "that", "his", "her", "its", "their", "after", "before", "during", "which",
    "what", "who", "whom", "whose", "where", "when", "how", "both", "is",
    "was", "were", "are", "did", "does", "do", "name", "tell", "describe"};

bool is_lead_stopword(const std::string& word) {
  const std::string f = text::casefold(word);
  return std::any_of(std::begin(kLeadStopwords), std::end(kLeadStopwords),
                     [&](const char* s) { return f == s; });
}

struct Word {
  std::string text;
  bool capitalized;
};

std::vector<Word> words_of(const std::string& sentence) {
  std::vector<Word> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    const bool cap = std::isupper(static_cast<unsigned char>(cur.front())) != 0;
    out.push_back({cur, cap});
    cur.clear();
  };
  for (char c : sentence) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '\'' || u >= 0x80) {
      cur.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

struct Span {
  std::size_t begin;  // word index
  std::size_t end;
  std::string text;
};

std::vector<Span> capitalized_spans(const std::vector<Word>& words) {
  std::vector<Span> spans;
  std::size_t i = 0;
  while (i < words.size()) {
    if (!words[i].capitalized) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < words.size() && words[j].capitalized) ++j;
    std::size_t b = i;
    while (b < j && is_lead_stopword(words[b].text)) ++b;
    if (b < j) {
      std::string t;
      for (std::size_t k = b; k < j; ++k) {
        if (!t.empty()) t += ' ';
        t += words[k].text;
      }
      spans.push_back({b, j, t});
    }
    i = j;
  }
  return spans;
}

}  // namespace

// ---------------------------------------------------------------------------

ScriptedLlm::ScriptedLlm(const text::Tokenizer& tokenizer) : tokenizer_(tokenizer) {}

ScriptedLlm& ScriptedLlm::push(std::string response) {
  std::lock_guard lock(mu_);
  script_.emplace_back(std::move(response));
  return *this;
}

ScriptedLlm& ScriptedLlm::push_failure(int times) {
  std::lock_guard lock(mu_);
  for (int i = 0; i < times; ++i) script_.emplace_back(std::nullopt);
  return *this;
}

ChatResponse ScriptedLlm::complete(const ChatRequest& request) {
  request.validate();
  std::optional<std::string> next;
  {
    std::lock_guard lock(mu_);
    requests_.push_back(request);
    if (script_.empty()) throw BackendError("scripted backend: script exhausted");
    next = std::move(script_.front());
    script_.pop_front();
  }
  if (!next) throw AllRetriesExhausted(1, "scripted failure");
  return {*next, usage_for(tokenizer_, request, *next)};
}

std::vector<ChatRequest> ScriptedLlm::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedLlm::remaining() const {
  std::lock_guard lock(mu_);
  return script_.size();
}

// ---------------------------------------------------------------------------

RuleLlm::RuleLlm(std::string default_response, const text::Tokenizer& tokenizer)
    : default_response_(std::move(default_response)), tokenizer_(tokenizer) {}

RuleLlm& RuleLlm::add(Rule rule) {
  rules_.push_back(std::move(rule));
  return *this;
}

RuleLlm& RuleLlm::add_literal(std::optional<PromptKind> kind,
                              std::vector<std::string> all_of, std::string response,
                              std::string section) {
  Rule r;
  r.kind = kind;
  r.section = std::move(section);
  r.all_of = std::move(all_of);
  r.respond = [response = std::move(response)](const ChatRequest&) { return response; };
  return add(std::move(r));
}

ChatResponse RuleLlm::complete(const ChatRequest& request) {
  request.validate();
  for (const Rule& rule : rules_) {
    if (rule.kind && *rule.kind != request.kind) continue;
    std::string haystack = request.prompt;
    if (!rule.section.empty()) {
      auto s = prompts::section(request.prompt, rule.section);
      if (!s) continue;
      haystack = std::move(*s);
    }
    const bool all = std::all_of(rule.all_of.begin(), rule.all_of.end(), [&](const auto& k) {
      return text::contains_folded(haystack, k);
    });
    const bool none = std::none_of(rule.none_of.begin(), rule.none_of.end(),
                                   [&](const auto& k) { return text::contains_folded(haystack, k); });
    if (all && none) {
      std::string reply = rule.respond(request);
      return {reply, usage_for(tokenizer_, request, reply)};
    }
  }
  return {default_response_, usage_for(tokenizer_, request, default_response_)};
}

namespace responders {

std::string capitalized_triplets(const ChatRequest& request) {
  const std::string body = prompts::section(request.prompt, "Text").value_or("");
  nlohmann::json out = nlohmann::json::array();
  for (const std::string& sentence : text::default_sentence_splitter().split(body)) {
    const std::vector<Word> words = words_of(sentence);
    const std::vector<Span> spans = capitalized_spans(words);
    for (std::size_t i = 0; i + 1 < spans.size(); ++i) {
      std::string relation;
      for (std::size_t k = spans[i].end; k < spans[i + 1].begin; ++k) {
        if (!relation.empty()) relation += ' ';
        relation += words[k].text;
      }
      if (relation.empty()) continue;
      out.push_back({{"subject", spans[i].text},
                     {"relation", text::casefold(relation)},
                     {"object", spans[i + 1].text}});
    }
  }
  return out.dump();
}

std::string capitalized_entities(const ChatRequest& request) {
  const std::string q = prompts::section(request.prompt, "Question").value_or("");
  nlohmann::json out = nlohmann::json::array();
  for (const Span& s : capitalized_spans(words_of(q))) out.push_back(s.text);
  return out.dump();
}

std::string containment_judge(const ChatRequest& request) {
  const std::string pred = prompts::section(request.prompt, "Prediction").value_or("");
  const std::string gold = prompts::section(request.prompt, "Gold").value_or("");
  nlohmann::json out;
  const std::string np = text::normalize_for_match(pred);
  const std::string ng = text::normalize_for_match(gold);
  if (text::is_refusal(pred)) {
    out = {{"label", "incomplete"}, {"rationale", "refused to answer"}};
  } else if (!ng.empty() && (" " + np + " ").find(" " + ng + " ") != std::string::npos) {
    out = {{"label", "correct"}, {"rationale", "gold answer contained in prediction"}};
  } else {
    out = {{"label", "incorrect"}, {"rationale", "gold answer not found"}};
  }
  return out.dump();
}

std::string always_sufficient(const ChatRequest&) {
  return R"({"sufficient": true, "reason": "answer accepted", "sub_question": null})";
}

}  // namespace responders

// ---------------------------------------------------------------------------

ChatResponse InstrumentedLlm::complete(const ChatRequest& request) {
  ChatResponse r = inner_.complete(request);
  ++calls_;
  std::lock_guard lock(mu_);
  usage_ += r.usage;
  return r;
}

TokenUsage InstrumentedLlm::usage() const {
  std::lock_guard lock(mu_);
  return usage_;
}

EmbeddingBackend::RawBatch InstrumentedEmbedder::embed_batch(
    std::span<const std::string> texts) {
  EmbeddingBatch b = inner_.embed(texts);
  ++batches_;
  std::lock_guard lock(mu_);
  batch_sizes_.push_back(texts.size());
  usage_ += b.usage;
  return {std::move(b.vectors), b.usage};
}

std::vector<std::size_t> InstrumentedEmbedder::batch_sizes() const {
  std::lock_guard lock(mu_);
  return batch_sizes_;
}

TokenUsage InstrumentedEmbedder::usage() const {
  std::lock_guard lock(mu_);
  return usage_;
}

}  // namespace ragbench::backends
