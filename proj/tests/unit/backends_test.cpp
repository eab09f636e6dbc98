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

#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ragbench/backends.hpp"
#include "ragbench/prompts.hpp"

using namespace ragbench;
using namespace ragbench::backends;

namespace {

ChatRequest req(std::string prompt, PromptKind kind = PromptKind::direct_generation) {
  ChatRequest r;
  r.kind = kind;
  r.prompt = std::move(prompt);
  return r;
}

std::vector<std::string> numbered(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("text number " + std::to_string(i));
  return out;
}

}  // namespace

TEST(ScriptedLlm, ReturnsQueueInOrderWithTokenUsage) {
  ScriptedLlm llm;
  llm.push("Paris").push("Rome");
  auto a = llm.complete(req("one two three four five six seven"));
  EXPECT_EQ(a.text, "Paris");
  EXPECT_EQ(a.usage.input_tokens, 7);
  EXPECT_EQ(a.usage.output_tokens, 1);
  EXPECT_EQ(llm.complete(req("q")).text, "Rome");
  EXPECT_THROW(llm.complete(req("q")), BackendError);
  EXPECT_EQ(llm.requests().size(), 3u);
}

TEST(ScriptedLlm, QueuedFailureLooksLikeExhaustedRetries) {
  ScriptedLlm llm;
  llm.push_failure().push("ok");
  EXPECT_THROW(llm.complete(req("q")), AllRetriesExhausted);
  EXPECT_EQ(llm.complete(req("q")).text, "ok");
}

TEST(ChatRequest, ValidatesInputs) {
  EXPECT_THROW(req("").validate(), std::invalid_argument);
  auto r = req("x");
  r.temperature = 2.5;
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r.temperature = 0.0;
  r.max_output_tokens = 0;
  EXPECT_THROW(r.validate(), std::invalid_argument);
}

TEST(RuleLlm, FirstMatchingRuleWins) {
  RuleLlm llm("fallback");
  llm.add_literal(PromptKind::context_generation, {"amber", "lyra"}, "river", "Context");
  llm.add_literal(std::nullopt, {"lyra"}, "city");
  const std::string ctx = prompts::context_generation("The Amber River flows through Lyra.", "Q?");
  EXPECT_EQ(llm.complete(req(ctx, PromptKind::context_generation)).text, "river");
  EXPECT_EQ(llm.complete(req("Where is Lyra?")).text, "city");
  EXPECT_EQ(llm.complete(req("nothing")).text, "fallback");
}

TEST(RuleLlm, NoneOfExcludes) {
  RuleLlm llm("fallback");
  RuleLlm::Rule r;
  r.all_of = {"a"};
  r.none_of = {"b"};
  r.respond = [](const ChatRequest&) { return "hit"; };
  llm.add(r);
  EXPECT_EQ(llm.complete(req("a")).text, "hit");
  EXPECT_EQ(llm.complete(req("a b")).text, "fallback");
}

TEST(Responders, CapitalizedTriplets) {
  auto out = nlohmann::json::parse(responders::capitalized_triplets(
      req(prompts::triplet_extraction("The Silent Harbor was written by Alice Smith. No caps here."),
          PromptKind::triplet_extraction)));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0]["subject"], "Silent Harbor");
  EXPECT_EQ(out[0]["relation"], "was written by");
  EXPECT_EQ(out[0]["object"], "Alice Smith");
}

TEST(Responders, CapitalizedEntitiesAndJudge) {
  auto ents = nlohmann::json::parse(responders::capitalized_entities(
      req(prompts::entity_extraction("Where was Alice Smith born?"), PromptKind::entity_extraction)));
  EXPECT_EQ(ents, nlohmann::json::array({"Alice Smith"}));
  auto verdict = [](const std::string& pred) {
    return nlohmann::json::parse(
        responders::containment_judge(req(prompts::judge("q", pred, "Amber River"))))["label"];
  };
  EXPECT_EQ(verdict("It is the amber river."), "correct");
  EXPECT_EQ(verdict("The Grey Lakes"), "incorrect");
  EXPECT_EQ(verdict("I cannot answer"), "incomplete");
}

TEST(OneHotEmbedder, DistinctTextsAreOrthogonal) {
  OneHotEmbedder e(16);
  std::vector<std::string> texts{"a", "b", "a", "A!"};
  auto b = e.embed(texts);
  ASSERT_EQ(b.vectors.size(), 4u);
  EXPECT_DOUBLE_EQ(cosine(b.vectors[0], b.vectors[1]), 0.0);
  EXPECT_DOUBLE_EQ(cosine(b.vectors[0], b.vectors[2]), 1.0);
  EXPECT_DOUBLE_EQ(cosine(b.vectors[0], b.vectors[3]), 1.0);
  EXPECT_EQ(e.vocabulary_size(), 2u);
}

TEST(OneHotEmbedder, VocabularyOverflowIsABackendError) {
  OneHotEmbedder e(2);
  std::vector<std::string> texts{"a", "b", "c"};
  EXPECT_THROW(e.embed(texts), BackendError);
}

TEST(EmbeddingBackend, BatchesOf30) {
  HashingEmbedder inner(64, 30);
  InstrumentedEmbedder e(inner);
  auto texts = numbered(65);
  auto b = e.embed(texts);
  EXPECT_EQ(b.vectors.size(), 65u);
  EXPECT_EQ(e.batch_sizes(), (std::vector<std::size_t>{30, 30, 5}));
  for (const auto& v : b.vectors) EXPECT_NEAR(v.norm(), 1.0, 1e-6);
}

TEST(EmbeddingBackend, RejectsEmptyInput) {
  HashingEmbedder e;
  std::vector<std::string> none;
  EXPECT_THROW(e.embed(none), std::invalid_argument);
  std::vector<std::string> blank{"ok", ""};
  EXPECT_THROW(e.embed(blank), std::invalid_argument);
}

TEST(HashingEmbedder, PureFunctionOfText) {
  HashingEmbedder a(128), b(128);
  auto x = a.embed_one("Amber River flows");
  auto y = b.embed_one("amber river FLOWS");
  EXPECT_EQ(x.values, y.values);
  EXPECT_GT(cosine(x, a.embed_one("river")), 0.0);
}

TEST(InstrumentedLlm, CountsCallsAndUsage) {
  ScriptedLlm inner;
  inner.push("a b").push("c");
  InstrumentedLlm llm(inner);
  llm.complete(req("x y z"));
  llm.complete(req("x"));
  EXPECT_EQ(llm.calls(), 2u);
  EXPECT_EQ(llm.usage().input_tokens, 4);
  EXPECT_EQ(llm.usage().output_tokens, 3);
}

TEST(RetryPolicy, ExponentialFromOneSecond) {
  RetryPolicy p;
  EXPECT_EQ(p.max_attempts, 3);
  EXPECT_EQ(p.backoff_after(1).count(), 1000);
  EXPECT_EQ(p.backoff_after(2).count(), 2000);
  EXPECT_EQ(p.backoff_after(3).count(), 4000);
}

TEST(Vectors, DotNormCosine) {
  EmbeddingVector a{{3.0f, 4.0f}}, b{{4.0f, 3.0f}};
  EXPECT_DOUBLE_EQ(a.norm(), 5.0);
  EXPECT_DOUBLE_EQ(dot(a, b), 24.0);
  EXPECT_NEAR(cosine(a, b), 24.0 / 25.0, 1e-12);
  a.normalize();
  EXPECT_NEAR(a.norm(), 1.0, 1e-7);
}
