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

#include <filesystem>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "ragbench/querygen.hpp"

using namespace ragbench;
using namespace ragbench::querygen;

namespace {

const char* kCorrect = "{\"label\":\"correct\"}";
const char* kIncorrect = "{\"label\":\"incorrect\"}";

std::string qa(const std::string& q, const std::string& a) {
  return nlohmann::json{{"question", q}, {"answer", a}, {"reasoning", "because"}}.dump();
}

std::vector<corpus::Chunk> chunks_of(const std::vector<std::pair<std::string, std::string>>& docs) {
  std::vector<corpus::Document> ds;
  for (const auto& [id, body] : docs) ds.push_back({id, "", body});
  return corpus::chunk_corpus(ds, corpus::ChunkingConfig{});
}

// Chain d1 -> d2 -> d3 through shared entities, plus a hub in four docs.
struct World {
  std::vector<corpus::Chunk> chunks = chunks_of({
      {"d1", "Book wrote Alice."},
      {"d2", "Alice born Freedonia."},
      {"d3", "Freedonia borders Sylvania."},
      {"d4", "Hub links Alice."},
      {"d5", "Hub links Freedonia."},
      {"d6", "Hub links Sylvania."},
      {"d7", "Hub links Book."},
  });
  kgraph::KnowledgeGraph graph = kgraph::build_graph({
      {"Book", "wrote", "Alice", "d1#0", {}},
      {"Alice", "born", "Freedonia", "d2#0", {}},
      {"Freedonia", "borders", "Sylvania", "d3#0", {}},
      {"Hub", "links", "Alice", "d4#0", {}},
      {"Hub", "links", "Freedonia", "d5#0", {}},
      {"Hub", "links", "Sylvania", "d6#0", {}},
      {"Hub", "links", "Book", "d7#0", {}},
  });
};

QueryRecord record(QueryType t, std::vector<std::string> support, std::string q = "Who?",
                   std::string gold = "Alice") {
  QueryRecord r;
  r.query_id = "r1";
  r.text = std::move(q);
  r.gold_answer = std::move(gold);
  r.type = t;
  r.supporting_fact_ids = std::move(support);
  return r;
}

}  // namespace

TEST(ParseGenerated, RequiresQuestionAndAnswer) {
  auto g = parse_generated("Sure: {\"question\": \" Q? \", \"answer\": \"A\"} done");
  ASSERT_TRUE(g);
  EXPECT_EQ(g->question, "Q?");
  EXPECT_FALSE(parse_generated("{\"question\": \"Q?\"}"));
  EXPECT_FALSE(parse_generated("{\"question\": \"Q?\", \"answer\": 3}"));
  EXPECT_FALSE(parse_generated("plain text"));
}

TEST(LexicalLeak, NormalizedSubstring) {
  EXPECT_TRUE(lexical_leak("Was the Amber-River long?", "amber river"));
  EXPECT_FALSE(lexical_leak("Which river?", "Amber River"));
  EXPECT_FALSE(lexical_leak("x", "!!"));
}

TEST(Generate, FactualRecordsCiteOneChunk) {
  World w;
  backends::ScriptedLlm llm;
  llm.push("not json");
  for (int i = 0; i < 3; ++i) llm.push(qa("Q" + std::to_string(i) + "?", "A"));
  std::mt19937_64 rng(1);
  QuerygenConfig cfg;
  cfg.id_prefix = "toy-";
  backends::TokenUsage spent;
  auto rs = generate_queries(QueryType::factual, w.chunks, nullptr, llm, 3, rng, cfg, &spent);
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_EQ(rs[0].query_id, "toy-factual-0001");
  EXPECT_EQ(rs[2].query_id, "toy-factual-0003");
  EXPECT_EQ(rs[0].supporting_fact_ids.size(), 1u);
  EXPECT_EQ(rs[0].reasoning, "because");
  EXPECT_EQ(rs[0].validation.status, ValidationStatus::pending);
  EXPECT_EQ(llm.requests()[0].kind, backends::PromptKind::querygen_factual);
  EXPECT_DOUBLE_EQ(llm.requests()[0].temperature, 0.7);
  EXPECT_GT(spent.input_tokens, 0);
}

TEST(Generate, ReasoningChainsCrossDocumentsViaSharedEntities) {
  World w;
  for (QueryType t : {QueryType::reasoning_2hop, QueryType::reasoning_3hop}) {
    backends::ScriptedLlm llm;
    for (int i = 0; i < 20; ++i) llm.push(qa("Q?", "A"));
    std::mt19937_64 rng(7);
    auto rs = generate_queries(t, w.chunks, &w.graph, llm, 10, rng);
    ASSERT_EQ(rs.size(), 10u);
    for (const auto& r : rs) {
      ASSERT_EQ(r.supporting_fact_ids.size(), required_support(t));
      std::set<std::string> docs;
      for (const auto& id : r.supporting_fact_ids) docs.insert(id.substr(0, id.find('#')));
      EXPECT_EQ(docs.size(), required_support(t));
    }
    EXPECT_EQ(llm.requests()[0].kind, backends::PromptKind::querygen_reasoning);
  }
}

TEST(Generate, SummaryCapsDistinctDocuments) {
  World w;
  backends::ScriptedLlm llm;
  for (int i = 0; i < 10; ++i) llm.push(qa("Summarize?", "Many things."));
  std::mt19937_64 rng(3);
  QuerygenConfig cfg;
  cfg.summary_max_docs = 3;
  auto rs = generate_queries(QueryType::summary, w.chunks, &w.graph, llm, 10, rng, cfg);
  ASSERT_EQ(rs.size(), 10u);
  for (const auto& r : rs) {
    EXPECT_GE(r.supporting_fact_ids.size(), 2u);
    EXPECT_LE(r.supporting_fact_ids.size(), 3u);
  }
}

TEST(Generate, InsufficientStructure) {
  World w;
  backends::ScriptedLlm llm;
  std::mt19937_64 rng(1);
  EXPECT_THROW(generate_queries(QueryType::summary, w.chunks, nullptr, llm, 1, rng),
               InsufficientStructure);
  EXPECT_THROW(generate_queries(QueryType::factual, {}, nullptr, llm, 1, rng),
               InsufficientStructure);
  const auto lonely = kgraph::build_graph({{"A", "r", "B", "d1#0", {}}, {"C", "r", "D", "d2#0", {}}});
  EXPECT_THROW(generate_queries(QueryType::reasoning_2hop, w.chunks, &lonely, llm, 1, rng),
               InsufficientStructure);
  EXPECT_THROW(generate_queries(QueryType::summary, w.chunks, &lonely, llm, 1, rng),
               InsufficientStructure);
  // A two-document bridge cannot make a three-document chain.
  const auto pair = kgraph::build_graph({{"A", "r", "B", "d1#0", {}}, {"B", "r", "C", "d2#0", {}}});
  EXPECT_THROW(generate_queries(QueryType::reasoning_3hop, w.chunks, &pair, llm, 1, rng),
               InsufficientStructure);
}

TEST(Validate, PassingFactualRecord) {
  World w;
  backends::ScriptedLlm llm;
  llm.push("Alice").push(kCorrect).push("I cannot answer");
  auto v = verify_then_filter(record(QueryType::factual, {"d1#0"}), w.chunks, llm);
  EXPECT_TRUE(v.passed());
  EXPECT_EQ(v.steps, (std::vector<std::string>{"grounding", "lexical_leak", "parametric_leak"}));
  EXPECT_EQ(llm.remaining(), 0u);
  EXPECT_EQ(llm.requests()[0].kind, backends::PromptKind::context_generation);
  EXPECT_EQ(llm.requests()[2].kind, backends::PromptKind::direct_generation);
}

TEST(Validate, EachCheckCanFail) {
  World w;
  {
    backends::ScriptedLlm llm;
    llm.push("Bob").push(kIncorrect);
    auto v = verify_then_filter(record(QueryType::factual, {"d1#0"}), w.chunks, llm);
    EXPECT_EQ(v.failed_check, FailedCheck::grounding);
    EXPECT_EQ(v.steps.size(), 1u);
  }
  {
    backends::ScriptedLlm llm;
    llm.push("Alice").push(kCorrect).push("I don't know").push("Alice").push(kCorrect);
    auto v = verify_then_filter(record(QueryType::reasoning_2hop, {"d1#0", "d2#0"}), w.chunks, llm);
    EXPECT_EQ(v.status, ValidationStatus::failed);
    EXPECT_EQ(v.failed_check, FailedCheck::shortcut);
    EXPECT_EQ(v.steps, (std::vector<std::string>{"grounding", "shortcut:d1#0", "shortcut:d2#0"}));
  }
  {
    backends::ScriptedLlm llm;
    llm.push("Alice").push(kCorrect);
    auto v = verify_then_filter(record(QueryType::factual, {"d1#0"}, "Is it alice?"), w.chunks, llm);
    EXPECT_EQ(v.failed_check, FailedCheck::lexical_leak);
  }
  {
    backends::ScriptedLlm llm;
    llm.push("Alice").push(kCorrect).push("Alice").push(kCorrect);
    auto v = verify_then_filter(record(QueryType::factual, {"d1#0"}), w.chunks, llm);
    EXPECT_EQ(v.failed_check, FailedCheck::parametric_leak);
  }
}

TEST(Validate, BackendFailureLeavesRecordUnvalidated) {
  World w;
  backends::ScriptedLlm llm;
  llm.push("Alice").push_failure();
  auto v = verify_then_filter(record(QueryType::factual, {"d1#0"}), w.chunks, llm);
  EXPECT_EQ(v.status, ValidationStatus::unvalidated);
  EXPECT_FALSE(v.failed_check);
  EXPECT_FALSE(v.error.empty());
  backends::ScriptedLlm unused;
  EXPECT_THROW(verify_then_filter(record(QueryType::factual, {"zz#0"}), w.chunks, unused), DataError);
  EXPECT_THROW(verify_then_filter(record(QueryType::factual, {}), w.chunks, unused),
               std::invalid_argument);
}

TEST(Validate, SimilarityMode) {
  World w;
  backends::OneHotEmbedder e(64);
  ValidationConfig cfg;
  cfg.similarity_mode = true;
  backends::ScriptedLlm llm;
  llm.push("alice!").push("Bob");
  auto v = verify_then_filter(record(QueryType::factual, {"d1#0"}), w.chunks, llm, &e, cfg);
  EXPECT_TRUE(v.passed());
  backends::ScriptedLlm none;
  EXPECT_THROW(verify_then_filter(record(QueryType::factual, {"d1#0"}), w.chunks, none, nullptr, cfg),
               ConfigError);
}

TEST(QueryStore, RoundTrip) {
  auto r = record(QueryType::reasoning_3hop, {"a#0", "b#0", "c#0"});
  r.reasoning = "chain";
  r.validation.status = ValidationStatus::failed;
  r.validation.failed_check = FailedCheck::shortcut;
  r.validation.steps = {"grounding", "shortcut:a#0"};
  const auto path = std::filesystem::temp_directory_path() / "ragbench_queries_test.jsonl";
  write_queries(path, {r});
  const auto back = read_queries(path);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].type, QueryType::reasoning_3hop);
  EXPECT_EQ(back[0].supporting_fact_ids, r.supporting_fact_ids);
  EXPECT_EQ(back[0].validation.failed_check, FailedCheck::shortcut);
  EXPECT_EQ(back[0].validation.steps, r.validation.steps);
  EXPECT_EQ(back[0].reasoning, "chain");
  EXPECT_EQ(to_json(back[0])["validation"]["passed"], false);
  std::filesystem::remove(path);
}
