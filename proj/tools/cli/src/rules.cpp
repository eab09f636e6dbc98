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

#include <fstream>

#include "ragbench/errors.hpp"
#include "ragbench/prompts.hpp"
#include "ragbench/text.hpp"
#include "ragbench_cli/config.hpp"

namespace ragbench::cli {
namespace {

using json = nlohmann::json;
using backends::ChatRequest;

// First triplet the capitalized-span heuristic finds in `text`.
std::optional<json> first_triplet(const std::string& text) {
  ChatRequest r;
  r.kind = prompts::PromptKind::triplet_extraction;
  r.prompt = prompts::triplet_extraction(text);
  json arr = json::parse(backends::responders::capitalized_triplets(r));
  if (arr.empty()) return std::nullopt;
  return arr.front();
}

std::vector<std::string> documents(const std::string& prompt) {
  std::vector<std::string> out;
  for (int i = 1;; ++i) {
    auto d = prompts::section(prompt, "Document " + std::to_string(i));
    if (!d) break;
    out.push_back(std::move(*d));
  }
  return out;
}

// Query generator for rule mocks: turns a (subject, relation, object) fact
// into "<subject> <relation> what?". Reasoning prompts use the last document
// of the chain; summary prompts gather facts about the named entity.
std::string fact_question(const ChatRequest& request) {
  std::string source;
  if (auto p = prompts::section(request.prompt, "Passage")) {
    source = *p;
  } else {
    auto docs = documents(request.prompt);
    if (docs.empty()) return "{}";
    if (auto e = prompts::section(request.prompt, "Entity")) {
      std::string facts;
      for (const auto& d : docs) {
        auto t = first_triplet(d);
        if (!t) continue;
        if (!facts.empty()) facts += "; ";
        facts += (*t)["relation"].get<std::string>() + " " + (*t)["object"].get<std::string>();
      }
      if (facts.empty()) return "{}";
      return json{{"question", "What do the documents report about " + *e + "?"},
                  {"answer", facts}}
          .dump();
    }
    source = docs.back();
  }
  auto t = first_triplet(source);
  if (!t) return "{}";
  return json{{"question", (*t)["subject"].get<std::string>() + " " +
                               (*t)["relation"].get<std::string>() + " what?"},
              {"answer", (*t)["object"]},
              {"reasoning", "single fact lookup"}}
      .dump();
}

// Answers "<subject> <relation> what?" from a context fact with that subject
// and relation; refuses otherwise.
std::string fact_lookup(const ChatRequest& request) {
  const std::string q = text::trim(prompts::section(request.prompt, "Question").value_or(""));
  const std::string context = prompts::section(request.prompt, "Context").value_or("");
  ChatRequest r;
  r.kind = prompts::PromptKind::triplet_extraction;
  r.prompt = prompts::triplet_extraction(context);
  for (const auto& t : json::parse(backends::responders::capitalized_triplets(r))) {
    const std::string asked =
        t["subject"].get<std::string>() + " " + t["relation"].get<std::string>() + " what?";
    if (text::casefold(asked) == text::casefold(q)) return t["object"].get<std::string>();
  }
  return "I cannot answer";
}

backends::RuleLlm::Responder responder_named(const std::string& name) {
  namespace r = backends::responders;
  if (name == "capitalized_triplets") return r::capitalized_triplets;
  if (name == "capitalized_entities") return r::capitalized_entities;
  if (name == "containment_judge") return r::containment_judge;
  if (name == "always_sufficient") return r::always_sufficient;
  if (name == "fact_question") return fact_question;
  if (name == "fact_lookup") return fact_lookup;
  throw ConfigError("unknown responder: " + name);
}

}  // namespace

std::unique_ptr<backends::RuleLlm> load_rule_llm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rules file: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ConfigError("rules file is not a JSON object: " + path.string());
  }
  auto llm = std::make_unique<backends::RuleLlm>(j.value("default_response", "I cannot answer"));
  try {
    for (const auto& r : j.value("rules", json::array())) {
      backends::RuleLlm::Rule rule;
      if (r.contains("kind")) {
        auto k = prompts::prompt_kind_from_string(r.at("kind").get<std::string>());
        if (!k) throw ConfigError("unknown prompt kind in rules: " + r.at("kind").dump());
        rule.kind = *k;
      }
      rule.section = r.value("section", "");
      rule.all_of = r.value("all_of", std::vector<std::string>{});
      rule.none_of = r.value("none_of", std::vector<std::string>{});
      if (r.contains("responder")) {
        rule.respond = responder_named(r.at("responder").get<std::string>());
      } else if (r.contains("response")) {
        const json& resp = r.at("response");
        std::string literal = resp.is_string() ? resp.get<std::string>() : resp.dump();
        rule.respond = [literal](const ChatRequest&) { return literal; };
      } else {
        throw ConfigError("rule needs a response or a responder");
      }
      llm->add(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed rules file: ") + e.what());
  }
  return llm;
}

}  // namespace ragbench::cli
