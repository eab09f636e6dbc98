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

#include "ragbench/prompts.hpp"

#include <array>
#include <utility>

namespace ragbench::prompts {
namespace {

constexpr std::array<std::pair<PromptKind, std::string_view>, 9> kNames{{
    {PromptKind::triplet_extraction, "triplet_extraction"},
    {PromptKind::entity_extraction, "entity_extraction"},
    {PromptKind::direct_generation, "direct_generation"},
    {PromptKind::context_generation, "context_generation"},
    {PromptKind::iterative_eval, "iterative_eval"},
    {PromptKind::judge, "judge"},
    {PromptKind::querygen_factual, "querygen_factual"},
    {PromptKind::querygen_reasoning, "querygen_reasoning"},
    {PromptKind::querygen_summary, "querygen_summary"},
}};

void block(std::string& out, std::string_view label, std::string_view body) {
  out += "<<<";
  out += label;
  out += '\n';
  out += body;
  out += "\n>>>\n";
}

}  // namespace

std::string_view to_string(PromptKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<PromptKind> prompt_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::optional<std::string> section(std::string_view prompt, std::string_view label) {
  const std::string open = "<<<" + std::string(label) + "\n";
  const auto b = prompt.find(open);
  if (b == std::string_view::npos) return std::nullopt;
  const auto start = b + open.size();
  const auto e = prompt.find("\n>>>", start);
  if (e == std::string_view::npos) return std::nullopt;
  return std::string(prompt.substr(start, e - start));
}

std::string triplet_extraction(std::string_view chunk_text) {
  std::string p =
      "You are a knowledge graph builder. Identify every factual "
      "(Subject, Relation, Object) triplet stated in the text below.\n"
      "Rules:\n"
      "- Subjects and objects are named entities or concrete concepts.\n"
      "- Relations are short verb phrases taken from the text.\n"
      "- Output ONLY a JSON array of objects with the keys \"subject\", "
      "\"relation\" and \"object\". Output [] if there are none.\n\n";
  block(p, "Text", chunk_text);
  return p;
}

std::string entity_extraction(std::string_view question) {
  std::string p =
      "Extract the named entities and key concepts mentioned in the question "
      "below. Output ONLY a JSON array of strings. Output [] if there are "
      "none.\n\n";
  block(p, "Question", question);
  return p;
}

std::string direct_generation(std::string_view question) {
  std::string p =
      "Answer the question below using your own knowledge. Be concise and "
      "factual. If you do not know the answer, say \"I cannot answer\".\n\n";
  block(p, "Question", question);
  p += "Answer:";
  return p;
}

std::string context_generation(std::string_view context, std::string_view question) {
  std::string p =
      "Answer the question using only the context below. Be concise. If the "
      "context does not contain the answer, say \"I cannot answer\".\n\n";
  block(p, "Context", context.empty() ? kNoContext : context);
  block(p, "Question", question);
  p += "Answer:";
  return p;
}

std::string iterative_eval(std::string_view question, std::string_view answer,
                           std::string_view context) {
  std::string p =
      "Evaluate whether the answer fully and correctly resolves the question "
      "given the available context. If it does not, propose ONE focused "
      "sub-question whose answer would fill the missing information.\n"
      "Output ONLY a JSON object: {\"sufficient\": true|false, \"reason\": "
      "\"...\", \"sub_question\": \"...\" or null}.\n\n";
  block(p, "Question", question);
  block(p, "Answer", answer);
  block(p, "Context", context.empty() ? kNoContext : context);
  return p;
}

std::string judge(std::string_view question, std::string_view prediction,
                  std::string_view gold) {
  std::string p =
      "You are grading a generated answer against the ground truth.\n"
      "Classify the prediction into exactly one category:\n"
      "- correct: logically accurate and contains the core information of the "
      "ground truth.\n"
      "- incorrect: contains information that contradicts the ground truth.\n"
      "- incomplete: partially correct but missing critical details, or the "
      "model refused to answer.\n"
      "Output ONLY a JSON object: {\"label\": \"correct\"|\"incorrect\"|"
      "\"incomplete\", \"rationale\": \"...\"}.\n\n";
  block(p, "Question", question);
  block(p, "Prediction", prediction);
  block(p, "Gold", gold);
  return p;
}

std::string querygen_factual(std::string_view chunk_text) {
  std::string p =
      "Write one factual question that can be answered from the passage "
      "below, together with its short answer. The question must be "
      "self-contained: it must make sense without the passage and must not "
      "use ambiguous pronouns.\n"
      "Output ONLY a JSON object: {\"question\": \"...\", \"answer\": "
      "\"...\"}.\n\n";
  block(p, "Passage", chunk_text);
  return p;
}

std::string querygen_reasoning(const std::vector<std::string>& documents, int hops) {
  std::string p =
      "The documents below form a chain linked by shared bridge entities. "
      "Write one " +
      std::to_string(hops) +
      "-hop question that can only be answered by following the whole chain. "
      "Start from the final answer and replace each bridge entity with a "
      "description taken from the preceding document, so that no single "
      "document answers the question.\n"
      "Output ONLY a JSON object: {\"question\": \"...\", \"answer\": "
      "\"...\", \"reasoning\": \"...\"}.\n\n";
  for (std::size_t i = 0; i < documents.size(); ++i) {
    block(p, "Document " + std::to_string(i + 1), documents[i]);
  }
  return p;
}

std::string querygen_summary(std::string_view entity,
                             const std::vector<std::string>& documents) {
  std::string p =
      "First check that the documents below refer to the same entity and not "
      "to homonyms. Then write one summary question about the entity whose "
      "complete answer requires combining information from at least two of "
      "the documents, together with that answer.\n"
      "Output ONLY a JSON object: {\"question\": \"...\", \"answer\": "
      "\"...\"}.\n\n";
  block(p, "Entity", entity);
  for (std::size_t i = 0; i < documents.size(); ++i) {
    block(p, "Document " + std::to_string(i + 1), documents[i]);
  }
  return p;
}

}  // namespace ragbench::prompts
