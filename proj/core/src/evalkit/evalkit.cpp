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

#include "ragbench/evalkit.hpp"

#include <algorithm>
#include <limits>

#include <spdlog/spdlog.h>

namespace ragbench::evalkit {
namespace {

using json = nlohmann::json;

// Row-wise best cosine of `a` against `b`.
std::vector<double> best_matches(const std::vector<backends::EmbeddingVector>& a,
                                 const std::vector<backends::EmbeddingVector>& b) {
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& x : a) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::max(best, backends::cosine(x, y));
    out.push_back(b.empty() ? 0.0 : best);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<backends::EmbeddingVector> embed_sentences(backends::EmbeddingBackend& embedder,
                                                       const std::vector<std::string>& sents) {
  if (sents.empty()) return {};
  return embedder.embed(sents).vectors;
}

}  // namespace

F1Score semantic_f1(std::string_view prediction, std::string_view reference,
                    backends::TokenEmbedder& embedder, const text::Tokenizer& tokenizer) {
  const auto pred = text::word_tokens(prediction, tokenizer);
  const auto ref = text::word_tokens(reference, tokenizer);
  if (pred.empty()) throw EmptyText("prediction");
  if (ref.empty()) throw EmptyText("reference");
  const auto pe = embedder.embed_tokens(pred);
  const auto re = embedder.embed_tokens(ref);
  F1Score s;
  s.precision = mean(best_matches(pe, re));
  s.recall = mean(best_matches(re, pe));
  const double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

double soft_coverage(std::string_view prediction, std::string_view reference,
                     backends::EmbeddingBackend& embedder,
                     const text::SentenceSplitter& splitter) {
  const auto ref = splitter.split(reference);
  if (ref.empty()) throw EmptyReference();
  const auto pred = splitter.split(prediction);
  if (pred.empty()) return 0.0;
  return mean(best_matches(embed_sentences(embedder, ref), embed_sentences(embedder, pred)));
}

Faithfulness faithfulness(std::string_view answer, std::string_view context,
                          backends::EmbeddingBackend& embedder, double tau,
                          const text::SentenceSplitter& splitter) {
  const auto ans = splitter.split(answer);
  if (ans.empty()) throw EmptyAnswer();
  const auto ctx = splitter.split(context);
  if (ctx.empty()) throw EmptyContext();
  const auto support = best_matches(embed_sentences(embedder, ans), embed_sentences(embedder, ctx));
  Faithfulness f;
  std::size_t hits = 0;
  for (double s : support) {
    if (s >= tau) ++hits;
  }
  f.hard = static_cast<double>(hits) / static_cast<double>(support.size());
  f.soft = mean(support);
  return f;
}

std::string_view to_string(JudgeLabel l) {
  switch (l) {
    case JudgeLabel::correct: return "correct";
    case JudgeLabel::incorrect: return "incorrect";
    case JudgeLabel::incomplete: return "incomplete";
  }
  return "incomplete";
}

std::optional<JudgeLabel> judge_label_from_string(std::string_view s) {
  const std::string n = text::normalize_for_match(s);
  if (n == "correct") return JudgeLabel::correct;
  if (n == "incorrect") return JudgeLabel::incorrect;
  if (n == "incomplete") return JudgeLabel::incomplete;
  return std::nullopt;
}

std::optional<JudgeVerdict> parse_judge_reply(std::string_view reply) {
  const auto b = reply.find('{');
  const auto e = reply.rfind('}');
  if (b != std::string_view::npos && e != std::string_view::npos && b < e) {
    json j = json::parse(reply.substr(b, e - b + 1), nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
      auto it = j.find("label");
      if (it != j.end() && it->is_string()) {
        if (auto label = judge_label_from_string(it->get<std::string>())) {
          JudgeVerdict v;
          v.label = *label;
          v.rationale = j.value("rationale", std::string());
          return v;
        }
      }
    }
    return std::nullopt;
  }
  if (auto label = judge_label_from_string(reply)) return JudgeVerdict{*label, ""};
  return std::nullopt;
}

JudgeVerdict llm_judge(std::string_view query, std::string_view prediction, std::string_view gold,
                       backends::LlmBackend& llm, backends::TokenUsage* spent) {
  if (text::is_refusal(prediction)) return {JudgeLabel::incomplete, "refused to answer"};
  backends::ChatRequest req;
  req.kind = prompts::PromptKind::judge;
  req.prompt = prompts::judge(query, prediction, gold);
  req.temperature = 0.0;
  auto res = llm.complete(req);
  if (spent) *spent += res.usage;
  if (auto v = parse_judge_reply(res.text)) return *v;
  return {JudgeLabel::incomplete, "unparseable verdict"};
}

MetricReport evaluate_run(const paradigms::ParadigmRun& run, std::string_view gold,
                          std::string_view query_type, const EvalBackends& be,
                          const EvalConfig& config) {
  if (!be.token_embedder || !be.sentence_embedder || !be.judge) {
    throw ConfigError("evaluation requires token, sentence and judge backends");
  }
  MetricReport r;
  r.query_id = run.query_id;
  r.paradigm = run.paradigm;
  r.query_type = std::string(query_type);
  r.total_tokens = run.ledger.total();
  if (run.failed) {
    r.note = "run failed";
    return r;
  }
  try {
    r.semantic_f1 = semantic_f1(run.answer, gold, *be.token_embedder);
  } catch (const EmptyText&) {
    r.note = "empty text";
  }
  r.coverage = soft_coverage(run.answer, gold, *be.sentence_embedder);
  if (reports_faithfulness(run.paradigm)) {
    try {
      r.faith = faithfulness(run.answer, run.context, *be.sentence_embedder,
                             config.faithfulness_tau);
    } catch (const EmptyContext&) {
      r.faith = Faithfulness{};
    } catch (const EmptyAnswer&) {
      r.faith = Faithfulness{};
    }
  }
  try {
    r.judge = llm_judge(run.query, run.answer, gold, *be.judge);
  } catch (const BackendError& e) {
    spdlog::warn("judge unavailable for {} / {}: {}", run.query_id, to_string(run.paradigm),
                 e.what());
    r.note = "unevaluated";
  }
  return r;
}

std::vector<AggregateRow> aggregate(const std::vector<MetricReport>& reports,
                                    const std::string& dataset) {
  struct Acc {
    AggregateRow row;
    double f1 = 0, cov = 0, fh = 0, fs = 0, tokens = 0;
    std::size_t faith_n = 0;
  };
  std::map<std::tuple<ParadigmKind, std::string>, Acc> groups;
  auto add = [&](const MetricReport& r, const std::string& type) {
    Acc& a = groups[{r.paradigm, type}];
    a.row.dataset = dataset;
    a.row.paradigm = r.paradigm;
    a.row.query_type = type;
    ++a.row.runs;
    a.f1 += r.semantic_f1.f1;
    a.cov += r.coverage;
    a.tokens += static_cast<double>(r.total_tokens);
    if (r.faith) {
      a.fh += r.faith->hard;
      a.fs += r.faith->soft;
      ++a.faith_n;
    }
    if (!r.judge) ++a.row.unevaluated;
    else if (r.judge->label == JudgeLabel::correct) ++a.row.correct;
    else if (r.judge->label == JudgeLabel::incorrect) ++a.row.incorrect;
    else ++a.row.incomplete;
  };
  for (const MetricReport& r : reports) {
    add(r, r.query_type);
    if (r.query_type != "all") add(r, "all");
  }
  std::vector<AggregateRow> rows;
  for (auto& [key, a] : groups) {
    const double n = static_cast<double>(a.row.runs);
    a.row.semantic_f1 = a.f1 / n;
    a.row.coverage = a.cov / n;
    a.row.avg_total_tokens = a.tokens / n;
    if (a.faith_n) {
      a.row.faith_hard = a.fh / static_cast<double>(a.faith_n);
      a.row.faith_soft = a.fs / static_cast<double>(a.faith_n);
    }
    const std::size_t judged = a.row.runs - a.row.unevaluated;
    a.row.correct_pct =
        judged ? 100.0 * static_cast<double>(a.row.correct) / static_cast<double>(judged) : 0.0;
    rows.push_back(a.row);
  }
  return rows;
}

json to_json(const MetricReport& r) {
  json j = {{"query_id", r.query_id},
            {"paradigm", std::string(to_string(r.paradigm))},
            {"query_type", r.query_type},
            {"semantic_f1", r.semantic_f1.f1},
            {"precision", r.semantic_f1.precision},
            {"recall", r.semantic_f1.recall},
            {"coverage", r.coverage},
            {"total_tokens", r.total_tokens},
            {"faith_hard", r.faith ? json(r.faith->hard) : json(nullptr)},
            {"faith_soft", r.faith ? json(r.faith->soft) : json(nullptr)}};
  if (r.judge) {
    j["judge"] = {{"label", std::string(to_string(r.judge->label))},
                  {"rationale", r.judge->rationale}};
  } else {
    j["judge"] = nullptr;
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

MetricReport report_from_json(const json& j) {
  try {
    MetricReport r;
    r.query_id = j.at("query_id").get<std::string>();
    auto kind = paradigm_from_string(j.at("paradigm").get<std::string>());
    if (!kind) throw DataError("unknown paradigm in metric report");
    r.paradigm = *kind;
    r.query_type = j.value("query_type", std::string());
    r.semantic_f1.f1 = j.value("semantic_f1", 0.0);
    r.semantic_f1.precision = j.value("precision", 0.0);
    r.semantic_f1.recall = j.value("recall", 0.0);
    r.coverage = j.value("coverage", 0.0);
    r.total_tokens = j.value("total_tokens", std::int64_t{0});
    if (j.contains("faith_hard") && j["faith_hard"].is_number()) {
      r.faith = Faithfulness{j["faith_hard"].get<double>(), j.value("faith_soft", 0.0)};
    }
    if (j.contains("judge") && j["judge"].is_object()) {
      auto label = judge_label_from_string(j["judge"].at("label").get<std::string>());
      if (!label) throw DataError("unknown judge label in metric report");
      r.judge = JudgeVerdict{*label, j["judge"].value("rationale", std::string())};
    }
    r.note = j.value("note", std::string());
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed metric report: ") + e.what());
  }
}

json to_json(const AggregateRow& r) {
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  return {{"dataset", r.dataset},
          {"paradigm", std::string(to_string(r.paradigm))},
          {"query_type", r.query_type},
          {"runs", r.runs},
          {"sem_f1", r.semantic_f1},
          {"cov", r.coverage},
          {"faith_h", opt(r.faith_hard)},
          {"faith_s", opt(r.faith_soft)},
          {"correct", r.correct},
          {"incorrect", r.incorrect},
          {"incomplete", r.incomplete},
          {"unevaluated", r.unevaluated},
          {"avg_total_tokens", r.avg_total_tokens},
          {"llm_cor_pct", r.correct_pct}};
}

AggregateRow aggregate_row_from_json(const json& j) {
  try {
    AggregateRow r;
    r.dataset = j.value("dataset", std::string());
    auto kind = paradigm_from_string(j.at("paradigm").get<std::string>());
    if (!kind) throw DataError("unknown paradigm in aggregate row");
    r.paradigm = *kind;
    r.query_type = j.value("query_type", std::string("all"));
    r.runs = j.value("runs", std::size_t{0});
    r.semantic_f1 = j.value("sem_f1", 0.0);
    r.coverage = j.value("cov", 0.0);
    if (j.contains("faith_h") && j["faith_h"].is_number()) r.faith_hard = j["faith_h"].get<double>();
    if (j.contains("faith_s") && j["faith_s"].is_number()) r.faith_soft = j["faith_s"].get<double>();
    r.correct = j.value("correct", std::size_t{0});
    r.incorrect = j.value("incorrect", std::size_t{0});
    r.incomplete = j.value("incomplete", std::size_t{0});
    r.unevaluated = j.value("unevaluated", std::size_t{0});
    r.avg_total_tokens = j.value("avg_total_tokens", 0.0);
    r.correct_pct = j.value("llm_cor_pct", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed aggregate row: ") + e.what());
  }
}

}  // namespace ragbench::evalkit
