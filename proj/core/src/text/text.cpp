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

#include "ragbench/text.hpp"

#include <algorithm>
#include <cstdint>

namespace ragbench::text {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_word(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

// Returns the code point at `i` and advances it; malformed bytes are returned
// as-is (as values >= 0x110000 tagged with the raw byte).
std::uint32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto raw = [&] {
    ++i;
    return 0x110000u + b0;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int extra = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    extra = 1;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    extra = 2;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    extra = 3;
    cp = b0 & 0x07;
  } else {
    return raw();
  }
  if (i + extra >= s.size()) return raw();
  for (int k = 1; k <= extra; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return raw();
    cp = (cp << 6) | (b & 0x3F);
  }
  i += extra + 1;
  return cp;
}

void append_code_point(std::string& out, std::uint32_t cp) {
  if (cp >= 0x110000u) {
    out.push_back(static_cast<char>(cp - 0x110000u));
  } else if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::uint32_t fold_code_point(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp < 0x80) return cp;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
  if ((cp >= 0x0100 && cp <= 0x012F) || (cp >= 0x0132 && cp <= 0x0137) ||
      (cp >= 0x014A && cp <= 0x0177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if ((cp >= 0x0139 && cp <= 0x0148) || (cp >= 0x0179 && cp <= 0x017E)) {
    return (cp % 2 == 1) ? cp + 1 : cp;
  }
  if (cp == 0x0178) return 0x00FF;
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 32;
  if (cp == 0x03C2) return 0x03C3;  // final sigma
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 80;
  return cp;
}

}  // namespace

std::string_view Tokenizer::decode(std::string_view text,
                                   const std::vector<TokenSpan>& spans,
                                   std::size_t first, std::size_t last) {
  if (first >= last || first >= spans.size()) return {};
  last = std::min(last, spans.size());
  const std::size_t b = spans[first].begin;
  const std::size_t e = spans[last - 1].end;
  return text.substr(b, e - b);
}

std::vector<TokenSpan> WordPunctTokenizer::split(std::string_view text) const {
  std::vector<TokenSpan> spans;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const std::size_t start = i;
    while (i < n && is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i == n) {
      // Trailing whitespace belongs to the last token; whitespace-only text
      // has no tokens.
      if (!spans.empty()) spans.back().end = n;
      break;
    }
    if (is_word(static_cast<unsigned char>(text[i]))) {
      while (i < n && is_word(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      ++i;
    }
    spans.push_back({start, i});
  }
  return spans;
}

const Tokenizer& default_tokenizer() {
  static const WordPunctTokenizer tokenizer;
  return tokenizer;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string casefold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const std::uint32_t cp = next_code_point(s, i);
    if (cp == 0x00DF) {
      out += "ss";
      continue;
    }
    append_code_point(out, fold_code_point(cp));
  }
  return out;
}

std::string normalize_for_match(std::string_view s) {
  const std::string folded = casefold(s);
  std::string out;
  out.reserve(folded.size());
  bool pending_space = false;
  for (unsigned char c : folded) {
    if (is_word(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> word_tokens(std::string_view s,
                                     const Tokenizer& tokenizer) {
  std::vector<std::string> out;
  for (const TokenSpan& span : tokenizer.split(s)) {
    std::string tok = trim(s.substr(span.begin, span.end - span.begin));
    if (tok.empty()) continue;
    if (!std::any_of(tok.begin(), tok.end(),
                     [](char c) { return is_word(static_cast<unsigned char>(c)); })) {
      continue;
    }
    out.push_back(casefold(tok));
  }
  return out;
}

PunctuationSentenceSplitter::PunctuationSentenceSplitter()
    : PunctuationSentenceSplitter({"mr.", "mrs.", "ms.", "dr.", "prof.", "sr.",
                                   "jr.", "st.", "vs.", "etc.", "e.g.", "i.e.",
                                   "inc.", "ltd.", "co.", "fig.", "no.",
                                   "approx.", "dept.", "est."}) {}

PunctuationSentenceSplitter::PunctuationSentenceSplitter(
    std::vector<std::string> abbreviations)
    : abbreviations_(std::move(abbreviations)) {
  for (auto& a : abbreviations_) a = casefold(a);
}

std::vector<std::string> PunctuationSentenceSplitter::split(
    std::string_view text) const {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::string piece = trim(text.substr(start, end - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    if (i + 1 >= text.size() ||
        !is_space(static_cast<unsigned char>(text[i + 1]))) {
      continue;
    }
    if (c == '.') {
      // Word ending at this period, e.g. "Dr." or "e.g.".
      std::size_t w = i;
      while (w > start && !is_space(static_cast<unsigned char>(text[w - 1]))) --w;
      const std::string word = casefold(text.substr(w, i + 1 - w));
      if (std::find(abbreviations_.begin(), abbreviations_.end(), word) !=
          abbreviations_.end()) {
        continue;
      }
    }
    flush(i + 1);
  }
  flush(text.size());
  return out;
}

const SentenceSplitter& default_sentence_splitter() {
  static const PunctuationSentenceSplitter splitter;
  return splitter;
}

bool is_refusal(std::string_view answer) {
  const std::string n = normalize_for_match(answer);
  if (n.empty()) return true;
  static const char* const kPhrases[] = {"i cannot answer", "i can t answer", "i don t know",
                                         "i do not know",   "cannot be determined",
                                         "no answer"};
  return std::any_of(std::begin(kPhrases), std::end(kPhrases),
                     [&](const char* p) { return n.find(p) != std::string::npos; });
}

bool contains_folded(std::string_view haystack, std::string_view needle) {
  const std::string h = casefold(haystack);
  const std::string n = casefold(needle);
  if (n.empty()) return true;
  return h.find(n) != std::string::npos;
}

}  // namespace ragbench::text
