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

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ragbench::text {

// Byte range [begin, end) of one token inside the encoded text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits text into tokens whose byte ranges tile the input exactly, so any
// contiguous token slice decodes back to the original substring.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::vector<TokenSpan> split(std::string_view text) const = 0;

  std::size_t count(std::string_view text) const { return split(text).size(); }

  // Text of tokens [first, last) of a previously split string.
  static std::string_view decode(std::string_view text,
                                 const std::vector<TokenSpan>& spans,
                                 std::size_t first, std::size_t last);
};

// Default tokenizer: a token is an optional run of leading whitespace followed
// by either a run of word bytes (alphanumerics, '_' and any non-ASCII byte) or
// a single ASCII punctuation character. Trailing whitespace is attached to the
// final token.
class WordPunctTokenizer final : public Tokenizer {
 public:
  std::vector<TokenSpan> split(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

std::string trim(std::string_view s);

// Simple Unicode case folding for Latin, Greek and Cyrillic letters.
std::string casefold(std::string_view s);

// casefold + punctuation stripped + whitespace collapsed to single spaces.
std::string normalize_for_match(std::string_view s);

// Word tokens (whitespace trimmed, case-folded), punctuation-only tokens
// dropped.
std::vector<std::string> word_tokens(std::string_view s,
                                     const Tokenizer& tokenizer = default_tokenizer());

class SentenceSplitter {
 public:
  virtual ~SentenceSplitter() = default;
  virtual std::vector<std::string> split(std::string_view text) const = 0;
};

// Splits after '.', '?' or '!' when followed by whitespace, except after a
// known abbreviation. Sentences are trimmed; empty pieces are dropped.
class PunctuationSentenceSplitter final : public SentenceSplitter {
 public:
  PunctuationSentenceSplitter();
  explicit PunctuationSentenceSplitter(std::vector<std::string> abbreviations);

  std::vector<std::string> split(std::string_view text) const override;

 private:
  std::vector<std::string> abbreviations_;
};

const SentenceSplitter& default_sentence_splitter();

// True for empty text and stock refusal phrasings ("I cannot answer", ...).
bool is_refusal(std::string_view answer);

// Case-insensitive substring test on case-folded strings.
bool contains_folded(std::string_view haystack, std::string_view needle);

}  // namespace ragbench::text
