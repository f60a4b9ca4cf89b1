// Copyright 2026 The ACS Authors
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

// Raw text normalization, sentence segmentation, tokenization and the
// admission gates applied before token-level language identification.

#ifndef ACS_INGEST_H_
#define ACS_INGEST_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "acs/jsonl.h"

namespace acs::ingest {

enum class Domain { kSocial, kSpoken };

struct RawDocument {
  std::string id;
  std::string text;
  std::string lang_claim;
  Domain domain = Domain::kSocial;
};

RawDocument DocumentFromJson(const Json& j);
Json ToJson(const RawDocument& doc);

struct SentenceRecord {
  std::string doc_id;
  int index = 0;
  std::string text;
  std::vector<std::string> tokens;
  // Byte range of `text` inside the normalized document.
  std::size_t byte_begin = 0;
  std::size_t byte_end = 0;
  // Carried through from the document for the second LID pass.
  std::string lang_claim;

  std::string Id() const { return doc_id + "#" + std::to_string(index); }
};

SentenceRecord SentenceFromJson(const Json& j);
Json ToJson(const SentenceRecord& s);

// Mention runs become "@USER", URLs become "HTTPURL". Idempotent.
std::string Normalize(std::string_view raw_text);

// Case-folded set of surface forms, one per line in its file.
class WordSet {
 public:
  WordSet() = default;
  explicit WordSet(std::unordered_set<std::string> folded)
      : words_(std::move(folded)) {}

  static WordSet Load(const std::string& path);
  static WordSet FromWords(std::span<const std::string> words);

  bool Contains(std::string_view surface) const;
  void Insert(std::string_view surface);
  void Erase(std::string_view surface);
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

// False iff any token (case-insensitively) is in the lexicon.
bool ObscenityGate(std::span<const std::string> tokens,
                   const WordSet& obscene_lexicon);

struct TokenizerOptions {
  // Splits a run of han characters into words. Unset: one token per character.
  std::function<std::vector<std::string>(std::string_view)> han_tokenizer;
};

std::vector<std::string> Tokenize(std::string_view text,
                                  const TokenizerOptions& options = {});
std::string Detokenize(std::span<const std::string> tokens);

// Locates each token in `text` in order. Returns byte ranges, or an empty
// vector if the tokens are not an in-order cover of text's non-space content.
std::vector<std::pair<std::size_t, std::size_t>> LocateTokens(
    std::string_view text, std::span<const std::string> tokens);

// Sentence boundaries as byte ranges over the normalized document.
class SegmentationBackend {
 public:
  virtual ~SegmentationBackend() = default;
  virtual std::vector<std::pair<std::size_t, std::size_t>> Boundaries(
      std::string_view text) = 0;
  virtual std::string Name() const = 0;
};

// Splits after . ! ? … when followed by whitespace and an uppercase letter or
// ideograph, and after 。！？ unconditionally.
class FallbackSegmenter : public SegmentationBackend {
 public:
  std::vector<std::pair<std::size_t, std::size_t>> Boundaries(
      std::string_view text) override;
  std::string Name() const override { return "fallback"; }
};

// Each boundary's start opens a sentence that runs to the next start (or to
// the end of the document), so sentences always cover the document.
std::vector<SentenceRecord> Segment(const std::string& doc_id,
                                    std::string_view document_text,
                                    SegmentationBackend& backend,
                                    const TokenizerOptions& options = {});

struct LengthLimits {
  std::size_t max_chars = 200;
  std::size_t min_tokens = 6;
};

// Character length counts unicode scalar values.
bool LengthGate(const SentenceRecord& sentence, const LengthLimits& limits = {});

}  // namespace acs::ingest

#endif  // ACS_INGEST_H_
