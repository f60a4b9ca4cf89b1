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

// Per-sentence external annotations (translations, word alignments, POS,
// dependency parses, named entities) and the checks applied to them.
//
// Record layout (one JSON object per line, `schema: 1`):
//
//   {"schema": 1, "id": "<sentence id>", "lang_pair": "de-en",
//    "cs": {<CsSentence: doc_id, index, text, tokens, labels, ...>},
//    "translation_l1": {"text", "tokens", "pos", "deps", "ner"},
//    "translation_en": {...},
//    "align_l1": [[cs_index, trans_index], ...],
//    "align_en": [[cs_index, trans_index], ...]}
//
// deps entries are [head, dependent, relation] over 0-based translation token
// indices; head -1 is the virtual root. ner entries are [begin, end) spans.

#ifndef ACS_BUNDLE_H_
#define ACS_BUNDLE_H_

#include <string>
#include <string_view>
#include <vector>

#include "acs/jsonl.h"
#include "acs/lid.h"

namespace acs::bundle {

inline constexpr int kSchemaVersion = 1;

struct TokenSpan {
  int begin = 0;
  int end = 0;  // exclusive

  int size() const { return end - begin; }
  bool Contains(int i) const { return i >= begin && i < end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct Dependency {
  int head = -1;  // -1: virtual root
  int dependent = 0;
  std::string relation;
};

struct Translation {
  std::string text;
  std::vector<std::string> tokens;
  std::vector<std::string> pos;  // UPOS, parallel to tokens
  std::vector<Dependency> deps;
  std::vector<TokenSpan> ner;

  // True if tokens a and b share a dependency edge.
  bool Linked(int a, int b) const;
};

struct AlignmentLink {
  int cs_index = 0;
  int trans_index = 0;
  friend bool operator==(const AlignmentLink&, const AlignmentLink&) = default;
};

struct AnnotationBundle {
  std::string id;
  std::string lang_pair;
  lid::CsSentence cs;
  Translation translation_l1;
  Translation translation_en;
  std::vector<AlignmentLink> align_l1;
  std::vector<AlignmentLink> align_en;

  const Translation& translation(lid::Language lang) const;
  const std::vector<AlignmentLink>& alignment(lid::Language lang) const;

  // Sorted translation indices aligned to a CS token in the given language's
  // translation.
  std::vector<int> AlignedTo(lid::Language lang, int cs_index) const;
  bool IsAligned(lid::Language lang, int trans_index) const;
};

AnnotationBundle BundleFromJson(const Json& j);
Json ToJson(const AnnotationBundle& b);

// Returns the bundle unchanged if every invariant holds; otherwise throws
// ValidationError naming the field and index.
AnnotationBundle ValidateBundle(AnnotationBundle bundle);

// CS tokens aligned into an NE span of either translation become
// Other(named_entity) unless they are already Other.
AnnotationBundle NerOverride(AnnotationBundle bundle);

struct MweSpan {
  std::string sentence_id;
  TokenSpan span;
  std::string entry;
};

// Multi-token expressions, tokenized with the ingest tokenizer and case-folded.
class MweLexicon {
 public:
  static MweLexicon Load(const std::string& path);
  static MweLexicon FromEntries(const std::vector<std::string>& entries);

  const std::vector<std::vector<std::string>>& entries() const {
    return entries_;
  }
  const std::vector<std::string>& surfaces() const { return surfaces_; }

 private:
  void Add(const std::string& entry);
  std::vector<std::vector<std::string>> entries_;
  std::vector<std::string> surfaces_;
};

// Leftmost-longest, non-overlapping matches.
std::vector<MweSpan> TagMwes(const lid::CsSentence& sentence,
                             const MweLexicon& lexicon);
std::vector<MweSpan> TagMwes(const std::string& sentence_id,
                             const std::vector<std::string>& tokens,
                             const MweLexicon& lexicon);

// Edit distance over unicode scalar values, unit costs.
std::size_t Levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t Levenshtein(std::string_view a, std::string_view b);

struct ResidueGateConfig {
  std::size_t min_distance = 5;
  std::string reject_pos = "X";
};

enum class GateResult { kKeep, kTranslationResidue, kXTag };

GateResult TranslationCsResidueCheck(const AnnotationBundle& bundle,
                                     const ResidueGateConfig& config = {});
bool TranslationCsResidueGate(const AnnotationBundle& bundle,
                              const ResidueGateConfig& config = {});

}  // namespace acs::bundle

#endif  // ACS_BUNDLE_H_
