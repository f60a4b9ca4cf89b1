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

// Minimal-pair generation: a single word adjacent to a switch point is
// replaced by its aligned translation in the other language.

#ifndef ACS_PAIRGEN_H_
#define ACS_PAIRGEN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acs/bundle.h"
#include "acs/jsonl.h"
#include "acs/lid.h"

namespace acs::pairgen {

struct SwitchPoint {
  int left_index = 0;
  int right_index = 0;
  bool adjacent = false;  // right_index == left_index + 1

  friend bool operator==(const SwitchPoint&, const SwitchPoint&) = default;
};

// Other-labeled tokens are transparent when locating the two sides.
std::vector<SwitchPoint> FindSwitchPoints(std::span<const lid::CsLabel> labels);

enum class Side { kLeft, kRight };

struct Manipulation {
  Side side = Side::kLeft;
  bundle::TokenSpan removed;
  std::vector<std::string> inserted;
  std::vector<std::string> inserted_pos;
  lid::Language inserted_language = lid::Language::kOther;
  // Where the inserted tokens come from in the inserted language's translation.
  bundle::TokenSpan translation_span;
  std::vector<bundle::AlignmentLink> links;
};

// Requires at least one switch point (throws DataError otherwise).
bool IsIntegrative(const bundle::AnnotationBundle& bundle);

// `mwe_lexicon`, when given, is also matched against each manipulated
// sentence so an inserted span can never cut through an expression.
std::vector<Manipulation> EnumerateCandidates(
    const bundle::AnnotationBundle& bundle,
    const std::vector<bundle::MweSpan>& mwes,
    const bundle::MweLexicon* mwe_lexicon = nullptr);

// Throws ValidationError on an invalid or empty span.
lid::CsSentence ApplyManipulation(const lid::CsSentence& sentence,
                                  const Manipulation& manipulation);

struct LexicalDifference {
  std::string removed;   // case-folded
  std::string inserted;  // case-folded

  std::string Key() const { return removed + "\x1f" + inserted; }
  friend bool operator==(const LexicalDifference&,
                         const LexicalDifference&) = default;
};

struct CharSpan {
  std::size_t begin = 0;  // unicode scalar offsets
  std::size_t end = 0;
};

struct MinimalPair {
  std::string pair_id;
  std::string lang_pair;
  lid::CsSentence observed;
  lid::CsSentence manipulated;
  Manipulation manipulation;
  std::optional<std::string> changed_word_pos;
  // Changed word aligned to a single identical word in its own translation.
  bool pos_eligible = false;
  LexicalDifference lexical_difference;
  std::string doc_id;
  std::string sentence_id;
  std::uint64_t seed = 0;
  CharSpan observed_span;
  CharSpan manipulated_span;
};

MinimalPair MakePair(const bundle::AnnotationBundle& bundle,
                     const Manipulation& manipulation, std::uint64_t seed);

bool SwitchCountGate(const MinimalPair& pair);

Json ToJson(const MinimalPair& pair);
MinimalPair PairFromJson(const Json& j);

struct SentenceCandidates {
  std::string doc_id;
  int index = 0;
  std::string sentence_id;
  std::vector<MinimalPair> candidates;
};

struct AssembleResult {
  std::vector<MinimalPair> pairs;
  std::size_t skipped_duplicate = 0;  // every candidate's difference was used
  std::size_t skipped_cap = 0;
};

// One pair per sentence, chosen uniformly (seeded per sentence id); a choice
// whose lexical difference was already used falls through to the remaining
// candidates in shuffled order. Sentences are processed by (doc id, index).
AssembleResult AssembleCorpus(std::vector<SentenceCandidates> sentences,
                              std::uint64_t seed, std::size_t cap);

struct GenerateOptions {
  std::uint64_t seed = 0;
  std::size_t cap = 1000;
  std::string lang_pair;
  const bundle::MweLexicon* mwe_lexicon = nullptr;
};

struct GenerateResult {
  std::vector<MinimalPair> pairs;
  std::size_t input = 0;
  // Reason -> number of source sentences that produced no pair.
  std::map<std::string, std::size_t> rejections;
};

// Runs NER override, the integrativeness check, candidate enumeration, the
// switch-count gate and corpus assembly over validated bundles.
GenerateResult GeneratePairs(const std::vector<bundle::AnnotationBundle>& bundles,
                             const GenerateOptions& options);

}  // namespace acs::pairgen

#endif  // ACS_PAIRGEN_H_
