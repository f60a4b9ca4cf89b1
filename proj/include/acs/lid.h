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

// Token-level code-switching labels and the admission heuristics that run on
// top of them.

#ifndef ACS_LID_H_
#define ACS_LID_H_

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acs/ingest.h"
#include "acs/jsonl.h"

namespace acs::lid {

enum class Language { kLang1, kEnglish, kOther };

enum class OtherReason { kNone, kMixed, kNamedEntity, kNeutral, kUnknown };

struct CsLabel {
  Language language = Language::kOther;
  OtherReason reason = OtherReason::kNeutral;

  static CsLabel Lang1() { return {Language::kLang1, OtherReason::kNone}; }
  static CsLabel English() { return {Language::kEnglish, OtherReason::kNone}; }
  static CsLabel Other(OtherReason r) { return {Language::kOther, r}; }

  bool is_other() const { return language == Language::kOther; }
  friend bool operator==(const CsLabel&, const CsLabel&) = default;
};

// "lang1", "english", "other:<reason>".
std::string ToString(const CsLabel& label);
CsLabel LabelFromString(std::string_view s);
Language Opposite(Language lang);

struct CsSentence {
  ingest::SentenceRecord record;
  std::vector<CsLabel> labels;

  const std::vector<std::string>& tokens() const { return record.tokens; }
  std::string Id() const { return record.Id(); }
};

CsSentence CsSentenceFromJson(const Json& j);
Json ToJson(const CsSentence& s);

struct LexiconSet {
  ingest::WordSet lang1_words;
  ingest::WordSet english_words;
  ingest::WordSet borrowings_to_english;
  ingest::WordSet borrowings_from_english;
  ingest::WordSet homographs;
  // Sentences holding a word with one of these characters that is missing
  // from the Lang1 wordlist are rejected (German umlauts, for instance).
  std::u32string lang1_only_chars;

  // Recomputes homographs as the Lang1/English intersection.
  void ComputeHomographs();
  // Drops every word whose dictionary translation is the identical string from
  // both wordlists. Entries are (lang1 word, english word).
  void RemoveDictionaryIdenticals(
      const std::vector<std::pair<std::string, std::string>>& dictionary);

  // Manifest: JSON object with keys lang1, english (lists of paths),
  // borrowings_to_english, borrowings_from_english, homographs, dictionary
  // (optional paths) and lang1_only_chars (optional string). Relative paths
  // resolve against the manifest's directory.
  static LexiconSet LoadManifest(const std::string& manifest_path);
};

// Tab-separated "lang1<TAB>english" lines.
std::vector<std::pair<std::string, std::string>> LoadDictionary(
    const std::string& path);

CsSentence TagTokens(const ingest::SentenceRecord& sentence,
                     const LexiconSet& lexicons);
CsSentence ReassignBorrowings(CsSentence sentence, const LexiconSet& lexicons);
// Marks windows of >= 2 alphabetic tokens that start and end capitalized,
// are more than `threshold` capitalized, and hold a capital not forced by
// position (first word) or by the pronoun "I".
CsSentence MarkNamedEntityRuns(CsSentence sentence, double threshold = 0.75);
bool UnknownGate(const CsSentence& sentence, double max_ratio = 0.5);
bool ForeignCharGate(const CsSentence& sentence, const LexiconSet& lexicons);

// Label for a single token under the Chinese character rule.
CsLabel HanLabel(std::string_view token);
CsSentence HanLid(const ingest::SentenceRecord& sentence);

struct LanguagePrediction {
  std::string language;
  double confidence = 0.0;
};

class MonoLidBackend {
 public:
  virtual ~MonoLidBackend() = default;
  virtual LanguagePrediction Predict(std::string_view text) = 0;
  virtual std::string Name() const = 0;
};

// Character-trigram cosine classifier over per-language seed text. A test
// stand-in for a real monolingual identifier.
class TrigramProfileClassifier : public MonoLidBackend {
 public:
  void AddLanguage(const std::string& code, std::string_view seed_text);
  // Loads every <code>.txt in `dir`.
  static TrigramProfileClassifier FromDirectory(const std::string& dir);

  LanguagePrediction Predict(std::string_view text) override;
  std::string Name() const override { return "trigram"; }

 private:
  using Profile = std::map<std::u32string, double>;
  static Profile BuildProfile(std::string_view text);
  std::vector<std::pair<std::string, Profile>> profiles_;
};

// Lang1 tokens joined by spaces, or "" if there are none.
std::string Lang1String(const CsSentence& sentence);
bool ConsistencyCheck(const CsSentence& sentence, MonoLidBackend& backend,
                      std::string_view claimed_language);

// At least one switch point plus a run of two adjacent tokens of each language.
bool CsQualification(const CsSentence& sentence);

}  // namespace acs::lid

#endif  // ACS_LID_H_
