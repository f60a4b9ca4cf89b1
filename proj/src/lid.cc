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

#include "acs/lid.h"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "acs/error.h"
#include "acs/pairgen.h"
#include "acs/text.h"

namespace acs::lid {

namespace fs = std::filesystem;

std::string ToString(const CsLabel& label) {
  switch (label.language) {
    case Language::kLang1:
      return "lang1";
    case Language::kEnglish:
      return "english";
    case Language::kOther:
      break;
  }
  switch (label.reason) {
    case OtherReason::kMixed:
      return "other:mixed";
    case OtherReason::kNamedEntity:
      return "other:named_entity";
    case OtherReason::kUnknown:
      return "other:unknown";
    case OtherReason::kNeutral:
    case OtherReason::kNone:
      break;
  }
  return "other:neutral";
}

CsLabel LabelFromString(std::string_view s) {
  if (s == "lang1") return CsLabel::Lang1();
  if (s == "english") return CsLabel::English();
  if (s == "other:neutral" || s == "other") {
    return CsLabel::Other(OtherReason::kNeutral);
  }
  if (s == "other:mixed") return CsLabel::Other(OtherReason::kMixed);
  if (s == "other:named_entity") {
    return CsLabel::Other(OtherReason::kNamedEntity);
  }
  if (s == "other:unknown") return CsLabel::Other(OtherReason::kUnknown);
  throw DataError("unknown CS label '" + std::string(s) + "'");
}

Language Opposite(Language lang) {
  switch (lang) {
    case Language::kLang1:
      return Language::kEnglish;
    case Language::kEnglish:
      return Language::kLang1;
    case Language::kOther:
      break;
  }
  return Language::kOther;
}

CsSentence CsSentenceFromJson(const Json& j) {
  CsSentence s;
  s.record = ingest::SentenceFromJson(j);
  try {
    for (const auto& l : j.at("labels")) {
      s.labels.push_back(LabelFromString(l.get<std::string>()));
    }
  } catch (const Json::exception& e) {
    throw DataError("sentence " + s.Id() + ": malformed labels: " + e.what());
  }
  if (s.labels.size() != s.record.tokens.size()) {
    throw DataError("sentence " + s.Id() + ": " +
                    std::to_string(s.labels.size()) + " labels for " +
                    std::to_string(s.record.tokens.size()) + " tokens");
  }
  return s;
}

Json ToJson(const CsSentence& s) {
  Json j = ingest::ToJson(s.record);
  Json labels = Json::array();
  for (const auto& l : s.labels) labels.push_back(ToString(l));
  j["labels"] = std::move(labels);
  return j;
}

void LexiconSet::ComputeHomographs() {
  homographs = ingest::WordSet();
  for (const auto& w : lang1_words.words()) {
    if (english_words.words().count(w)) homographs.Insert(w);
  }
}

void LexiconSet::RemoveDictionaryIdenticals(
    const std::vector<std::pair<std::string, std::string>>& dictionary) {
  for (const auto& [l1, en] : dictionary) {
    if (text::FoldCase(l1) == text::FoldCase(en)) {
      lang1_words.Erase(l1);
      english_words.Erase(l1);
    }
  }
  ComputeHomographs();
}

std::vector<std::pair<std::string, std::string>> LoadDictionary(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(ReadFile(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::Trim(line).empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 'lang1<TAB>english'");
    }
    entries.emplace_back(text::Trim(line.substr(0, tab)),
                         text::Trim(line.substr(tab + 1)));
  }
  return entries;
}

LexiconSet LexiconSet::LoadManifest(const std::string& manifest_path) {
  Json m;
  try {
    m = Json::parse(ReadFile(manifest_path));
  } catch (const Json::parse_error& e) {
    throw DataError(manifest_path + ": " + e.what());
  }
  const fs::path base = fs::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return (path.is_absolute() ? path : base / path).string();
  };
  auto load_into = [&](const char* key, ingest::WordSet* set) {
    if (!m.contains(key)) return;
    const Json& v = m[key];
    std::vector<std::string> paths =
        v.is_array() ? v.get<std::vector<std::string>>()
                     : std::vector<std::string>{v.get<std::string>()};
    for (const auto& p : paths) {
      const ingest::WordSet loaded = ingest::WordSet::Load(resolve(p));
      for (const auto& w : loaded.words()) set->Insert(w);
    }
  };
  LexiconSet lex;
  load_into("lang1", &lex.lang1_words);
  load_into("english", &lex.english_words);
  load_into("borrowings_to_english", &lex.borrowings_to_english);
  load_into("borrowings_from_english", &lex.borrowings_from_english);
  if (m.contains("dictionary")) {
    lex.RemoveDictionaryIdenticals(
        LoadDictionary(resolve(m["dictionary"].get<std::string>())));
  }
  lex.ComputeHomographs();
  // Explicit homograph lists only count where the word is in both lists.
  if (m.contains("homographs")) {
    ingest::WordSet extra;
    load_into("homographs", &extra);
    for (const auto& w : extra.words()) {
      if (lex.lang1_words.Contains(w) && lex.english_words.Contains(w)) {
        lex.homographs.Insert(w);
      }
    }
  }
  if (m.contains("lang1_only_chars")) {
    lex.lang1_only_chars = text::Decode(m["lang1_only_chars"].get<std::string>());
  }
  return lex;
}

CsSentence TagTokens(const ingest::SentenceRecord& sentence,
                     const LexiconSet& lexicons) {
  CsSentence out{sentence, {}};
  out.labels.reserve(sentence.tokens.size());
  for (const std::string& tok : sentence.tokens) {
    if (!text::IsAlphabeticWord(tok)) {
      out.labels.push_back(CsLabel::Other(OtherReason::kNeutral));
      continue;
    }
    const bool in_l1 = lexicons.lang1_words.Contains(tok);
    const bool in_en = lexicons.english_words.Contains(tok);
    if (lexicons.homographs.Contains(tok) || in_l1 == in_en) {
      out.labels.push_back(CsLabel::Other(OtherReason::kUnknown));
    } else {
      out.labels.push_back(in_l1 ? CsLabel::Lang1() : CsLabel::English());
    }
  }
  return out;
}

CsSentence ReassignBorrowings(CsSentence sentence,
                              const LexiconSet& lexicons) {
  for (std::size_t i = 0; i < sentence.labels.size(); ++i) {
    const std::string& tok = sentence.record.tokens[i];
    const Language lang = sentence.labels[i].language;
    if ((lang == Language::kLang1 &&
         lexicons.borrowings_from_english.Contains(tok)) ||
        (lang == Language::kEnglish &&
         lexicons.borrowings_to_english.Contains(tok))) {
      sentence.labels[i] = CsLabel::Other(OtherReason::kNeutral);
    }
  }
  return sentence;
}

CsSentence MarkNamedEntityRuns(CsSentence sentence, double threshold) {
  const auto& tokens = sentence.record.tokens;
  const std::size_t n = tokens.size();
  std::vector<bool> mark(n, false);
  // Capitals that orthography forces carry no evidence of a name: the first
  // word of the sentence and the English pronoun.
  std::vector<bool> forced(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (text::IsAlphabeticWord(tokens[i])) {
      forced[i] = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens[i] == "I") forced[i] = true;
  }
  std::size_t run_begin = 0;
  while (run_begin < n) {
    if (!text::IsAlphabeticWord(tokens[run_begin])) {
      ++run_begin;
      continue;
    }
    std::size_t run_end = run_begin;
    while (run_end < n && text::IsAlphabeticWord(tokens[run_end])) ++run_end;
    // Windows inside the run that start and end on a capitalized word and
    // hold at least one unforced capital.
    for (std::size_t i = run_begin; i < run_end; ++i) {
      if (!text::StartsUpper(tokens[i])) continue;
      int caps = 0;
      bool evidence = false;
      for (std::size_t j = i; j < run_end; ++j) {
        const bool upper = text::StartsUpper(tokens[j]);
        if (upper) ++caps;
        if (upper && !forced[j]) evidence = true;
        const std::size_t len = j - i + 1;
        if (len >= 2 && upper && evidence &&
            static_cast<double>(caps) / static_cast<double>(len) > threshold) {
          for (std::size_t k = i; k <= j; ++k) mark[k] = true;
        }
      }
    }
    run_begin = run_end;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mark[i]) sentence.labels[i] = CsLabel::Other(OtherReason::kNamedEntity);
  }
  return sentence;
}

bool UnknownGate(const CsSentence& sentence, double max_ratio) {
  std::size_t alphabetic = 0;
  std::size_t unknown = 0;
  for (std::size_t i = 0; i < sentence.labels.size(); ++i) {
    if (!text::IsAlphabeticWord(sentence.record.tokens[i])) continue;
    ++alphabetic;
    if (sentence.labels[i] == CsLabel::Other(OtherReason::kUnknown)) ++unknown;
  }
  if (alphabetic == 0) return false;
  return static_cast<double>(unknown) / static_cast<double>(alphabetic) <
         max_ratio;
}

bool ForeignCharGate(const CsSentence& sentence, const LexiconSet& lexicons) {
  if (lexicons.lang1_only_chars.empty()) return true;
  for (const std::string& tok : sentence.record.tokens) {
    const std::u32string cps = text::Decode(tok);
    const bool has_marked = std::any_of(cps.begin(), cps.end(), [&](char32_t c) {
      return lexicons.lang1_only_chars.find(c) != std::u32string::npos;
    });
    if (has_marked && !lexicons.lang1_words.Contains(tok)) return false;
  }
  return true;
}

CsLabel HanLabel(std::string_view token) {
  bool han = false;
  bool latin = false;
  bool other = false;
  for (char32_t cp : text::Decode(token)) {
    if (text::IsHan(cp)) {
      han = true;
    } else if (text::IsAllLatinLetters(text::Encode(std::u32string(1, cp)))) {
      latin = true;
    } else if (!text::IsWordInternalMark(cp)) {
      other = true;
    }
  }
  if (han && latin) return CsLabel::Other(OtherReason::kMixed);
  if (han && !other) return CsLabel::Lang1();
  if (latin && !other) return CsLabel::English();
  return CsLabel::Other(OtherReason::kNeutral);
}

CsSentence HanLid(const ingest::SentenceRecord& sentence) {
  CsSentence out{sentence, {}};
  for (const auto& tok : sentence.tokens) out.labels.push_back(HanLabel(tok));
  return out;
}

TrigramProfileClassifier::Profile TrigramProfileClassifier::BuildProfile(
    std::string_view raw) {
  Profile profile;
  std::u32string word;
  auto flush = [&]() {
    if (word.empty()) return;
    std::u32string padded = U" " + word + U" ";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      profile[padded.substr(i, 3)] += 1.0;
    }
    word.clear();
  };
  for (char32_t cp : text::Decode(text::FoldCase(raw))) {
    if (text::IsLetter(cp)) {
      word.push_back(cp);
    } else {
      flush();
    }
  }
  flush();
  return profile;
}

void TrigramProfileClassifier::AddLanguage(const std::string& code,
                                           std::string_view seed_text) {
  profiles_.emplace_back(code, BuildProfile(seed_text));
}

TrigramProfileClassifier TrigramProfileClassifier::FromDirectory(
    const std::string& dir) {
  TrigramProfileClassifier clf;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    clf.AddLanguage(f.stem().string(), ReadFile(f.string()));
  }
  if (clf.profiles_.empty()) {
    throw DataError("no language seed files (*.txt) in " + dir);
  }
  return clf;
}

LanguagePrediction TrigramProfileClassifier::Predict(std::string_view text) {
  const Profile query = BuildProfile(text);
  double query_norm = 0.0;
  for (const auto& [_, v] : query) query_norm += v * v;
  LanguagePrediction best{"und", 0.0};
  if (query_norm == 0.0) return best;
  for (const auto& [code, profile] : profiles_) {
    double dot = 0.0;
    double norm = 0.0;
    for (const auto& [_, v] : profile) norm += v * v;
    for (const auto& [gram, v] : query) {
      auto it = profile.find(gram);
      if (it != profile.end()) dot += v * it->second;
    }
    const double cosine =
        norm > 0.0 ? dot / std::sqrt(norm * query_norm) : 0.0;
    if (cosine > best.confidence) best = {code, cosine};
  }
  return best;
}

std::string Lang1String(const CsSentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.labels.size(); ++i) {
    if (sentence.labels[i].language != Language::kLang1) continue;
    if (!out.empty()) out += ' ';
    out += sentence.record.tokens[i];
  }
  return out;
}

bool ConsistencyCheck(const CsSentence& sentence, MonoLidBackend& backend,
                      std::string_view claimed_language) {
  const std::string lang1 = Lang1String(sentence);
  if (lang1.empty()) return false;
  const LanguagePrediction p = backend.Predict(lang1);
  return text::FoldCase(p.language) == text::FoldCase(claimed_language);
}

bool CsQualification(const CsSentence& sentence) {
  if (pairgen::FindSwitchPoints(sentence.labels).empty()) return false;
  auto has_run = [&](Language lang) {
    std::size_t run = 0;
    for (const auto& l : sentence.labels) {
      run = l.language == lang ? run + 1 : 0;
      if (run >= 2) return true;
    }
    return false;
  };
  return has_run(Language::kLang1) && has_run(Language::kEnglish);
}

}  // namespace acs::lid
