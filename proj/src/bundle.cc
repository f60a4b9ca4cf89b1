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

#include "acs/bundle.h"

#include <algorithm>
#include <sstream>

#include "acs/error.h"
#include "acs/ingest.h"
#include "acs/text.h"

namespace acs::bundle {

using lid::Language;

bool Translation::Linked(int a, int b) const {
  return std::any_of(deps.begin(), deps.end(), [&](const Dependency& d) {
    return (d.head == a && d.dependent == b) ||
           (d.head == b && d.dependent == a);
  });
}

const Translation& AnnotationBundle::translation(Language lang) const {
  return lang == Language::kLang1 ? translation_l1 : translation_en;
}

const std::vector<AlignmentLink>& AnnotationBundle::alignment(
    Language lang) const {
  return lang == Language::kLang1 ? align_l1 : align_en;
}

std::vector<int> AnnotationBundle::AlignedTo(Language lang,
                                             int cs_index) const {
  std::vector<int> out;
  for (const auto& link : alignment(lang)) {
    if (link.cs_index == cs_index) out.push_back(link.trans_index);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool AnnotationBundle::IsAligned(Language lang, int trans_index) const {
  const auto& links = alignment(lang);
  return std::any_of(links.begin(), links.end(), [&](const AlignmentLink& l) {
    return l.trans_index == trans_index;
  });
}

namespace {

Translation TranslationFromJson(const Json& j) {
  Translation t;
  t.text = j.value("text", "");
  t.tokens = j.value("tokens", std::vector<std::string>{});
  t.pos = j.value("pos", std::vector<std::string>{});
  for (const auto& d : j.value("deps", Json::array())) {
    t.deps.push_back({d.at(0).get<int>(), d.at(1).get<int>(),
                      d.size() > 2 ? d.at(2).get<std::string>() : ""});
  }
  for (const auto& s : j.value("ner", Json::array())) {
    t.ner.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
  }
  if (t.text.empty() && !t.tokens.empty()) t.text = ingest::Detokenize(t.tokens);
  return t;
}

Json ToJson(const Translation& t) {
  Json deps = Json::array();
  for (const auto& d : t.deps) deps.push_back({d.head, d.dependent, d.relation});
  Json ner = Json::array();
  for (const auto& s : t.ner) ner.push_back({s.begin, s.end});
  return {{"text", t.text},
          {"tokens", t.tokens},
          {"pos", t.pos},
          {"deps", deps},
          {"ner", ner}};
}

std::vector<AlignmentLink> LinksFromJson(const Json& j) {
  std::vector<AlignmentLink> links;
  for (const auto& l : j) links.push_back({l.at(0).get<int>(), l.at(1).get<int>()});
  return links;
}

Json LinksToJson(const std::vector<AlignmentLink>& links) {
  Json out = Json::array();
  for (const auto& l : links) out.push_back({l.cs_index, l.trans_index});
  return out;
}

void ValidateTranslation(const Translation& t, const std::string& suffix) {
  const int n = static_cast<int>(t.tokens.size());
  if (t.pos.size() != t.tokens.size()) {
    throw ValidationError("pos_" + suffix + ": " + std::to_string(t.pos.size()) +
                          " tags for " + std::to_string(n) + " tokens");
  }
  const std::string deps_field = "deps_" + suffix;
  std::vector<int> head(n, -2);
  for (std::size_t i = 0; i < t.deps.size(); ++i) {
    const Dependency& d = t.deps[i];
    if (d.dependent < 0 || d.dependent >= n) {
      throw ValidationError(deps_field + " edge " + std::to_string(i) +
                            ": dependent " + std::to_string(d.dependent) +
                            " out of range");
    }
    if (d.head < -1 || d.head >= n) {
      throw ValidationError(deps_field + " edge " + std::to_string(i) +
                            ": head " + std::to_string(d.head) +
                            " out of range");
    }
    if (head[d.dependent] != -2) {
      throw ValidationError(deps_field + ": not a tree (token " +
                            std::to_string(d.dependent) +
                            " has more than one head)");
    }
    head[d.dependent] = d.head;
  }
  for (int i = 0; i < n; ++i) {
    if (head[i] == -2) {
      throw ValidationError(deps_field + ": not a tree (token " +
                            std::to_string(i) + " has no head)");
    }
  }
  // Every chain of heads must reach the virtual root within n steps.
  for (int i = 0; i < n; ++i) {
    int cur = i;
    int steps = 0;
    while (cur != -1 && steps <= n) {
      cur = head[cur];
      ++steps;
    }
    if (cur != -1) {
      throw ValidationError(deps_field + ": not a tree (cycle through token " +
                            std::to_string(i) + ")");
    }
  }
  for (std::size_t i = 0; i < t.ner.size(); ++i) {
    const TokenSpan& s = t.ner[i];
    if (s.begin < 0 || s.end > n || s.begin >= s.end) {
      throw ValidationError("ner_" + suffix + " span " + std::to_string(i) +
                            ": [" + std::to_string(s.begin) + "," +
                            std::to_string(s.end) + ") out of range");
    }
  }
}

void ValidateLinks(const std::vector<AlignmentLink>& links,
                   const std::string& field, int cs_n, int trans_n) {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].cs_index < 0 || links[i].cs_index >= cs_n) {
      throw ValidationError(field + " link " + std::to_string(i) +
                            ": cs_index " + std::to_string(links[i].cs_index) +
                            " out of range");
    }
    if (links[i].trans_index < 0 || links[i].trans_index >= trans_n) {
      throw ValidationError(field + " link " + std::to_string(i) +
                            ": trans_index " +
                            std::to_string(links[i].trans_index) +
                            " out of range");
    }
  }
}

}  // namespace

AnnotationBundle BundleFromJson(const Json& j) {
  AnnotationBundle b;
  try {
    const int schema = j.value("schema", kSchemaVersion);
    if (schema != kSchemaVersion) {
      throw ValidationError("schema " + std::to_string(schema) +
                            " not supported (expected " +
                            std::to_string(kSchemaVersion) + ")");
    }
    b.cs = lid::CsSentenceFromJson(j.at("cs"));
    b.id = j.value("id", b.cs.Id());
    b.lang_pair = j.value("lang_pair", "");
    b.translation_l1 = TranslationFromJson(j.at("translation_l1"));
    b.translation_en = TranslationFromJson(j.at("translation_en"));
    b.align_l1 = LinksFromJson(j.value("align_l1", Json::array()));
    b.align_en = LinksFromJson(j.value("align_en", Json::array()));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed bundle record: ") + e.what());
  }
  return b;
}

Json ToJson(const AnnotationBundle& b) {
  return {{"schema", kSchemaVersion},
          {"id", b.id},
          {"lang_pair", b.lang_pair},
          {"cs", lid::ToJson(b.cs)},
          {"translation_l1", ToJson(b.translation_l1)},
          {"translation_en", ToJson(b.translation_en)},
          {"align_l1", LinksToJson(b.align_l1)},
          {"align_en", LinksToJson(b.align_en)}};
}

AnnotationBundle ValidateBundle(AnnotationBundle bundle) {
  const int cs_n = static_cast<int>(bundle.cs.tokens().size());
  if (bundle.cs.labels.size() != bundle.cs.tokens().size()) {
    throw ValidationError("labels: " + std::to_string(bundle.cs.labels.size()) +
                          " labels for " + std::to_string(cs_n) + " tokens");
  }
  ValidateTranslation(bundle.translation_l1, "l1");
  ValidateTranslation(bundle.translation_en, "en");
  ValidateLinks(bundle.align_l1, "align_l1", cs_n,
                static_cast<int>(bundle.translation_l1.tokens.size()));
  ValidateLinks(bundle.align_en, "align_en", cs_n,
                static_cast<int>(bundle.translation_en.tokens.size()));
  return bundle;
}

AnnotationBundle NerOverride(AnnotationBundle bundle) {
  for (Language lang : {Language::kLang1, Language::kEnglish}) {
    const Translation& t = bundle.translation(lang);
    for (const auto& link : bundle.alignment(lang)) {
      const bool in_entity =
          std::any_of(t.ner.begin(), t.ner.end(), [&](const TokenSpan& s) {
            return s.Contains(link.trans_index);
          });
      auto& label = bundle.cs.labels[link.cs_index];
      if (in_entity && !label.is_other()) {
        label = lid::CsLabel::Other(lid::OtherReason::kNamedEntity);
      }
    }
  }
  return bundle;
}

void MweLexicon::Add(const std::string& entry) {
  std::vector<std::string> toks = ingest::Tokenize(entry);
  if (toks.size() < 2) return;
  for (auto& t : toks) t = text::FoldCase(t);
  entries_.push_back(std::move(toks));
  surfaces_.push_back(text::Trim(entry));
}

MweLexicon MweLexicon::Load(const std::string& path) {
  MweLexicon lex;
  std::istringstream in(ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    if (text::Trim(line).empty() || line[0] == '#') continue;
    lex.Add(line);
  }
  return lex;
}

MweLexicon MweLexicon::FromEntries(const std::vector<std::string>& entries) {
  MweLexicon lex;
  for (const auto& e : entries) lex.Add(e);
  return lex;
}

std::vector<MweSpan> TagMwes(const std::string& sentence_id,
                             const std::vector<std::string>& tokens,
                             const MweLexicon& lexicon) {
  std::vector<std::string> folded;
  folded.reserve(tokens.size());
  for (const auto& t : tokens) folded.push_back(text::FoldCase(t));
  std::vector<MweSpan> spans;
  std::size_t i = 0;
  while (i < folded.size()) {
    std::size_t best = 0;
    std::size_t best_entry = 0;
    const auto& entries = lexicon.entries();
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const auto& entry = entries[e];
      if (entry.size() <= best || i + entry.size() > folded.size()) continue;
      if (std::equal(entry.begin(), entry.end(), folded.begin() + i)) {
        best = entry.size();
        best_entry = e;
      }
    }
    if (best > 0) {
      spans.push_back({sentence_id,
                       {static_cast<int>(i), static_cast<int>(i + best)},
                       lexicon.surfaces()[best_entry]});
      i += best;
    } else {
      ++i;
    }
  }
  return spans;
}

std::vector<MweSpan> TagMwes(const lid::CsSentence& sentence,
                             const MweLexicon& lexicon) {
  return TagMwes(sentence.Id(), sentence.tokens(), lexicon);
}

std::size_t Levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t substitute = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, substitute});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t Levenshtein(std::string_view a, std::string_view b) {
  return Levenshtein(text::Decode(a), text::Decode(b));
}

GateResult TranslationCsResidueCheck(const AnnotationBundle& bundle,
                                     const ResidueGateConfig& config) {
  const std::u32string source = text::Decode(bundle.cs.record.text);
  for (const Translation* t : {&bundle.translation_l1, &bundle.translation_en}) {
    if (Levenshtein(source, text::Decode(t->text)) < config.min_distance) {
      return GateResult::kTranslationResidue;
    }
  }
  for (const Translation* t : {&bundle.translation_l1, &bundle.translation_en}) {
    if (std::find(t->pos.begin(), t->pos.end(), config.reject_pos) !=
        t->pos.end()) {
      return GateResult::kXTag;
    }
  }
  return GateResult::kKeep;
}

bool TranslationCsResidueGate(const AnnotationBundle& bundle,
                              const ResidueGateConfig& config) {
  return TranslationCsResidueCheck(bundle, config) == GateResult::kKeep;
}

}  // namespace acs::bundle
