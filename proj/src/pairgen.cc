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

#include "acs/pairgen.h"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "acs/error.h"
#include "acs/ingest.h"
#include "acs/rng.h"
#include "acs/text.h"

namespace acs::pairgen {

using bundle::AnnotationBundle;
using bundle::TokenSpan;
using lid::CsLabel;
using lid::CsSentence;
using lid::Language;

std::vector<SwitchPoint> FindSwitchPoints(std::span<const CsLabel> labels) {
  std::vector<SwitchPoint> points;
  int previous = -1;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    if (labels[i].is_other()) continue;
    if (previous >= 0 && labels[previous].language != labels[i].language) {
      points.push_back({previous, i, i == previous + 1});
    }
    previous = i;
  }
  return points;
}

bool IsIntegrative(const AnnotationBundle& bundle) {
  const auto& labels = bundle.cs.labels;
  if (FindSwitchPoints(labels).empty()) {
    throw DataError("sentence " + bundle.id +
                    ": integrativeness needs at least one switch point");
  }
  const auto l1 = std::count_if(labels.begin(), labels.end(), [](const CsLabel& l) {
    return l.language == Language::kLang1;
  });
  const auto en = std::count_if(labels.begin(), labels.end(), [](const CsLabel& l) {
    return l.language == Language::kEnglish;
  });
  // Ties make English the minority side.
  const Language minority = l1 < en ? Language::kLang1 : Language::kEnglish;
  const Language majority = lid::Opposite(minority);

  const auto& translation = bundle.translation(majority);
  std::vector<std::vector<int>> cs_of(translation.tokens.size());
  for (const auto& link : bundle.alignment(majority)) {
    cs_of[link.trans_index].push_back(link.cs_index);
  }
  for (const auto& dep : translation.deps) {
    if (dep.head < 0) continue;
    for (int a : cs_of[dep.head]) {
      for (int b : cs_of[dep.dependent]) {
        const Language la = labels[a].language;
        const Language lb = labels[b].language;
        if ((la == minority && lb == majority) ||
            (la == majority && lb == minority)) {
          return true;
        }
      }
    }
  }
  return false;
}

namespace {

bool IsNoun(std::string_view pos) { return pos == "NOUN"; }

// POS tags of the translation tokens a CS token is aligned to, in the CS
// token's own language.
std::vector<std::string> ProjectedPos(const AnnotationBundle& bundle,
                                      int cs_index) {
  const Language lang = bundle.cs.labels[cs_index].language;
  if (lang == Language::kOther) return {};
  std::vector<std::string> out;
  const auto& t = bundle.translation(lang);
  for (int idx : bundle.AlignedTo(lang, cs_index)) out.push_back(t.pos[idx]);
  return out;
}

bool ProjectsToNoun(const AnnotationBundle& bundle, int cs_index) {
  const auto pos = ProjectedPos(bundle, cs_index);
  return std::any_of(pos.begin(), pos.end(),
                     [](const std::string& p) { return IsNoun(p); });
}

bool LinkedToSpan(const bundle::Translation& t, int token, TokenSpan span) {
  for (int i = span.begin; i < span.end; ++i) {
    if (t.Linked(token, i)) return true;
  }
  return false;
}

// Nearest non-Other token strictly left (step -1) or right (step +1).
int NearestLabeled(const std::vector<CsLabel>& labels, int from, int step) {
  for (int i = from + step; i >= 0 && i < static_cast<int>(labels.size());
       i += step) {
    if (!labels[i].is_other()) return i;
  }
  return -1;
}

std::string JoinFolded(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += text::FoldCase(t);
  }
  return out;
}

// Extends the aligned span over one unaligned, dependency-linked neighbour per
// edge. Returns false if a chain of such neighbours makes the span ambiguous.
bool ExtendOverUnaligned(const AnnotationBundle& bundle, Language target,
                         TokenSpan* span) {
  const auto& t = bundle.translation(target);
  const int n = static_cast<int>(t.tokens.size());
  auto qualifies = [&](int token, TokenSpan s) {
    return token >= 0 && token < n && !bundle.IsAligned(target, token) &&
           LinkedToSpan(t, token, s);
  };
  for (int step : {-1, +1}) {
    const int neighbour = step < 0 ? span->begin - 1 : span->end;
    if (!qualifies(neighbour, *span)) continue;
    TokenSpan extended = *span;
    if (step < 0) {
      extended.begin = neighbour;
    } else {
      extended.end = neighbour + 1;
    }
    if (qualifies(neighbour + step, extended)) return false;
    *span = extended;
  }
  return true;
}

}  // namespace

std::vector<Manipulation> EnumerateCandidates(
    const AnnotationBundle& bundle, const std::vector<bundle::MweSpan>& mwes,
    const bundle::MweLexicon* mwe_lexicon) {
  const auto& labels = bundle.cs.labels;
  auto in_mwe = [&](int i) {
    return std::any_of(mwes.begin(), mwes.end(), [&](const bundle::MweSpan& m) {
      return m.span.Contains(i);
    });
  };

  std::vector<Manipulation> out;
  for (const SwitchPoint& sp : FindSwitchPoints(labels)) {
    if (!sp.adjacent) continue;
    if (ProjectsToNoun(bundle, sp.left_index) ||
        ProjectsToNoun(bundle, sp.right_index)) {
      continue;
    }
    for (Side side : {Side::kLeft, Side::kRight}) {
      const int w = side == Side::kLeft ? sp.left_index : sp.right_index;
      const Language source = labels[w].language;
      if (source == Language::kOther) continue;
      if (in_mwe(w)) continue;
      const Language target = lid::Opposite(source);
      const std::vector<int> aligned = bundle.AlignedTo(target, w);
      if (aligned.empty()) continue;
      if (aligned.back() - aligned.front() + 1 !=
          static_cast<int>(aligned.size())) {
        continue;
      }
      TokenSpan span{aligned.front(), aligned.back() + 1};
      if (!ExtendOverUnaligned(bundle, target, &span)) continue;

      const auto& t = bundle.translation(target);
      Manipulation m;
      m.side = side;
      m.removed = {w, w + 1};
      m.inserted.assign(t.tokens.begin() + span.begin, t.tokens.begin() + span.end);
      m.inserted_pos.assign(t.pos.begin() + span.begin, t.pos.begin() + span.end);
      m.inserted_language = target;
      m.translation_span = span;
      for (int idx : aligned) m.links.push_back({w, idx});
      if (w == 0) m.inserted.front() = text::CapitalizeFirst(m.inserted.front());

      if (JoinFolded(m.inserted) ==
          JoinFolded(std::span(bundle.cs.tokens()).subspan(w, 1))) {
        continue;
      }

      // Flanks of the moved switch point after manipulation.
      if (side == Side::kLeft) {
        const int p = NearestLabeled(labels, w, -1);
        if (p >= 0 && labels[p].language == source &&
            (ProjectsToNoun(bundle, p) || IsNoun(m.inserted_pos.front()))) {
          continue;
        }
      } else {
        const int q = NearestLabeled(labels, w, +1);
        if (q >= 0 && labels[q].language == source &&
            (ProjectsToNoun(bundle, q) || IsNoun(m.inserted_pos.back()))) {
          continue;
        }
      }

      if (mwe_lexicon != nullptr) {
        const CsSentence manipulated = ApplyManipulation(bundle.cs, m);
        const int ins_begin = w;
        const int ins_end = w + static_cast<int>(m.inserted.size());
        const auto after = bundle::TagMwes(manipulated, *mwe_lexicon);
        const bool splits = std::any_of(
            after.begin(), after.end(), [&](const bundle::MweSpan& s) {
              const bool overlaps =
                  s.span.begin < ins_end && ins_begin < s.span.end;
              const bool contains =
                  s.span.begin >= ins_begin && s.span.end <= ins_end;
              return overlaps && !contains;
            });
        if (splits) continue;
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

CsSentence ApplyManipulation(const CsSentence& sentence,
                             const Manipulation& manipulation) {
  const int n = static_cast<int>(sentence.tokens().size());
  const TokenSpan r = manipulation.removed;
  if (r.begin < 0 || r.end > n || r.begin >= r.end) {
    throw ValidationError("manipulation span [" + std::to_string(r.begin) +
                          "," + std::to_string(r.end) + ") invalid for " +
                          std::to_string(n) + " tokens");
  }
  if (manipulation.inserted.empty()) {
    throw ValidationError("manipulation inserts no tokens");
  }
  if (manipulation.inserted_language == Language::kOther) {
    throw ValidationError("manipulation must insert Lang1 or English tokens");
  }

  CsSentence out = sentence;
  auto& tokens = out.record.tokens;
  tokens.erase(tokens.begin() + r.begin, tokens.begin() + r.end);
  tokens.insert(tokens.begin() + r.begin, manipulation.inserted.begin(),
                manipulation.inserted.end());
  const CsLabel label = manipulation.inserted_language == Language::kLang1
                            ? CsLabel::Lang1()
                            : CsLabel::English();
  out.labels.erase(out.labels.begin() + r.begin, out.labels.begin() + r.end);
  out.labels.insert(out.labels.begin() + r.begin, manipulation.inserted.size(),
                    label);

  // Splice into the original text so spacing outside the span is untouched.
  const auto ranges = ingest::LocateTokens(sentence.record.text, sentence.tokens());
  if (ranges.empty()) {
    out.record.text = ingest::Detokenize(tokens);
  } else {
    std::string inserted;
    for (const auto& tok : manipulation.inserted) {
      if (!inserted.empty()) inserted += ' ';
      inserted += tok;
    }
    const std::size_t b = ranges[r.begin].first;
    const std::size_t e = ranges[r.end - 1].second;
    out.record.text = sentence.record.text.substr(0, b) + inserted +
                      sentence.record.text.substr(e);
  }
  out.record.byte_end = out.record.byte_begin + out.record.text.size();
  return out;
}

namespace {

CharSpan TokenCharSpan(const CsSentence& s, int begin, int end) {
  const auto ranges = ingest::LocateTokens(s.record.text, s.tokens());
  if (ranges.empty() || begin >= end) return {};
  return {text::CodePointOffsetOfByte(s.record.text, ranges[begin].first),
          text::CodePointOffsetOfByte(s.record.text, ranges[end - 1].second)};
}

}  // namespace

MinimalPair MakePair(const AnnotationBundle& bundle,
                     const Manipulation& manipulation, std::uint64_t seed) {
  MinimalPair pair;
  pair.lang_pair = bundle.lang_pair;
  pair.sentence_id = bundle.cs.Id();
  pair.doc_id = bundle.cs.record.doc_id;
  pair.pair_id = bundle.lang_pair + ":" + pair.sentence_id;
  pair.seed = seed;
  pair.observed = bundle.cs;
  if (ingest::LocateTokens(pair.observed.record.text, pair.observed.tokens())
          .empty()) {
    pair.observed.record.text = ingest::Detokenize(pair.observed.tokens());
  }
  pair.manipulated = ApplyManipulation(pair.observed, manipulation);
  pair.manipulation = manipulation;

  const auto& removed = manipulation.removed;
  pair.lexical_difference.removed = JoinFolded(
      std::span(pair.observed.tokens()).subspan(removed.begin, removed.size()));
  pair.lexical_difference.inserted = JoinFolded(manipulation.inserted);

  const int w = removed.begin;
  const Language own = pair.observed.labels[w].language;
  if (own != Language::kOther) {
    const auto aligned = bundle.AlignedTo(own, w);
    const auto& t = bundle.translation(own);
    if (aligned.size() == 1) {
      pair.changed_word_pos = t.pos[aligned[0]];
      pair.pos_eligible = text::FoldCase(t.tokens[aligned[0]]) ==
                          text::FoldCase(pair.observed.tokens()[w]);
    }
  }

  pair.observed_span = TokenCharSpan(pair.observed, removed.begin, removed.end);
  pair.manipulated_span = TokenCharSpan(
      pair.manipulated, removed.begin,
      removed.begin + static_cast<int>(manipulation.inserted.size()));
  return pair;
}

bool SwitchCountGate(const MinimalPair& pair) {
  return FindSwitchPoints(pair.observed.labels).size() ==
         FindSwitchPoints(pair.manipulated.labels).size();
}

namespace {

std::string LanguageName(Language l) {
  return l == Language::kLang1 ? "lang1"
         : l == Language::kEnglish ? "english"
                                   : "other";
}

Language LanguageFromName(const std::string& s) {
  if (s == "lang1") return Language::kLang1;
  if (s == "english") return Language::kEnglish;
  if (s == "other") return Language::kOther;
  throw DataError("unknown language '" + s + "'");
}

}  // namespace

Json ToJson(const MinimalPair& pair) {
  const Manipulation& m = pair.manipulation;
  Json links = Json::array();
  for (const auto& l : m.links) links.push_back({l.cs_index, l.trans_index});
  return {
      {"pair_id", pair.pair_id},
      {"lang_pair", pair.lang_pair},
      {"observed", lid::ToJson(pair.observed)},
      {"manipulated", lid::ToJson(pair.manipulated)},
      {"manipulation",
       {{"side", m.side == Side::kLeft ? "left" : "right"},
        {"removed", {m.removed.begin, m.removed.end}},
        {"inserted", m.inserted},
        {"inserted_pos", m.inserted_pos},
        {"inserted_language", LanguageName(m.inserted_language)},
        {"translation_span", {m.translation_span.begin, m.translation_span.end}},
        {"links", links}}},
      {"changed_word_pos",
       pair.changed_word_pos ? Json(*pair.changed_word_pos) : Json(nullptr)},
      {"pos_eligible", pair.pos_eligible},
      {"lexical_difference",
       {pair.lexical_difference.removed, pair.lexical_difference.inserted}},
      {"doc_id", pair.doc_id},
      {"sentence_id", pair.sentence_id},
      {"seed", pair.seed},
      {"observed_span", {pair.observed_span.begin, pair.observed_span.end}},
      {"manipulated_span",
       {pair.manipulated_span.begin, pair.manipulated_span.end}},
  };
}

MinimalPair PairFromJson(const Json& j) {
  MinimalPair p;
  try {
    p.pair_id = j.at("pair_id").get<std::string>();
    p.lang_pair = j.value("lang_pair", "");
    p.observed = lid::CsSentenceFromJson(j.at("observed"));
    p.manipulated = lid::CsSentenceFromJson(j.at("manipulated"));
    const Json& m = j.at("manipulation");
    p.manipulation.side = m.at("side") == "left" ? Side::kLeft : Side::kRight;
    p.manipulation.removed = {m.at("removed").at(0).get<int>(),
                              m.at("removed").at(1).get<int>()};
    p.manipulation.inserted = m.at("inserted").get<std::vector<std::string>>();
    p.manipulation.inserted_pos =
        m.value("inserted_pos", std::vector<std::string>{});
    p.manipulation.inserted_language =
        LanguageFromName(m.at("inserted_language").get<std::string>());
    if (m.contains("translation_span")) {
      p.manipulation.translation_span = {m["translation_span"].at(0).get<int>(),
                                         m["translation_span"].at(1).get<int>()};
    }
    for (const auto& l : m.value("links", Json::array())) {
      p.manipulation.links.push_back({l.at(0).get<int>(), l.at(1).get<int>()});
    }
    if (j.contains("changed_word_pos") && !j["changed_word_pos"].is_null()) {
      p.changed_word_pos = j["changed_word_pos"].get<std::string>();
    }
    p.pos_eligible = j.value("pos_eligible", false);
    p.lexical_difference = {j.at("lexical_difference").at(0).get<std::string>(),
                            j.at("lexical_difference").at(1).get<std::string>()};
    p.doc_id = j.value("doc_id", "");
    p.sentence_id = j.value("sentence_id", "");
    p.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("observed_span")) {
      p.observed_span = {j["observed_span"].at(0).get<std::size_t>(),
                         j["observed_span"].at(1).get<std::size_t>()};
    }
    if (j.contains("manipulated_span")) {
      p.manipulated_span = {j["manipulated_span"].at(0).get<std::size_t>(),
                            j["manipulated_span"].at(1).get<std::size_t>()};
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed minimal-pair record: ") + e.what());
  }
  return p;
}

AssembleResult AssembleCorpus(std::vector<SentenceCandidates> sentences,
                              std::uint64_t seed, std::size_t cap) {
  std::stable_sort(sentences.begin(), sentences.end(),
                   [](const SentenceCandidates& a, const SentenceCandidates& b) {
                     if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
                     if (a.index != b.index) return a.index < b.index;
                     return a.sentence_id < b.sentence_id;
                   });
  AssembleResult result;
  std::unordered_set<std::string> used;
  for (auto& sentence : sentences) {
    if (sentence.candidates.empty()) continue;
    if (result.pairs.size() >= cap) {
      ++result.skipped_cap;
      continue;
    }
    CounterRng rng(StreamKey(seed, sentence.sentence_id));
    std::vector<std::size_t> order(sentence.candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.Shuffle(order);
    bool chosen = false;
    for (std::size_t idx : order) {
      MinimalPair& candidate = sentence.candidates[idx];
      if (!used.insert(candidate.lexical_difference.Key()).second) continue;
      candidate.seed = seed;
      result.pairs.push_back(std::move(candidate));
      chosen = true;
      break;
    }
    if (!chosen) ++result.skipped_duplicate;
  }
  return result;
}

GenerateResult GeneratePairs(const std::vector<AnnotationBundle>& bundles,
                             const GenerateOptions& options) {
  GenerateResult result;
  result.input = bundles.size();
  std::vector<SentenceCandidates> sentences;
  for (const AnnotationBundle& raw : bundles) {
    AnnotationBundle b = bundle::NerOverride(bundle::ValidateBundle(raw));
    if (b.lang_pair.empty()) b.lang_pair = options.lang_pair;
    if (FindSwitchPoints(b.cs.labels).empty()) {
      ++result.rejections["no_switch_point"];
      continue;
    }
    if (!IsIntegrative(b)) {
      ++result.rejections["non_integrative"];
      continue;
    }
    std::vector<bundle::MweSpan> mwes;
    if (options.mwe_lexicon != nullptr) {
      mwes = bundle::TagMwes(b.cs, *options.mwe_lexicon);
    }
    SentenceCandidates sc{b.cs.record.doc_id, b.cs.record.index, b.cs.Id(), {}};
    for (const Manipulation& m : EnumerateCandidates(b, mwes, options.mwe_lexicon)) {
      MinimalPair pair = MakePair(b, m, options.seed);
      if (SwitchCountGate(pair)) sc.candidates.push_back(std::move(pair));
    }
    if (sc.candidates.empty()) {
      ++result.rejections["no_candidate"];
      continue;
    }
    sentences.push_back(std::move(sc));
  }
  AssembleResult assembled =
      AssembleCorpus(std::move(sentences), options.seed, options.cap);
  if (assembled.skipped_duplicate > 0) {
    result.rejections["duplicate_difference"] += assembled.skipped_duplicate;
  }
  if (assembled.skipped_cap > 0) {
    result.rejections["cap"] += assembled.skipped_cap;
  }
  result.pairs = std::move(assembled.pairs);
  return result;
}

}  // namespace acs::pairgen
