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

#include <gtest/gtest.h>

#include "acs/error.h"
#include "acs/rng.h"
#include "acs/text.h"
#include "test_support.h"

namespace acs::bundle {
namespace {

using lid::CsLabel;
using lid::OtherReason;
using Tokens = std::vector<std::string>;

AnnotationBundle Ex1() { return testing::LoadBundleFixture("ex1_bundle.jsonl"); }

std::string ValidationMessage(const AnnotationBundle& b) {
  try {
    ValidateBundle(b);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(ValidateBundleTest, WorkedExampleAccepted) {
  EXPECT_EQ(ValidationMessage(Ex1()), "");
}

TEST(ValidateBundleTest, AlignmentOutOfRange) {
  AnnotationBundle b = Ex1();
  b.align_en = {{99, 0}};
  EXPECT_NE(ValidationMessage(b).find("align_en link 0: cs_index 99 out of range"),
            std::string::npos)
      << ValidationMessage(b);
}

TEST(ValidateBundleTest, DependencyCycle) {
  AnnotationBundle b = Ex1();
  auto& deps = b.translation_l1.deps;
  // Point the root at its own dependent to close a two-cycle.
  for (auto& d : deps) {
    if (d.head == -1) {
      for (const auto& e : deps) {
        if (e.head == d.dependent) {
          d.head = e.dependent;
          break;
        }
      }
    }
  }
  EXPECT_NE(ValidationMessage(b).find("deps_l1: not a tree"), std::string::npos)
      << ValidationMessage(b);
}

TEST(ValidateBundleTest, ParallelArraysAndSpans) {
  AnnotationBundle b = Ex1();
  b.translation_en.pos.pop_back();
  EXPECT_NE(ValidationMessage(b), "");
  b = Ex1();
  b.cs.labels.pop_back();
  EXPECT_NE(ValidationMessage(b), "");
  b = Ex1();
  b.translation_l1.ner = {{3, 3}};
  EXPECT_NE(ValidationMessage(b), "");
}

TEST(BundleJsonTest, RoundTrip) {
  const AnnotationBundle b = Ex1();
  EXPECT_EQ(ToJson(BundleFromJson(ToJson(b))), ToJson(b));
  Json j = ToJson(b);
  j["schema"] = 2;
  EXPECT_THROW(BundleFromJson(j), ValidationError);
  EXPECT_THROW(BundleFromJson(Json{{"id", "x"}}), ValidationError);
}

int IndexOf(const AnnotationBundle& b, const std::string& tok) {
  const auto& t = b.cs.tokens();
  return static_cast<int>(std::find(t.begin(), t.end(), tok) - t.begin());
}

TEST(NerOverrideTest, AlignedIntoEntityBecomesOther) {
  AnnotationBundle b = Ex1();
  const int polizei = IndexOf(b, "Polizei");
  const int target = b.AlignedTo(lid::Language::kLang1, polizei).front();
  b.translation_l1.ner = {{target, target + 1}};
  const AnnotationBundle out = NerOverride(b);
  EXPECT_EQ(out.cs.labels[polizei], CsLabel::Other(OtherReason::kNamedEntity));
  for (std::size_t i = 0; i < out.cs.labels.size(); ++i) {
    if (static_cast<int>(i) != polizei) {
      EXPECT_EQ(out.cs.labels[i], b.cs.labels[i]);
    }
  }
}

TEST(NerOverrideTest, ExistingOtherUnchanged) {
  AnnotationBundle b = Ex1();
  const int comma = IndexOf(b, ",");
  ASSERT_EQ(b.cs.labels[comma], CsLabel::Other(OtherReason::kNeutral));
  const int target = b.AlignedTo(lid::Language::kLang1, comma).front();
  b.translation_l1.ner = {{target, target + 1}};
  EXPECT_EQ(NerOverride(b).cs.labels[comma], CsLabel::Other(OtherReason::kNeutral));
}

TEST(NerOverrideTest, NoEntitiesIsIdentity) {
  const AnnotationBundle b = Ex1();
  EXPECT_EQ(NerOverride(b).cs.labels, b.cs.labels);
}

TEST(MweTest, Examples) {
  const auto lex = MweLexicon::FromEntries({"way with the ladies", "pop up", "up!"});
  const auto spans = TagMwes("s", Tokens{"a", "way", "with", "the", "ladies"}, lex);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].span, (TokenSpan{1, 5}));
  EXPECT_EQ(spans[0].entry, "way with the ladies");
  EXPECT_TRUE(TagMwes("s", Tokens{"nothing", "here"}, lex).empty());
  const auto pop = TagMwes("s", Tokens{"Pop", "up", "!"}, lex);
  ASSERT_EQ(pop.size(), 1u);
  EXPECT_EQ(pop[0].span, (TokenSpan{0, 2}));
}

TEST(MweTest, MatchesLeftmostLongestOracle) {
  const std::vector<std::string> entries = {"a b", "b c", "a b c", "c d", "b a b", "d d"};
  const auto lex = MweLexicon::FromEntries(entries);
  EXPECT_TRUE(TagMwes("s", Tokens{"c"}, MweLexicon::FromEntries({"c"})).empty());
  const std::vector<std::string> alphabet = {"a", "b", "c", "d", "A"};
  CounterRng rng(StreamKey(17, "mwe"));
  for (int trial = 0; trial < 3000; ++trial) {
    Tokens toks(1 + rng.Below(9));
    for (auto& t : toks) t = alphabet[rng.Below(alphabet.size())];
    const auto want = testing::NaiveMweMatches(toks, entries);
    const auto got = TagMwes("s", toks, lex);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].span.begin, want[i].first);
      EXPECT_EQ(got[i].span.end, want[i].second);
    }
  }
}

TEST(LevenshteinTest, KnownValues) {
  EXPECT_EQ(Levenshtein("", ""), 0u);
  EXPECT_EQ(Levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(Levenshtein("abc", ""), 3u);
  EXPECT_EQ(Levenshtein("über", "uber"), 1u);
  EXPECT_EQ(Levenshtein("同学们", "同学"), 1u);
}

TEST(LevenshteinTest, MatchesRecursionUpToLengthFive) {
  testing::ExhaustiveLevenshtein oracle(U"abc", 5);
  const auto& s = oracle.strings();
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      ASSERT_EQ(Levenshtein(s[i], s[j]), static_cast<std::size_t>(oracle.Distance(i, j)))
          << text::Encode(s[i]) << " / " << text::Encode(s[j]);
    }
  }
}

AnnotationBundle WithL1Text(std::string text) {
  AnnotationBundle b = Ex1();
  b.translation_l1.text = std::move(text);
  return b;
}

TEST(ResidueGateTest, StrictDistanceBoundary) {
  const std::string cs = Ex1().cs.record.text;
  EXPECT_EQ(TranslationCsResidueCheck(WithL1Text(cs)), GateResult::kTranslationResidue);
  std::string four = cs;
  four.replace(four.size() - 4, 4, "xxxx");
  ASSERT_EQ(Levenshtein(cs, four), 4u);
  EXPECT_EQ(TranslationCsResidueCheck(WithL1Text(four)),
            GateResult::kTranslationResidue);
  std::string five = cs;
  five.replace(five.size() - 5, 5, "xxxxx");
  ASSERT_EQ(Levenshtein(cs, five), 5u);
  EXPECT_EQ(TranslationCsResidueCheck(WithL1Text(five)), GateResult::kKeep);
  EXPECT_FALSE(TranslationCsResidueGate(WithL1Text(four)));
  EXPECT_TRUE(TranslationCsResidueGate(WithL1Text(five)));
}

TEST(ResidueGateTest, AnyXTagRejects) {
  AnnotationBundle b = Ex1();
  EXPECT_EQ(TranslationCsResidueCheck(b), GateResult::kKeep);
  b.translation_en.pos[2] = "X";
  EXPECT_EQ(TranslationCsResidueCheck(b), GateResult::kXTag);
  b = Ex1();
  b.translation_l1.pos.back() = "X";
  EXPECT_EQ(TranslationCsResidueCheck(b), GateResult::kXTag);
}

}  // namespace
}  // namespace acs::bundle
