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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Checks against released data run only when the
// corresponding environment variables point at the files:
//   ACS_RELEASED_JUDGMENTS   exported de-en judgment JSONL
//   ACS_RELEASED_POS_PAIRS   de-en pairs JSONL
//   ACS_RELEASED_POS_SCORES  matching score file (whitespace or JSONL)

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "acs/bundle.h"
#include "acs/ingest.h"
#include "acs/jsonl.h"
#include "acs/judge.h"
#include "acs/lid.h"
#include "acs/pairgen.h"
#include "acs/pipeline.h"
#include "acs/rng.h"
#include "acs/scoring.h"
#include "acs/stats.h"
#include "httplib.h"
#include "test_support.h"

namespace acs {
namespace {

// Pinned tolerances.
constexpr double kGoldenSeconds = 1.0;
constexpr double kLevenshteinSeconds = 10.0;
constexpr double kPipelineSeconds = 5.0;
constexpr std::size_t kMcResamples = 10000;
constexpr double kMcSigmas = 3.0;
constexpr double kKsAlpha = 0.01;
constexpr int kKsTrials = 200;
constexpr double kKappaTolerance = 0.005;
constexpr double kAccuracyTolerancePts = 0.1;
constexpr double kPosMeanTolerance = 0.05;
constexpr double kPosPTolerance = 0.01;
constexpr int kCrashes = 100;

// Failed expectations accumulate here; a criterion passes when none did.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && first_failure_.empty()) first_failure_ = what;
    if (!ok) ++failures_;
  }
  bool ok() const { return failures_ == 0; }
  const std::string& first_failure() const { return first_failure_; }
  void Note(const std::string& note) { notes_ += (notes_.empty() ? "" : "; ") + note; }
  const std::string& notes() const { return notes_; }

 private:
  int failures_ = 0;
  std::string first_failure_;
  std::string notes_;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::string Fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> Normals(CounterRng& rng, int n, double shift) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const double u = 1.0 - rng.Unit();
    const double v = rng.Unit();
    out.push_back(shift + std::sqrt(-2.0 * std::log(u)) * std::cos(2 * M_PI * v));
  }
  return out;
}

using lid::CsLabel;

// 1
void GoldenPair(Checker& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto b = testing::LoadBundleFixture("ex1_bundle.jsonl");
  const auto r = pairgen::GeneratePairs({b}, {1, 1000, "de-en", nullptr});
  const double secs = Seconds(start);
  c.Expect(r.pairs.size() == 1, "exactly one pair");
  if (r.pairs.size() != 1) return;
  const auto& p = r.pairs[0];
  c.Expect(p.manipulated.record.text ==
               "And I said maybe a little leiser singen, sonst ruf ich die Polizei",
           "manipulated text: " + p.manipulated.record.text);
  c.Expect(testing::CountSwitches(p.observed.labels) == 1, "one switch in observed");
  c.Expect(testing::CountSwitches(p.manipulated.labels) == 1, "one switch in manipulated");
  c.Expect(secs < kGoldenSeconds, "runtime " + Fmt(secs) + " s");
  c.Note(Fmt(secs, 4) + " s");
}

// 2
void PropertySuite(Checker& c) {
  const std::uint64_t seed = 20260417;
  const auto bundles = testing::RandomBundles(seed, 1000);
  const auto& vocab = testing::Vocabulary();
  const auto lexicon = bundle::MweLexicon::FromEntries(vocab.mwes);
  const pairgen::GenerateOptions options{seed, 100000, "de-en", &lexicon};
  const auto first = pairgen::GeneratePairs(bundles, options);
  const auto second = pairgen::GeneratePairs(bundles, options);
  const auto violations = testing::CheckPairProperties(bundles, first.pairs, vocab.mwes);
  c.Expect(violations.empty(), std::to_string(violations.size()) + " violations" +
                                   (violations.empty() ? "" : ", first " + violations[0]));
  auto dump = [](const pairgen::GenerateResult& r) {
    std::vector<Json> out;
    for (const auto& p : r.pairs) out.push_back(pairgen::ToJson(p));
    return DumpJsonl(out);
  };
  c.Expect(dump(first) == dump(second), "rerun differs");
  c.Expect(!first.pairs.empty(), "no pairs generated");
  c.Note(std::to_string(first.pairs.size()) + " pairs from 1000 sentences");
}

// 3
void GateBoundaries(Checker& c) {
  auto sentence = [](std::size_t tokens, std::size_t chars) {
    ingest::SentenceRecord s;
    s.tokens.assign(tokens, "x");
    s.text.assign(chars, 'x');
    return s;
  };
  c.Expect(!ingest::LengthGate(sentence(5, 30)), "5 tokens accepted");
  c.Expect(ingest::LengthGate(sentence(6, 30)), "6 tokens rejected");
  c.Expect(!ingest::LengthGate(sentence(7, 201)), "201 chars accepted");
  c.Expect(ingest::LengthGate(sentence(7, 200)), "200 chars rejected");

  auto labeled = [](int unknown, int total) {
    lid::CsSentence s;
    s.record.tokens.assign(total, "wort");
    s.labels.assign(total, CsLabel::Lang1());
    for (int i = 0; i < unknown; ++i) s.labels[i] = CsLabel::Other(lid::OtherReason::kUnknown);
    return s;
  };
  c.Expect(!lid::UnknownGate(labeled(4, 8)), "50% unknown accepted");
  c.Expect(lid::UnknownGate(labeled(3, 8)), "37.5% unknown rejected");

  const auto ex1 = testing::LoadBundleFixture("ex1_bundle.jsonl");
  const std::string cs = ex1.cs.record.text;
  for (std::size_t d : {4u, 5u}) {
    auto b = ex1;
    b.translation_l1.text = cs.substr(0, cs.size() - d) + std::string(d, 'x');
    c.Expect(bundle::Levenshtein(cs, b.translation_l1.text) == d, "fixture distance");
    c.Expect(bundle::TranslationCsResidueGate(b) == (d == 5),
             "distance " + std::to_string(d));
  }
  for (int side = 0; side < 2; ++side) {
    auto b = ex1;
    (side == 0 ? b.translation_l1 : b.translation_en).pos[1] = "X";
    c.Expect(bundle::TranslationCsResidueCheck(b) == bundle::GateResult::kXTag, "X tag kept");
  }
  c.Expect(bundle::TranslationCsResidueCheck(ex1) == bundle::GateResult::kKeep, "clean bundle");
}

// 4
void LevenshteinOracle(Checker& c) {
  const auto start = std::chrono::steady_clock::now();
  const testing::ExhaustiveLevenshtein oracle(U"abc", 7);
  const auto& s = oracle.strings();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (bundle::Levenshtein(s[i], s[j]) != static_cast<std::size_t>(oracle.Distance(i, j))) {
        ++mismatches;
      }
    }
  }
  const double secs = Seconds(start);
  c.Expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
  c.Expect(secs < kLevenshteinSeconds, "runtime " + Fmt(secs) + " s");
  c.Note(std::to_string(s.size() * s.size()) + " pairs in " + Fmt(secs, 2) + " s");
}

// 5
void Permutation(Checker& c) {
  const std::vector<double> ones(10, 1.0);
  const std::vector<double> zeros(10, 0.0);
  const auto paired = stats::PairedPermutationTest(ones, zeros);
  c.Expect(paired.exact && paired.p_value == 2.0 / 1024.0, "paired p " + Fmt(paired.p_value, 6));
  c.Expect(testing::EnumeratedPairedP(ones, zeros) == 2.0 / 1024.0, "paired oracle");
  const std::vector<double> a = {0, 0, 0};
  const std::vector<double> b = {10, 10, 10};
  const auto unpaired = stats::UnpairedPermutationTest(a, b);
  c.Expect(unpaired.exact && unpaired.p_value == 2.0 / 20.0, "unpaired p " + Fmt(unpaired.p_value, 6));
  c.Expect(testing::EnumeratedUnpairedP(a, b, false) == 2.0 / 20.0, "unpaired oracle");

  stats::PermutationConfig exact;
  exact.mode = stats::PermutationMode::kExact;
  stats::PermutationConfig mc;
  mc.mode = stats::PermutationMode::kMonteCarlo;
  mc.resamples = kMcResamples;
  double worst = 0.0;
  for (int n = 1; n <= 12; ++n) {
    CounterRng rng(StreamKey(5, n));
    mc.seed = static_cast<std::uint64_t>(n);
    const auto x = Normals(rng, n, 0.4);
    const auto y = Normals(rng, n, 0.0);
    const double pe = stats::PairedPermutationTest(x, y, exact).p_value;
    c.Expect(std::fabs(pe - testing::EnumeratedPairedP(x, y)) < 1e-12, "paired exact vs oracle");
    const double pm = stats::PairedPermutationTest(x, y, mc).p_value;
    const double bound = kMcSigmas * std::sqrt(pe * (1 - pe) / kMcResamples);
    c.Expect(std::fabs(pm - pe) <= bound + 1.0 / kMcResamples,
             "paired n=" + std::to_string(n) + " mc " + Fmt(pm, 4) + " exact " + Fmt(pe, 4));
    worst = std::max(worst, std::fabs(pm - pe));
    if (n >= 2) {
      const std::vector<double> ga(x.begin(), x.begin() + n / 2);
      const std::vector<double> gb(x.begin() + n / 2, x.end());
      for (auto stat : {stats::Statistic::kMean, stats::Statistic::kMedian}) {
        const double ue = stats::UnpairedPermutationTest(ga, gb, exact, stat).p_value;
        const double um = stats::UnpairedPermutationTest(ga, gb, mc, stat).p_value;
        const double ub = kMcSigmas * std::sqrt(ue * (1 - ue) / kMcResamples);
        c.Expect(std::fabs(ue - testing::EnumeratedUnpairedP(
                                    ga, gb, stat == stats::Statistic::kMedian)) < 1e-12,
                 "unpaired exact vs oracle");
        c.Expect(std::fabs(um - ue) <= ub + 1.0 / kMcResamples,
                 "unpaired n=" + std::to_string(n) + " mc " + Fmt(um, 4) + " exact " + Fmt(ue, 4));
      }
    }
  }

  std::vector<double> ps;
  stats::PermutationConfig null_cfg;
  null_cfg.resamples = 2000;
  for (int t = 0; t < kKsTrials; ++t) {
    CounterRng rng(StreamKey(55, t));
    null_cfg.seed = static_cast<std::uint64_t>(t);
    const auto x = Normals(rng, 30, 0.0);
    const auto y = Normals(rng, 30, 0.0);
    ps.push_back(stats::PairedPermutationTest(x, y, null_cfg).p_value);
  }
  const double d = stats::KsUniformStatistic(ps);
  const double crit = stats::KsCriticalValue(ps.size(), kKsAlpha);
  c.Expect(d < crit, "KS D " + Fmt(d, 4) + " >= " + Fmt(crit, 4));
  c.Note("max |mc-exact| " + Fmt(worst, 4) + ", KS D " + Fmt(d, 4) + " < " + Fmt(crit, 4));
}

const char* Env(const char* name) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? v : nullptr;
}

// 6
void Kappa(Checker& c) {
  c.Expect(stats::FleissKappa({{{3, 0}, {0, 3}, {3, 0}}, 3}) == 1.0, "perfect agreement");
  const double k = stats::FleissKappa({{{2, 1}, {1, 2}}, 3});
  c.Expect(std::fabs(k + 1.0 / 3.0) < 1e-12, "2-item fixture " + Fmt(k, 6));

  const char* path = Env("ACS_RELEASED_JUDGMENTS");
  if (path == nullptr) {
    c.Note("released judgments not supplied, reproduction skipped");
    return;
  }
  std::vector<judge::JudgmentRecord> records;
  std::set<std::string> pairs;
  for (const Json& j : ReadJsonl(path).records) {
    records.push_back(judge::JudgmentFromJson(j));
    pairs.insert(records.back().pair_id);
  }
  const double kappa = stats::FleissKappa(stats::BuildJudgmentMatrix(records, 3));
  c.Expect(std::fabs(kappa - 0.57) <= kKappaTolerance, "released kappa " + Fmt(kappa));
  const auto report = stats::GoldAgreement(records, pairs);
  std::multiset<double> want = {80.6, 84.6, 79.1, 76.1, 76.6};
  std::vector<double> got;
  for (const auto& [id, count] : report.per_annotator) got.push_back(100.0 * count.accuracy());
  std::sort(got.begin(), got.end());
  std::vector<double> want_sorted(want.begin(), want.end());
  c.Expect(got.size() == want_sorted.size(), "annotator count " + std::to_string(got.size()));
  for (std::size_t i = 0; i < std::min(got.size(), want_sorted.size()); ++i) {
    c.Expect(std::fabs(got[i] - want_sorted[i]) <= kAccuracyTolerancePts + 1e-9,
             "accuracy " + Fmt(got[i], 2) + " vs " + Fmt(want_sorted[i], 1));
  }
  c.Note("released kappa " + Fmt(kappa));
}

// 7
void AccuracyMargin(Checker& c) {
  std::string file;
  for (int i = 0; i < 10; ++i) {
    file += "de-en:d" + std::to_string(i) + "#0 -20 " + (i < 7 ? "-21" : "-19") + "\n";
  }
  scoring::FileScorer scorer = scoring::FileScorer::Parse(file, "synthetic");
  std::vector<scoring::PairTexts> texts;
  for (int i = 0; i < 10; ++i) texts.push_back({"de-en:d" + std::to_string(i) + "#0", "o", "m"});
  const auto run = scoring::ScorePairs(texts, scorer);
  c.Expect(run.scored.size() == 10 && scoring::Accuracy(run.scored) == 0.7, "10-pair accuracy");

  CounterRng rng(StreamKey(7, "swap"));
  for (int t = 0; t < 500; ++t) {
    std::vector<scoring::ScoredPair> pairs;
    std::vector<scoring::ScoredPair> swapped;
    const int n = 1 + static_cast<int>(rng.Below(50));
    for (int i = 0; i < n; ++i) {
      const double x = -200 * rng.Unit();
      double y = -200 * rng.Unit();
      if (x == y) y -= 1;
      pairs.push_back({"p", x, y, "s"});
      swapped.push_back({"p", y, x, "s"});
      c.Expect(scoring::Margin(swapped.back()) == -scoring::Margin(pairs.back()), "antisymmetry");
    }
    c.Expect(std::fabs(scoring::Accuracy(pairs) + scoring::Accuracy(swapped) - 1.0) < 1e-12,
             "acc + swapped acc != 1 in trial " + std::to_string(t));
  }
}

// 8
void PosAnalysis(Checker& c) {
  std::vector<pairgen::MinimalPair> pairs;
  std::vector<scoring::ScoredPair> scored;
  auto add = [&](const std::string& upos, double margin) {
    pairgen::MinimalPair p;
    p.pair_id = "p" + std::to_string(pairs.size());
    p.changed_word_pos = upos;
    p.pos_eligible = true;
    pairs.push_back(p);
    scored.push_back({p.pair_id, -10.0, -10.0 - margin, "s"});
  };
  const std::vector<std::string> closed = {"ADP", "AUX", "CCONJ", "DET", "NUM", "PART", "PRON", "SCONJ"};
  const std::vector<std::string> open = {"ADJ", "ADV", "INTJ", "NOUN", "PROPN", "VERB"};
  for (const auto& t : closed) {
    for (int i = 0; i < 10; ++i) add(t, 1.0 + i);
  }
  for (const auto& t : open) {
    for (int i = 0; i < 10; ++i) add(t, -(2.0 + i));
  }
  for (int i = 0; i < 9; ++i) add("SYM", 1.0);
  for (int i = 0; i < 10; ++i) add("PUNCT", 1.0);
  stats::PermutationConfig cfg;
  cfg.seed = 8;
  const auto r = stats::PosMarginAnalysis(pairs, scored, cfg);
  c.Expect(r.excluded == std::vector<std::string>{"SYM"}, "excluded groups");
  c.Expect(r.groups.size() == closed.size() + open.size() + 1, "group count");
  c.Expect(r.closed_count == 80 && r.open_count == 60, "pooled counts");
  c.Expect(std::fabs(r.closed_mean - 5.5) < 1e-12 && std::fabs(r.open_mean - 6.5) < 1e-12,
           "pooled means");
  for (const auto& g : r.groups) {
    const bool is_closed = std::count(closed.begin(), closed.end(), g.upos) > 0;
    const bool is_open = std::count(open.begin(), open.end(), g.upos) > 0;
    const auto want = is_closed ? stats::PosClass::kClosed
                                : (is_open ? stats::PosClass::kOpen : stats::PosClass::kNeither);
    c.Expect(g.pos_class == want, "class of " + g.upos);
  }
  const Json j = stats::ToJson(r);
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  c.Expect(keys == std::set<std::string>{"eligible_pairs", "groups", "excluded", "closed", "open",
                                         "p_value"},
           "report keys");
  std::set<std::string> gkeys;
  for (const auto& [k, v] : j["groups"][0].items()) gkeys.insert(k);
  c.Expect(gkeys == std::set<std::string>{"upos", "class", "count", "mean", "median"},
           "group keys");
  c.Expect(j["closed"].contains("count") && j["closed"].contains("mean") &&
               j["p_value"].is_number(),
           "pooled schema");

  const char* pairs_path = Env("ACS_RELEASED_POS_PAIRS");
  const char* scores_path = Env("ACS_RELEASED_POS_SCORES");
  if (pairs_path == nullptr || scores_path == nullptr) {
    c.Note("released scores not supplied, reproduction skipped");
    return;
  }
  std::vector<pairgen::MinimalPair> released;
  for (const Json& rec : ReadJsonl(pairs_path).records) released.push_back(pairgen::PairFromJson(rec));
  const auto released_scores = scoring::LoadScoredPairs(scores_path);
  const auto rr = stats::PosMarginAnalysis(released, released_scores, cfg);
  const std::map<std::string, double> want = {{"ADJ", 3.8}, {"ADV", 4.0}, {"VERB", 5.5},
                                              {"DET", 4.3}, {"ADP", 5.3}, {"PRON", 6.5},
                                              {"AUX", 7.9}};
  for (const auto& [upos, mean] : want) {
    auto it = std::find_if(rr.groups.begin(), rr.groups.end(),
                           [&](const auto& g) { return g.upos == upos; });
    c.Expect(it != rr.groups.end(), "released group " + upos + " missing");
    if (it != rr.groups.end()) {
      c.Expect(std::fabs(it->mean - mean) <= kPosMeanTolerance + 1e-9,
               upos + " mean " + Fmt(it->mean, 2));
    }
  }
  c.Expect(rr.p_value && std::fabs(*rr.p_value - 0.077) <= kPosPTolerance,
           "released closed vs open p");
  c.Note("released p " + (rr.p_value ? Fmt(*rr.p_value) : std::string("n/a")));
}

// Judge service driven through the CLI server process.
class ServerProcess {
 public:
  ServerProcess(const testing::TempDir& dir, const std::vector<std::string>& args) {
    const std::string out = dir.File("serve.out");
    pid_ = testing::SpawnCli(args, out, dir.File("serve.err"));
    for (int i = 0; i < 1000 && port_ == 0; ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
      const std::string s = ReadFile(out);
      const auto colon = s.rfind(':');
      if (s.find("listening on") != std::string::npos && s.back() == '\n') {
        port_ = std::atoi(s.c_str() + colon + 1);
      }
    }
    if (port_ == 0) throw std::runtime_error("server did not start: " + ReadFile(dir.File("serve.err")));
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(10);
  }
  ~ServerProcess() {
    if (pid_ > 0) Kill(SIGTERM);
  }

  void Kill(int sig) {
    ::kill(pid_, sig);
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }

  std::pair<int, Json> Post(const std::string& path, const Json& body) {
    return Parse(client_->Post(path, body.dump(), "application/json"));
  }
  std::pair<int, Json> Get(const std::string& path) { return Parse(client_->Get(path)); }
  int port() const { return port_; }

 private:
  static std::pair<int, Json> Parse(const httplib::Result& res) {
    if (!res) return {0, Json()};
    return {res->status, Json::parse(res->body, nullptr, false)};
  }

  int pid_ = -1;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

// 9
void JudgeService(Checker& c) {
  testing::TempDir dir;
  const auto bundles = testing::RandomBundles(909, 3000);
  const auto gen = pairgen::GeneratePairs(bundles, {909, 335, "de-en", nullptr});
  c.Expect(gen.pairs.size() == 335, "fixture has " + std::to_string(gen.pairs.size()) + " pairs");
  std::vector<Json> records;
  std::map<std::string, const pairgen::MinimalPair*> by_id;
  for (const auto& p : gen.pairs) {
    records.push_back(pairgen::ToJson(p));
    by_id[p.pair_id] = &p;
  }
  WriteJsonl(dir.File("pairs.jsonl"), records);
  const std::vector<std::string> args = {"judge", "serve", "--pairs", dir.File("pairs.jsonl"),
                                         "--plan", dir.File("plan.json"), "--log",
                                         dir.File("judgments.jsonl"), "--port", "0"};
  const std::vector<std::string> pool = {"ann1", "ann2", "ann3", "ann4", "ann5"};
  const std::uint64_t seed = 2026;

  std::map<std::string, std::string> tokens;
  {
    ServerProcess s(dir, args);
    const auto [status, plan] =
        s.Post("/api/plan", {{"pool", pool}, {"k", 3}, {"seed", seed}});
    c.Expect(status == 200, "plan status " + std::to_string(status));
    if (status != 200) return;
    std::map<std::string, std::vector<std::size_t>> batches;
    for (const auto& b : plan["batches"]) {
      batches[b["annotator_id"]].push_back(b["pair_ids"].size());
    }
    for (const auto& a : pool) {
      c.Expect(batches[a] == std::vector<std::size_t>{67, 67, 67}, a + " batches");
      tokens[a] = plan["tokens"][a];
    }
  }

  // (annotator, pair) -> acknowledged choice; and the text shown as A.
  std::map<std::pair<std::string, std::string>, std::string> acked;
  std::map<std::pair<std::string, std::string>, std::string> shown_a;
  CounterRng rng(StreamKey(seed, "crash"));
  std::size_t duplicates_checked = 0;
  for (int round = 0; round <= kCrashes; ++round) {
    ServerProcess s(dir, args);
    // Everything acknowledged before the crash is still there.
    const auto [es, exported] = s.Get("/api/export");
    c.Expect(es == 200, "export status");
    std::map<std::pair<std::string, std::string>, std::string> present;
    std::size_t total = 0;
    for (const auto& r : exported["records"]) {
      ++total;
      present[{r["annotator_id"], r["pair_id"]}] = r["choice"];
    }
    c.Expect(present.size() == total, "duplicate records after restart");
    for (const auto& [key, choice] : acked) {
      auto it = present.find(key);
      c.Expect(it != present.end() && it->second == choice,
               "lost " + key.first + "/" + key.second + " after crash " + std::to_string(round));
    }
    if (round == kCrashes) break;

    const std::string ann = pool[round % pool.size()];
    const std::string& token = tokens[ann];
    if (!acked.empty()) {
      auto it = acked.begin();
      std::advance(it, static_cast<long>(rng.Below(acked.size())));
      const auto [ds, dup] = s.Post("/api/submit", {{"token", tokens[it->first.first]},
                                                    {"pair_id", it->first.second},
                                                    {"choice", it->second == "A" ? "B" : "A"}});
      c.Expect(ds == 409 && dup["record"]["choice"] == it->second, "duplicate accepted");
      ++duplicates_checked;
    }
    for (int i = 0; i < 3; ++i) {
      const auto [ns, item] = s.Post("/api/next", {{"token", token}});
      if (ns != 200 || item["status"] != "item") break;
      const std::string pid = item["pair_id"];
      const std::string text_a = item["a"]["text"];
      const auto key = std::make_pair(ann, pid);
      auto [seen, fresh] = shown_a.emplace(key, text_a);
      c.Expect(seen->second == text_a, "presentation changed for " + pid);
      const auto* pair = by_id.at(pid);
      const bool obs_first = judge::ObservedFirst(seed, pid, ann);
      c.Expect(text_a == (obs_first ? pair->observed.record.text : pair->manipulated.record.text),
               "presentation bit for " + pid);
      const std::string choice = rng.Below(2) == 0 ? "A" : "B";
      const auto [ss, sub] =
          s.Post("/api/submit", {{"token", token}, {"pair_id", pid}, {"choice", choice}});
      if (ss == 200) acked[key] = choice;
      c.Expect(ss == 200, "submit status " + std::to_string(ss));
    }
    // One more submit in flight when the process dies.
    const auto [ns, item] = s.Post("/api/next", {{"token", token}});
    std::thread inflight;
    if (ns == 200 && item["status"] == "item") {
      const int port = s.port();
      const Json body = {{"token", token}, {"pair_id", item["pair_id"]}, {"choice", "A"}};
      inflight = std::thread([port, body] {
        httplib::Client client("127.0.0.1", port);
        client.set_read_timeout(2);
        client.Post("/api/submit", body.dump(), "application/json");
      });
      std::this_thread::sleep_for(std::chrono::microseconds(rng.Below(2000)));
    }
    s.Kill(SIGKILL);
    if (inflight.joinable()) inflight.join();
  }
  c.Note(std::to_string(acked.size()) + " acknowledged judgments across " +
         std::to_string(kCrashes) + " SIGKILLs, " + std::to_string(duplicates_checked) +
         " duplicates rejected");
}

// 10
void EndToEnd(Checker& c) {
  const Json oracle =
      Json::parse(ReadFile(testing::TestDataPath("corpus20/funnel_oracle.json")));
  std::map<std::string, std::string> artifacts[2];
  for (int run = 0; run < 2; ++run) {
    testing::TempDir dir;
    Json j = Json::parse(ReadFile(testing::TestDataPath("corpus20/config.json")));
    j["out_dir"] = dir.path();
    const auto start = std::chrono::steady_clock::now();
    const auto config = pipeline::PipelineConfig::Parse(j, testing::TestDataPath("corpus20"));
    const auto summary = pipeline::RunPipeline(config);
    const double secs = Seconds(start);
    c.Expect(secs < kPipelineSeconds, "runtime " + Fmt(secs) + " s");
    std::map<std::string, Json> got;
    for (const auto& s : summary.stages) got[s.stage] = pipeline::ToJson(s);
    for (const auto& [stage, want] : oracle["stages"].items()) {
      c.Expect(got.count(stage) && got[stage]["input"] == want["input"] &&
                   got[stage]["output"] == want["output"] &&
                   got[stage]["rejections"] == want["rejections"],
               "funnel stage " + stage);
    }
    const double want_acc = oracle["accuracy"]["correct"].get<double>() /
                            oracle["accuracy"]["total"].get<double>();
    c.Expect(summary.accuracy && *summary.accuracy == want_acc, "accuracy");
    for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
      artifacts[run][entry.path().filename().string()] = ReadFile(entry.path().string());
    }
    if (run == 0) c.Note(Fmt(secs, 3) + " s");
  }
  c.Expect(!artifacts[0].empty() && artifacts[0] == artifacts[1], "rerun not byte-identical");
}

}  // namespace
}  // namespace acs

int main() {
  const std::vector<std::pair<std::string, std::function<void(acs::Checker&)>>> criteria = {
      {"golden worked-example pair", acs::GoldenPair},
      {"pair constraint properties", acs::PropertySuite},
      {"gate boundaries", acs::GateBoundaries},
      {"Levenshtein vs exhaustive oracle", acs::LevenshteinOracle},
      {"permutation tests", acs::Permutation},
      {"Fleiss kappa", acs::Kappa},
      {"accuracy and margin", acs::AccuracyMargin},
      {"POS margin analysis", acs::PosAnalysis},
      {"judge service over the wire", acs::JudgeService},
      {"end-to-end fixture pipeline", acs::EndToEnd},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    acs::Checker checker;
    try {
      criteria[i].second(checker);
    } catch (const std::exception& e) {
      checker.Expect(false, std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << (checker.ok() ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!checker.ok()) line << ": " << checker.first_failure();
    if (!checker.notes().empty()) line << " (" << checker.notes() << ")";
    std::cout << line.str() << std::endl;
    if (!checker.ok()) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
