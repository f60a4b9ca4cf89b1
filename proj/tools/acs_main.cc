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

// acs: command-line driver for every pipeline stage.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 backend error.

#include <signal.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "acs/bundle.h"
#include "acs/error.h"
#include "acs/http_backends.h"
#include "acs/ingest.h"
#include "acs/jsonl.h"
#include "acs/judge.h"
#include "acs/judge_server.h"
#include "acs/lid.h"
#include "acs/pairgen.h"
#include "acs/pipeline.h"
#include "acs/scoring.h"
#include "acs/stats.h"
#include "acs/text.h"

namespace {

using acs::Json;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::string lang_pair = "de-en";
};

acs::ArtifactMeta Meta(const std::string& artifact, const Json& params,
                       const Globals& g) {
  return {artifact, acs::pipeline::HashConfig(params), g.seed};
}

void PrintReport(const acs::pipeline::StageReport& r) {
  std::cerr << r.stage << ": " << r.input << " in, " << r.output << " out";
  for (const auto& [reason, n] : r.rejections) std::cerr << ", " << reason << "=" << n;
  std::cerr << "\n";
}

template <typename T, typename F>
std::vector<T> ReadRecords(const std::string& path, F from_json) {
  std::vector<T> out;
  acs::JsonlFile f = acs::ReadJsonl(path);
  for (std::size_t i = 0; i < f.records.size(); ++i) {
    try {
      out.push_back(from_json(f.records[i]));
    } catch (const acs::Error& e) {
      throw acs::DataError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
std::vector<Json> Records(const std::vector<T>& items) {
  std::vector<Json> out;
  for (const auto& x : items) out.push_back(ToJson(x));
  return out;
}

std::vector<double> ReadNumbers(const std::string& path) {
  std::vector<double> out;
  for (const auto& field : acs::text::SplitWhitespace(acs::ReadFile(path))) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw acs::DataError(path + ": not a number: " + field);
    }
  }
  return out;
}

acs::stats::JudgmentMatrix ReadMatrix(const std::string& path) {
  acs::stats::JudgmentMatrix m;
  std::istringstream in(acs::ReadFile(path));
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto fields = acs::text::SplitWhitespace(line);
    if (fields.empty()) continue;
    std::vector<int> row;
    for (const auto& f : fields) {
      try {
        row.push_back(std::stoi(f));
      } catch (const std::exception&) {
        throw acs::DataError(path + ": not a count: " + f);
      }
    }
    int sum = 0;
    for (int c : row) sum += c;
    if (m.counts.empty()) m.raters = sum;
    m.counts.push_back(std::move(row));
  }
  return m;
}

std::vector<std::string> SplitComma(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = std::string(acs::text::Trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void Emit(const Json& records, const std::string& table, const std::string& format) {
  if (format == "table") {
    std::cout << table;
  } else {
    std::cout << records.dump() << "\n";
  }
}

// Blocks SIGINT/SIGTERM and stops `server` when one arrives.
std::thread StopOnSignal(acs::judge::JudgeServer& server) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return std::thread([set, &server]() {
    int sig = 0;
    sigwait(&set, &sig);
    server.Stop();
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code-switching minimal pair toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->default_val(0);
  app.add_option("--lang-pair", g.lang_pair, "Language pair, e.g. de-en")
      ->default_val("de-en");

  std::function<void()> action;

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Normalize, segment and length-gate documents");
  std::string ingest_in, ingest_out, obscene_path, segmenter = "fallback";
  std::size_t max_chars = 200, min_tokens = 6;
  ingest_cmd->add_option("--in", ingest_in, "Documents JSONL")->required();
  ingest_cmd->add_option("--out", ingest_out, "Sentences JSONL")->required();
  ingest_cmd->add_option("--obscene-list", obscene_path, "Obscene word list");
  ingest_cmd->add_option("--segmenter", segmenter, "Endpoint URL or 'fallback'");
  ingest_cmd->add_option("--max-chars", max_chars);
  ingest_cmd->add_option("--min-tokens", min_tokens);
  ingest_cmd->callback([&] {
    action = [&] {
      auto docs = ReadRecords<acs::ingest::RawDocument>(ingest_in, acs::ingest::DocumentFromJson);
      std::optional<acs::ingest::WordSet> obscene;
      if (!obscene_path.empty()) obscene = acs::ingest::WordSet::Load(obscene_path);
      std::unique_ptr<acs::ingest::SegmentationBackend> seg;
      if (segmenter == "fallback") {
        seg = std::make_unique<acs::ingest::FallbackSegmenter>();
      } else {
        seg = std::make_unique<acs::ingest::HttpSegmenter>(segmenter);
      }
      acs::pipeline::IngestOptions opt;
      opt.obscene = obscene ? &*obscene : nullptr;
      opt.segmenter = seg.get();
      opt.limits = {max_chars, min_tokens};
      auto r = acs::pipeline::RunIngest(docs, opt);
      Json params = {{"stage", "ingest"}, {"segmenter", segmenter},
                     {"max_chars", max_chars}, {"min_tokens", min_tokens}};
      acs::WriteJsonl(ingest_out, Records(r.sentences), Meta("sentences", params, g));
      PrintReport(r.documents);
      PrintReport(r.sentence_gate);
    };
  });

  // lid
  auto* lid_cmd = app.add_subcommand("lid", "Label tokens and apply the LID gates");
  std::string lid_in, lid_out, lexicon_manifest, mono_lid = "none", lid_seed_dir, claim;
  bool han = false;
  double unknown_ratio = 0.5, ne_threshold = 0.75;
  lid_cmd->add_option("--in", lid_in, "Sentences JSONL")->required();
  lid_cmd->add_option("--out", lid_out, "CS sentences JSONL")->required();
  lid_cmd->add_option("--lexicons", lexicon_manifest, "Lexicon manifest JSON");
  lid_cmd->add_option("--mono-lid", mono_lid, "'trigram', 'none' or an endpoint URL");
  lid_cmd->add_option("--lid-seed-dir", lid_seed_dir, "Seed text for the trigram classifier");
  lid_cmd->add_option("--claim", claim, "Language code when a sentence carries none");
  lid_cmd->add_flag("--han", han, "Use the Chinese character rule instead of wordlists");
  lid_cmd->add_option("--max-unknown-ratio", unknown_ratio);
  lid_cmd->add_option("--ne-threshold", ne_threshold);
  lid_cmd->callback([&] {
    action = [&] {
      auto sentences = ReadRecords<acs::ingest::SentenceRecord>(lid_in, acs::ingest::SentenceFromJson);
      std::optional<acs::lid::LexiconSet> lex;
      if (!han) {
        if (lexicon_manifest.empty()) throw acs::UsageError("--lexicons is required without --han");
        lex = acs::lid::LexiconSet::LoadManifest(lexicon_manifest);
      }
      std::unique_ptr<acs::lid::MonoLidBackend> mono;
      if (mono_lid == "trigram") {
        if (lid_seed_dir.empty()) throw acs::UsageError("--mono-lid trigram needs --lid-seed-dir");
        mono = std::make_unique<acs::lid::TrigramProfileClassifier>(
            acs::lid::TrigramProfileClassifier::FromDirectory(lid_seed_dir));
      } else if (mono_lid != "none") {
        mono = std::make_unique<acs::lid::HttpMonoLid>(mono_lid);
      }
      acs::pipeline::LidOptions opt;
      opt.mode = han ? acs::pipeline::LidMode::kHan : acs::pipeline::LidMode::kWordlist;
      opt.lexicons = lex ? &*lex : nullptr;
      opt.mono_lid = mono.get();
      opt.default_claim = claim.empty() ? g.lang_pair.substr(0, g.lang_pair.find('-')) : claim;
      opt.max_unknown_ratio = unknown_ratio;
      opt.ne_threshold = ne_threshold;
      auto r = acs::pipeline::RunLid(sentences, opt);
      Json params = {{"stage", "lid"}, {"han", han}, {"mono_lid", mono_lid},
                     {"max_unknown_ratio", unknown_ratio}, {"ne_threshold", ne_threshold}};
      acs::WriteJsonl(lid_out, Records(r.sentences), Meta("cs_sentences", params, g));
      PrintReport(r.report);
    };
  });

  // bundle
  auto* bundle_cmd = app.add_subcommand("bundle", "Validate or gate annotation bundles");
  bundle_cmd->require_subcommand(1);
  auto* validate_cmd = bundle_cmd->add_subcommand("validate", "Check every bundle's invariants");
  std::string bundle_in, bundle_out;
  std::size_t min_distance = 5;
  validate_cmd->add_option("--in", bundle_in, "Bundles JSONL")->required();
  validate_cmd->callback([&] {
    action = [&] {
      acs::JsonlFile f = acs::ReadJsonl(bundle_in);
      for (std::size_t i = 0; i < f.records.size(); ++i) {
        try {
          acs::bundle::ValidateBundle(acs::bundle::BundleFromJson(f.records[i]));
        } catch (const acs::Error& e) {
          throw acs::ValidationError(bundle_in + ":" + std::to_string(i + 1) + ": " + e.what());
        }
      }
      std::cout << f.records.size() << " bundles valid\n";
    };
  });
  auto* gate_cmd = bundle_cmd->add_subcommand("gate", "Apply the translation residue and X-tag gates");
  gate_cmd->add_option("--in", bundle_in, "Bundles JSONL")->required();
  gate_cmd->add_option("--out", bundle_out, "Kept bundles JSONL")->required();
  gate_cmd->add_option("--min-distance", min_distance, "Minimum edit distance to each translation");
  gate_cmd->callback([&] {
    action = [&] {
      auto bundles = ReadRecords<acs::bundle::AnnotationBundle>(bundle_in, acs::bundle::BundleFromJson);
      auto r = acs::pipeline::RunBundleGate(bundles, nullptr, {min_distance, "X"});
      Json params = {{"stage", "bundle"}, {"min_distance", min_distance}};
      acs::WriteJsonl(bundle_out, Records(r.bundles), Meta("bundles", params, g));
      PrintReport(r.report);
    };
  });

  // genpairs
  auto* gen_cmd = app.add_subcommand("genpairs", "Generate minimal pairs from gated bundles");
  std::string gen_in, gen_out, mwe_path;
  std::size_t cap = 1000;
  gen_cmd->add_option("--in", gen_in, "Bundles JSONL")->required();
  gen_cmd->add_option("--out", gen_out, "Pairs JSONL")->required();
  gen_cmd->add_option("--mwe", mwe_path, "Multi-word expression list");
  gen_cmd->add_option("--cap", cap, "Maximum pairs per language pair");
  gen_cmd->callback([&] {
    action = [&] {
      auto bundles = ReadRecords<acs::bundle::AnnotationBundle>(gen_in, acs::bundle::BundleFromJson);
      std::optional<acs::bundle::MweLexicon> mwe;
      if (!mwe_path.empty()) mwe = acs::bundle::MweLexicon::Load(mwe_path);
      acs::pairgen::GenerateOptions opt;
      opt.seed = g.seed;
      opt.cap = cap;
      opt.lang_pair = g.lang_pair;
      opt.mwe_lexicon = mwe ? &*mwe : nullptr;
      auto r = acs::pipeline::RunGenpairs(bundles, opt);
      Json params = {{"stage", "genpairs"}, {"cap", cap}, {"lang_pair", g.lang_pair},
                     {"mwe", !mwe_path.empty()}};
      acs::WriteJsonl(gen_out, Records(r.pairs), Meta("pairs", params, g));
      PrintReport(r.report);
    };
  });

  // score
  auto* score_cmd = app.add_subcommand("score", "Score minimal pairs");
  std::string score_pairs, endpoint, scores_path, score_out, failures_out, scorer_kind = "autoregressive";
  acs::scoring::ScoreOptions score_opt;
  score_cmd->add_option("--pairs", score_pairs, "Pairs JSONL")->required();
  auto* ep = score_cmd->add_option("--endpoint", endpoint, "Scorer endpoint URL");
  auto* sf = score_cmd->add_option("--scores", scores_path, "Score file");
  ep->excludes(sf);
  score_cmd->add_option("--out", score_out, "Scored pairs JSONL")->required();
  score_cmd->add_option("--failures", failures_out, "Failure manifest JSONL");
  score_cmd->add_option("--kind", scorer_kind)->check(CLI::IsMember({"autoregressive", "masked"}));
  score_cmd->add_option("--batch-size", score_opt.batch_size);
  score_cmd->add_option("--retries", score_opt.retries);
  score_cmd->add_option("--max-inflight", score_opt.max_inflight);
  score_cmd->callback([&] {
    action = [&] {
      if (endpoint.empty() == scores_path.empty()) {
        throw acs::UsageError("give exactly one of --endpoint or --scores");
      }
      auto pairs = ReadRecords<acs::pairgen::MinimalPair>(score_pairs, acs::pairgen::PairFromJson);
      std::unique_ptr<acs::scoring::ScorerBackend> backend;
      if (!endpoint.empty()) {
        backend = std::make_unique<acs::scoring::EndpointScorer>(
            endpoint, endpoint,
            scorer_kind == "masked" ? acs::scoring::ScorerKind::kMasked
                                    : acs::scoring::ScorerKind::kAutoregressive);
      } else {
        backend = std::make_unique<acs::scoring::FileScorer>(
            acs::scoring::FileScorer::Load(scores_path));
      }
      auto r = acs::pipeline::RunScore(pairs, *backend, score_opt);
      Json params = {{"stage", "score"}, {"scorer", backend->Id()}};
      acs::WriteJsonl(score_out, Records(r.run.scored), Meta("scored", params, g));
      std::vector<Json> failures;
      for (const auto& f : r.run.failures) {
        failures.push_back({{"pair_id", f.pair_id}, {"reason", f.reason}});
        std::cerr << "failed " << f.pair_id << ": " << f.reason << "\n";
      }
      if (!failures_out.empty()) {
        acs::WriteJsonl(failures_out, failures, Meta("score_failures", params, g));
      }
      PrintReport(r.report);
      if (!r.run.scored.empty()) {
        std::cerr << "accuracy: " << acs::scoring::Accuracy(r.run.scored) << "\n";
      }
    };
  });

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Significance tests and agreement");
  stats_cmd->require_subcommand(1);
  std::string format = "table", file_a, file_b, judgments_path, pairs_path, matrix_path,
              scored_path, mode = "auto", statistic = "mean";
  acs::stats::PermutationConfig perm;
  int raters = 3;
  std::size_t min_group = 10;
  auto add_perm = [&](CLI::App* c) {
    c->add_option("--resamples", perm.resamples)->default_val(10000);
    c->add_option("--alpha", perm.alpha)->default_val(0.05);
    c->add_option("--workers", perm.workers)->default_val(1);
    c->add_option("--mode", mode)->check(CLI::IsMember({"auto", "exact", "mc"}));
  };
  auto apply_perm = [&] {
    perm.seed = g.seed;
    perm.mode = mode == "exact" ? acs::stats::PermutationMode::kExact
                : mode == "mc"  ? acs::stats::PermutationMode::kMonteCarlo
                                : acs::stats::PermutationMode::kAuto;
  };
  stats_cmd->add_option("--format", format)->check(CLI::IsMember({"table", "records"}));
  auto perm_table = [](const acs::stats::PermutationResult& r) {
    std::ostringstream out;
    out << "statistic\t" << r.statistic << "\np\t" << r.p_value << "\nmode\t"
        << (r.exact ? "exact" : "monte-carlo") << "\npermutations\t" << r.permutations << "\n";
    return out.str();
  };

  auto* pp = stats_cmd->add_subcommand("perm-paired", "Paired permutation test");
  pp->add_option("--a", file_a, "Per-item values, whitespace separated")->required();
  pp->add_option("--b", file_b)->required();
  add_perm(pp);
  pp->callback([&] {
    action = [&] {
      apply_perm();
      auto a = ReadNumbers(file_a), b = ReadNumbers(file_b);
      auto r = acs::stats::PairedPermutationTest(a, b, perm);
      Emit(ToJson(r), perm_table(r), format);
    };
  });

  auto* pu = stats_cmd->add_subcommand("perm-unpaired", "Unpaired permutation test");
  pu->add_option("--a", file_a)->required();
  pu->add_option("--b", file_b)->required();
  pu->add_option("--statistic", statistic)->check(CLI::IsMember({"mean", "median"}));
  add_perm(pu);
  pu->callback([&] {
    action = [&] {
      apply_perm();
      auto a = ReadNumbers(file_a), b = ReadNumbers(file_b);
      auto r = acs::stats::UnpairedPermutationTest(
          a, b, perm,
          statistic == "median" ? acs::stats::Statistic::kMedian : acs::stats::Statistic::kMean);
      Emit(ToJson(r), perm_table(r), format);
    };
  });

  auto* kc = stats_cmd->add_subcommand("kappa", "Fleiss's kappa");
  auto* jopt = kc->add_option("--judgments", judgments_path, "Exported judgments JSONL");
  auto* mopt = kc->add_option("--matrix", matrix_path, "Item x category counts, one item per line");
  jopt->excludes(mopt);
  kc->add_option("--raters", raters, "Raters per item (with --judgments)");
  kc->callback([&] {
    action = [&] {
      acs::stats::JudgmentMatrix m;
      if (!matrix_path.empty()) {
        m = ReadMatrix(matrix_path);
      } else if (!judgments_path.empty()) {
        auto records = ReadRecords<acs::judge::JudgmentRecord>(judgments_path, acs::judge::JudgmentFromJson);
        m = acs::stats::BuildJudgmentMatrix(records, raters);
      } else {
        throw acs::UsageError("give --judgments or --matrix");
      }
      double k = acs::stats::FleissKappa(m);
      Json j = {{"kappa", k}, {"items", m.counts.size()}, {"raters", m.raters},
                {"categories", m.categories()}};
      std::ostringstream t;
      t << "kappa\t" << k << "\nitems\t" << m.counts.size() << "\nraters\t" << m.raters
        << "\ncategories\t" << m.categories() << "\n";
      Emit(j, t.str(), format);
    };
  });

  auto* ag = stats_cmd->add_subcommand("agreement", "Accuracy against the observed sentence");
  ag->add_option("--judgments", judgments_path)->required();
  ag->add_option("--pairs", pairs_path, "Pairs JSONL")->required();
  ag->callback([&] {
    action = [&] {
      auto records = ReadRecords<acs::judge::JudgmentRecord>(judgments_path, acs::judge::JudgmentFromJson);
      std::set<std::string> known;
      for (const Json& j : acs::ReadJsonl(pairs_path).records) {
        known.insert(j.at("pair_id").get<std::string>());
      }
      auto r = acs::stats::GoldAgreement(records, known);
      Emit(ToJson(r), FormatTable(r), format);
    };
  });

  auto* pos = stats_cmd->add_subcommand("pos", "Absolute margin by part of speech");
  pos->add_option("--pairs", pairs_path)->required();
  pos->add_option("--scores", scored_path, "Scored pairs JSONL or score file")->required();
  pos->add_option("--min-group", min_group);
  add_perm(pos);
  pos->callback([&] {
    action = [&] {
      apply_perm();
      auto pairs = ReadRecords<acs::pairgen::MinimalPair>(pairs_path, acs::pairgen::PairFromJson);
      auto scored = acs::scoring::LoadScoredPairs(scored_path);
      auto r = acs::stats::PosMarginAnalysis(pairs, scored, perm, min_group);
      Emit(ToJson(r), FormatTable(r), format);
    };
  });

  auto* bk = stats_cmd->add_subcommand("buckets", "Margin by number of agreeing annotators");
  bk->add_option("--judgments", judgments_path)->required();
  bk->add_option("--scores", scored_path)->required();
  bk->add_option("--raters", raters);
  add_perm(bk);
  bk->callback([&] {
    action = [&] {
      apply_perm();
      auto records = ReadRecords<acs::judge::JudgmentRecord>(judgments_path, acs::judge::JudgmentFromJson);
      auto scored = acs::scoring::LoadScoredPairs(scored_path);
      auto r = acs::stats::MarginVsAgreement(records, scored, raters, perm);
      Emit(ToJson(r), FormatTable(r), format);
    };
  });

  // judge
  auto* judge_cmd = app.add_subcommand("judge", "Human judgment collection");
  judge_cmd->require_subcommand(1);
  std::string plan_path, pool_arg, log_path = "judgments.jsonl", host = "127.0.0.1", export_out;
  int k = 1, port = 8080;
  std::size_t batch_size = acs::judge::kDefaultBatchSize;
  bool complete_only = false;

  auto* plan_cmd = judge_cmd->add_subcommand("plan", "Assign pairs to annotators");
  plan_cmd->add_option("--pairs", pairs_path)->required();
  plan_cmd->add_option("--pool", pool_arg, "Comma-separated annotator ids")->required();
  plan_cmd->add_option("--k", k, "Annotators per pair");
  plan_cmd->add_option("--batch-size", batch_size);
  plan_cmd->add_option("--out", plan_path)->required();
  plan_cmd->callback([&] {
    action = [&] {
      std::vector<std::string> ids;
      for (const Json& j : acs::ReadJsonl(pairs_path).records) {
        ids.push_back(j.at("pair_id").get<std::string>());
      }
      auto pool = SplitComma(pool_arg);
      auto plan = acs::judge::PlanAssignments(ids, pool, k, g.seed, batch_size);
      acs::WriteFile(plan_path, ToJson(plan).dump(2) + "\n");
      for (const auto& a : pool) {
        std::cout << a << "\t" << plan.tokens.at(a) << "\n";
      }
    };
  });

  auto* serve_cmd = judge_cmd->add_subcommand("serve", "Serve the judgment wire API");
  serve_cmd->add_option("--pairs", pairs_path)->required();
  serve_cmd->add_option("--plan", plan_path, "Plan JSON, created by POST /api/plan if absent")
      ->required();
  serve_cmd->add_option("--port", port, "0 picks a free port");
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--log", log_path, "Append-only judgment log");
  serve_cmd->callback([&] {
    action = [&] {
      auto pairs = ReadRecords<acs::pairgen::MinimalPair>(pairs_path, acs::pairgen::PairFromJson);
      acs::judge::ServerConfig cfg;
      cfg.views = acs::judge::ViewsOf(pairs);
      cfg.plan_path = plan_path;
      cfg.log_path = log_path;
      acs::judge::JudgeServer server(std::move(cfg));
      int bound = server.Bind(host, port);
      if (bound < 0) throw acs::UsageError("cannot bind " + host);
      std::thread stopper = StopOnSignal(server);
      std::cout << "listening on " << host << ":" << bound << std::endl;
      server.Serve();
      stopper.join();
    };
  });

  auto* export_cmd = judge_cmd->add_subcommand("export", "Export resolved judgments");
  export_cmd->add_option("--log", log_path);
  export_cmd->add_option("--plan", plan_path, "Order by plan and allow --complete-only");
  export_cmd->add_option("--out", export_out)->required();
  export_cmd->add_flag("--complete-only", complete_only, "Only finished batches");
  export_cmd->callback([&] {
    action = [&] {
      auto records = acs::judge::ReadJudgmentLog(log_path);
      if (!plan_path.empty()) {
        auto plan = acs::judge::PlanFromJson(Json::parse(acs::ReadFile(plan_path)));
        std::map<std::pair<std::string, std::string>, std::size_t> position;
        std::map<std::pair<std::string, int>, std::size_t> batch_size_of;
        std::map<std::string, std::size_t> next;
        for (const auto& b : plan.batches) {
          for (const auto& pid : b.pair_ids) position[{b.annotator_id, pid}] = next[b.annotator_id]++;
          batch_size_of[{b.annotator_id, b.index}] = b.pair_ids.size();
        }
        std::stable_sort(records.begin(), records.end(), [&](const auto& x, const auto& y) {
          if (x.annotator_id != y.annotator_id) return x.annotator_id < y.annotator_id;
          return position[{x.annotator_id, x.pair_id}] < position[{y.annotator_id, y.pair_id}];
        });
        if (complete_only) {
          std::map<std::pair<std::string, int>, std::size_t> judged;
          for (const auto& r : records) ++judged[{r.annotator_id, r.batch_index}];
          std::erase_if(records, [&](const auto& r) {
            return judged[{r.annotator_id, r.batch_index}] !=
                   batch_size_of[{r.annotator_id, r.batch_index}];
          });
        }
      } else {
        if (complete_only) throw acs::UsageError("--complete-only needs --plan");
        std::stable_sort(records.begin(), records.end(), [](const auto& x, const auto& y) {
          return x.annotator_id < y.annotator_id;
        });
      }
      acs::WriteJsonl(export_out, Records(records));
      std::cerr << records.size() << " judgments exported\n";
    };
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the configured pipeline");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "Pipeline config JSON")->required();
  run_cmd->callback([&] {
    action = [&] {
      Json j = Json::parse(acs::ReadFile(config_path), nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw acs::UsageError("config " + config_path + " is not a JSON object");
      }
      // Global flags given on the command line override the file.
      if (app.get_option("--seed")->count() > 0) j["seed"] = g.seed;
      if (app.get_option("--lang-pair")->count() > 0) j["lang_pair"] = g.lang_pair;
      auto config = acs::pipeline::PipelineConfig::Parse(
          j, fs::path(config_path).parent_path().string());
      auto summary = acs::pipeline::RunPipeline(config);
      for (const auto& r : summary.stages) PrintReport(r);
      if (summary.accuracy) std::cerr << "accuracy: " << *summary.accuracy << "\n";
      std::cout << ToJson(summary).dump(2) << "\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (action) action();
  } catch (const acs::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const acs::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const acs::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const Json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
