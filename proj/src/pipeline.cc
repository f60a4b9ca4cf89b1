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

#include "acs/pipeline.h"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

#include "acs/error.h"
#include "acs/http_backends.h"
#include "acs/rng.h"

namespace acs::pipeline {

namespace fs = std::filesystem;

void StageReport::CheckBalanced() const {
  std::size_t rejected = 0;
  for (const auto& [reason, n] : rejections) rejected += n;
  if (output > input || rejected != input - output) {
    throw std::logic_error("stage " + stage + ": rejections (" +
                           std::to_string(rejected) + ") do not account for " +
                           std::to_string(input) + " -> " + std::to_string(output));
  }
}

Json ToJson(const StageReport& r) {
  return {{"stage", r.stage},
          {"input", r.input},
          {"output", r.output},
          {"rejections", r.rejections}};
}

void RethrowInStage(const std::string& stage, const std::string& item) {
  const std::string where = "stage " + stage + ": item " + item + ": ";
  try {
    throw;
  } catch (const BackendError& e) {
    throw BackendError(where + e.what());
  } catch (const UsageError& e) {
    throw UsageError(where + e.what());
  } catch (const DataError& e) {
    throw DataError(where + e.what());
  } catch (const Json::exception& e) {
    throw DataError(where + e.what());
  }
}

IngestResult RunIngest(const std::vector<ingest::RawDocument>& documents,
                       const IngestOptions& options) {
  if (options.segmenter == nullptr) throw UsageError("ingest needs a segmenter");
  IngestResult result;
  result.documents.input = documents.size();
  std::set<std::string> seen;
  for (const auto& doc : documents) {
    try {
      if (!seen.insert(doc.id).second) throw DataError("duplicate document id");
      const std::string normalized = ingest::Normalize(doc.text);
      if (options.obscene != nullptr &&
          !ingest::ObscenityGate(ingest::Tokenize(normalized, options.tokenizer),
                                 *options.obscene)) {
        ++result.documents.rejections["obscene"];
        continue;
      }
      ++result.documents.output;
      for (auto& s : ingest::Segment(doc.id, normalized, *options.segmenter,
                                     options.tokenizer)) {
        s.lang_claim = doc.lang_claim;
        ++result.sentence_gate.input;
        if (!ingest::LengthGate(s, options.limits)) {
          ++result.sentence_gate.rejections["length"];
          continue;
        }
        ++result.sentence_gate.output;
        result.sentences.push_back(std::move(s));
      }
    } catch (...) {
      RethrowInStage("ingest", doc.id);
    }
  }
  return result;
}

LidResult RunLid(const std::vector<ingest::SentenceRecord>& sentences,
                 const LidOptions& options) {
  if (options.mode == LidMode::kWordlist && options.lexicons == nullptr) {
    throw UsageError("wordlist LID needs lexicons");
  }
  LidResult result;
  result.report.input = sentences.size();
  for (const auto& s : sentences) {
    try {
      lid::CsSentence cs;
      if (options.mode == LidMode::kHan) {
        cs = lid::HanLid(s);
      } else {
        cs = lid::TagTokens(s, *options.lexicons);
        cs = lid::ReassignBorrowings(std::move(cs), *options.lexicons);
      }
      cs = lid::MarkNamedEntityRuns(std::move(cs), options.ne_threshold);
      const char* reason = nullptr;
      if (options.mode == LidMode::kWordlist &&
          !lid::ForeignCharGate(cs, *options.lexicons)) {
        reason = "foreign_char";
      } else if (!lid::UnknownGate(cs, options.max_unknown_ratio)) {
        reason = "unknown_ratio";
      } else if (!lid::CsQualification(cs)) {
        reason = "not_code_switched";
      } else if (options.mono_lid != nullptr &&
                 !lid::ConsistencyCheck(cs, *options.mono_lid,
                                        s.lang_claim.empty() ? options.default_claim
                                                             : s.lang_claim)) {
        reason = "lid_mismatch";
      }
      if (reason != nullptr) {
        ++result.report.rejections[reason];
        continue;
      }
      ++result.report.output;
      result.sentences.push_back(std::move(cs));
    } catch (...) {
      RethrowInStage("lid", s.Id());
    }
  }
  return result;
}

BundleResult RunBundleGate(const std::vector<bundle::AnnotationBundle>& bundles,
                           const std::vector<lid::CsSentence>* sentences,
                           const bundle::ResidueGateConfig& gate) {
  BundleResult result;
  std::map<std::string, const bundle::AnnotationBundle*> by_id;
  for (const auto& b : bundles) {
    if (!by_id.emplace(b.id, &b).second) {
      throw DataError("stage bundle: item " + b.id + ": duplicate bundle id");
    }
  }
  auto admit = [&](bundle::AnnotationBundle b) {
    b = bundle::ValidateBundle(std::move(b));
    switch (bundle::TranslationCsResidueCheck(b, gate)) {
      case bundle::GateResult::kTranslationResidue:
        ++result.report.rejections["translation_residue"];
        return;
      case bundle::GateResult::kXTag:
        ++result.report.rejections["x_tag"];
        return;
      case bundle::GateResult::kKeep:
        break;
    }
    ++result.report.output;
    result.bundles.push_back(std::move(b));
  };
  if (sentences == nullptr) {
    result.report.input = bundles.size();
    for (const auto& b : bundles) {
      try {
        admit(b);
      } catch (...) {
        RethrowInStage("bundle", b.id);
      }
    }
    return result;
  }
  result.report.input = sentences->size();
  for (const auto& cs : *sentences) {
    const std::string id = cs.Id();
    try {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        ++result.report.rejections["no_bundle"];
        continue;
      }
      bundle::AnnotationBundle b = *it->second;
      if (b.cs.tokens() != cs.tokens()) {
        throw DataError("bundle tokens differ from the identified sentence");
      }
      b.cs = cs;
      admit(std::move(b));
    } catch (...) {
      RethrowInStage("bundle", id);
    }
  }
  return result;
}

GenpairsResult RunGenpairs(const std::vector<bundle::AnnotationBundle>& bundles,
                           const pairgen::GenerateOptions& options) {
  GenpairsResult result;
  pairgen::GenerateResult g;
  try {
    g = pairgen::GeneratePairs(bundles, options);
  } catch (...) {
    RethrowInStage("genpairs", "(corpus)");
  }
  result.report.input = g.input;
  result.report.output = g.pairs.size();
  result.report.rejections = g.rejections;
  result.pairs = std::move(g.pairs);
  return result;
}

std::vector<scoring::PairTexts> TextsOf(const std::vector<pairgen::MinimalPair>& pairs) {
  std::vector<scoring::PairTexts> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({p.pair_id, p.observed.record.text, p.manipulated.record.text});
  }
  return out;
}

ScoreStageResult RunScore(const std::vector<pairgen::MinimalPair>& pairs,
                          scoring::ScorerBackend& backend,
                          const scoring::ScoreOptions& options) {
  ScoreStageResult result;
  auto texts = TextsOf(pairs);
  result.run = scoring::ScorePairs(texts, backend, options);
  result.report.input = pairs.size();
  result.report.output = result.run.scored.size();
  for (const auto& f : result.run.failures) {
    std::string reason = f.reason.substr(0, f.reason.find(':'));
    for (char& c : reason) c = c == ' ' ? '_' : c;
    ++result.report.rejections[reason];
  }
  return result;
}

Json RunStats(const StatsInputs& in) {
  Json out = Json::object();
  if (in.scored != nullptr && !in.scored->empty()) {
    out["scored_pairs"] = in.scored->size();
    out["accuracy"] = scoring::Accuracy(*in.scored);
    if (in.pairs != nullptr) {
      out["pos"] = stats::ToJson(stats::PosMarginAnalysis(
          *in.pairs, *in.scored, in.permutation, in.pos_min_group));
    }
  }
  if (in.judgments != nullptr && !in.judgments->empty()) {
    std::set<std::string> known;
    if (in.pairs != nullptr) {
      for (const auto& p : *in.pairs) known.insert(p.pair_id);
    }
    out["agreement"] = stats::ToJson(stats::GoldAgreement(*in.judgments, known));
    if (in.raters >= 2) {
      auto m = stats::BuildJudgmentMatrix(*in.judgments, in.raters);
      out["kappa"] = m.counts.empty() ? Json(nullptr) : Json(stats::FleissKappa(m));
      if (in.scored != nullptr && !in.scored->empty()) {
        out["buckets"] = stats::ToJson(stats::MarginVsAgreement(
            *in.judgments, *in.scored, in.raters, in.permutation));
      }
    }
  }
  return out;
}

// ---- configuration ----

namespace {

template <typename T>
void Take(const Json& section, const char* key, T& field,
          std::set<std::string>& seen) {
  seen.insert(key);
  auto it = section.find(key);
  if (it == section.end()) return;
  try {
    field = it->get<T>();
  } catch (const Json::exception&) {
    throw UsageError(std::string("config: bad value for '") + key + "'");
  }
}

void RejectUnknown(const Json& section, const std::set<std::string>& seen,
                   const std::string& where) {
  for (const auto& [key, value] : section.items()) {
    if (!seen.count(key)) throw UsageError("config: unknown key '" + where + key + "'");
  }
}

const Json& Section(const Json& j, const char* key) {
  static const Json kEmpty = Json::object();
  auto it = j.find(key);
  if (it == j.end()) return kEmpty;
  if (!it->is_object()) throw UsageError(std::string("config: '") + key + "' must be an object");
  return *it;
}

std::string Resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

}  // namespace

PipelineConfig PipelineConfig::Parse(const Json& j, const std::string& base_dir) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  PipelineConfig c;
  std::set<std::string> seen{"stages", "inputs", "backends", "thresholds"};
  Take(j, "version", c.version, seen);
  if (c.version != 1) throw UsageError("config: unsupported version " + std::to_string(c.version));
  Take(j, "lang_pair", c.lang_pair, seen);
  Take(j, "lang1", c.lang1, seen);
  Take(j, "seed", c.seed, seen);
  Take(j, "out_dir", c.out_dir, seen);
  std::string mode = "wordlist";
  Take(j, "lid_mode", mode, seen);
  if (mode == "wordlist") {
    c.lid_mode = LidMode::kWordlist;
  } else if (mode == "han") {
    c.lid_mode = LidMode::kHan;
  } else {
    throw UsageError("config: lid_mode must be wordlist or han");
  }
  RejectUnknown(j, seen, "");
  if (c.lang1.empty()) c.lang1 = c.lang_pair.substr(0, c.lang_pair.find('-'));

  const Json& st = Section(j, "stages");
  seen.clear();
  Take(st, "ingest", c.stages.ingest, seen);
  Take(st, "lid", c.stages.lid, seen);
  Take(st, "bundle", c.stages.bundle, seen);
  Take(st, "genpairs", c.stages.genpairs, seen);
  Take(st, "score", c.stages.score, seen);
  Take(st, "stats", c.stages.stats, seen);
  RejectUnknown(st, seen, "stages.");

  const Json& in = Section(j, "inputs");
  seen.clear();
  Take(in, "corpus", c.inputs.corpus, seen);
  Take(in, "obscene_list", c.inputs.obscene_list, seen);
  Take(in, "lexicon_manifest", c.inputs.lexicon_manifest, seen);
  Take(in, "bundles", c.inputs.bundles, seen);
  Take(in, "mwe_list", c.inputs.mwe_list, seen);
  Take(in, "lid_seed_dir", c.inputs.lid_seed_dir, seen);
  Take(in, "scores", c.inputs.scores, seen);
  Take(in, "judgments", c.inputs.judgments, seen);
  RejectUnknown(in, seen, "inputs.");

  const Json& be = Section(j, "backends");
  seen.clear();
  Take(be, "segmenter", c.backends.segmenter, seen);
  Take(be, "mono_lid", c.backends.mono_lid, seen);
  Take(be, "scorer", c.backends.scorer, seen);
  Take(be, "scorer_kind", c.backends.scorer_kind, seen);
  RejectUnknown(be, seen, "backends.");
  if (c.backends.scorer_kind != "autoregressive" && c.backends.scorer_kind != "masked") {
    throw UsageError("config: scorer_kind must be autoregressive or masked");
  }

  const Json& th = Section(j, "thresholds");
  seen.clear();
  auto& t = c.thresholds;
  Take(th, "max_chars", t.max_chars, seen);
  Take(th, "min_tokens", t.min_tokens, seen);
  Take(th, "max_unknown_ratio", t.max_unknown_ratio, seen);
  Take(th, "ne_threshold", t.ne_threshold, seen);
  Take(th, "levenshtein_min", t.levenshtein_min, seen);
  Take(th, "pair_cap", t.pair_cap, seen);
  Take(th, "resamples", t.resamples, seen);
  Take(th, "alpha", t.alpha, seen);
  Take(th, "batch_size", t.batch_size, seen);
  Take(th, "pos_min_group", t.pos_min_group, seen);
  Take(th, "raters", t.raters, seen);
  RejectUnknown(th, seen, "thresholds.");
  if (t.max_chars < 1 || t.min_tokens < 1) throw UsageError("config: length limits must be positive");
  if (!(t.max_unknown_ratio > 0 && t.max_unknown_ratio <= 1)) {
    throw UsageError("config: max_unknown_ratio must lie in (0, 1]");
  }
  if (!(t.ne_threshold >= 0 && t.ne_threshold < 1)) {
    throw UsageError("config: ne_threshold must lie in [0, 1)");
  }
  if (t.resamples < 1) throw UsageError("config: resamples must be at least 1");
  if (!(t.alpha > 0 && t.alpha < 1)) throw UsageError("config: alpha must lie in (0, 1)");
  if (t.batch_size < 1 || t.pair_cap < 1) throw UsageError("config: batch_size and pair_cap must be positive");
  if (t.raters < 1) throw UsageError("config: raters must be positive");

  // Hash before resolving paths so the hash does not depend on where the
  // config lives. Stage toggles and out_dir do not affect artifact content.
  c.hash = HashConfig(c.Canonical());

  c.out_dir = Resolve(base_dir, c.out_dir);
  for (std::string* p : {&c.inputs.corpus, &c.inputs.obscene_list, &c.inputs.lexicon_manifest,
                         &c.inputs.bundles, &c.inputs.mwe_list, &c.inputs.lid_seed_dir,
                         &c.inputs.scores, &c.inputs.judgments}) {
    *p = Resolve(base_dir, *p);
  }
  return c;
}

PipelineConfig PipelineConfig::Load(const std::string& path) {
  Json j = Json::parse(ReadFile(path), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw UsageError("config " + path + " is not valid JSON");
  return Parse(j, fs::path(path).parent_path().string());
}

Json PipelineConfig::Canonical() const {
  const auto& t = thresholds;
  return {{"version", version},
          {"lang_pair", lang_pair},
          {"lang1", lang1},
          {"seed", seed},
          {"lid_mode", lid_mode == LidMode::kHan ? "han" : "wordlist"},
          {"inputs",
           {{"corpus", inputs.corpus},
            {"obscene_list", inputs.obscene_list},
            {"lexicon_manifest", inputs.lexicon_manifest},
            {"bundles", inputs.bundles},
            {"mwe_list", inputs.mwe_list},
            {"lid_seed_dir", inputs.lid_seed_dir},
            {"scores", inputs.scores},
            {"judgments", inputs.judgments}}},
          {"backends",
           {{"segmenter", backends.segmenter},
            {"mono_lid", backends.mono_lid},
            {"scorer", backends.scorer},
            {"scorer_kind", backends.scorer_kind}}},
          {"thresholds",
           {{"max_chars", t.max_chars},
            {"min_tokens", t.min_tokens},
            {"max_unknown_ratio", t.max_unknown_ratio},
            {"ne_threshold", t.ne_threshold},
            {"levenshtein_min", t.levenshtein_min},
            {"pair_cap", t.pair_cap},
            {"resamples", t.resamples},
            {"alpha", t.alpha},
            {"batch_size", t.batch_size},
            {"pos_min_group", t.pos_min_group},
            {"raters", t.raters}}}};
}

std::string HashConfig(const Json& canonical) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, Fnv1a64(canonical.dump()));
  return buf;
}

Json ToJson(const PipelineSummary& s) {
  Json stages = Json::array();
  for (const auto& r : s.stages) stages.push_back(ToJson(r));
  Json j = {{"config_hash", s.config_hash}, {"seed", s.seed}, {"stages", stages}};
  if (s.accuracy) j["accuracy"] = *s.accuracy;
  return j;
}

// ---- end-to-end run ----

namespace {

struct Artifacts {
  std::string dir;
  ArtifactMeta Meta(const std::string& name, const PipelineConfig& c) const {
    return {name, c.hash, c.seed};
  }
  std::string Path(const std::string& file) const { return (fs::path(dir) / file).string(); }
};

template <typename T>
std::vector<Json> ToRecords(const std::vector<T>& items) {
  std::vector<Json> out;
  out.reserve(items.size());
  for (const auto& x : items) out.push_back(ToJson(x));
  return out;
}

JsonlFile ReadArtifact(const std::string& path, const PipelineConfig& c) {
  if (!fs::exists(path)) {
    throw UsageError("missing artifact " + path + " (run the producing stage first)");
  }
  JsonlFile f = ReadJsonl(path);
  CheckMeta(f, path, c.hash);
  return f;
}

void RequireInput(const std::string& stage, const char* key, const std::string& path) {
  if (path.empty()) throw UsageError("stage " + stage + ": inputs." + key + " is not set");
  if (!fs::exists(path)) throw UsageError("stage " + stage + ": missing file " + path);
}

}  // namespace

PipelineSummary RunPipeline(const PipelineConfig& c) {
  PipelineSummary summary;
  summary.config_hash = c.hash;
  summary.seed = c.seed;
  Artifacts art{c.out_dir};
  fs::create_directories(c.out_dir);
  auto record = [&](StageReport r) {
    r.CheckBalanced();
    summary.stages.push_back(std::move(r));
  };

  // ingest
  std::vector<ingest::SentenceRecord> sentences;
  if (c.stages.ingest) {
    RequireInput("ingest", "corpus", c.inputs.corpus);
    std::vector<ingest::RawDocument> docs;
    for (const Json& j : ReadJsonl(c.inputs.corpus).records) {
      docs.push_back(ingest::DocumentFromJson(j));
    }
    std::optional<ingest::WordSet> obscene;
    if (!c.inputs.obscene_list.empty()) {
      RequireInput("ingest", "obscene_list", c.inputs.obscene_list);
      obscene = ingest::WordSet::Load(c.inputs.obscene_list);
    }
    std::unique_ptr<ingest::SegmentationBackend> seg;
    if (c.backends.segmenter == "fallback") {
      seg = std::make_unique<ingest::FallbackSegmenter>();
    } else {
      seg = std::make_unique<ingest::HttpSegmenter>(c.backends.segmenter);
    }
    IngestOptions opt;
    opt.obscene = obscene ? &*obscene : nullptr;
    opt.segmenter = seg.get();
    opt.limits = {c.thresholds.max_chars, c.thresholds.min_tokens};
    IngestResult r = RunIngest(docs, opt);
    WriteJsonl(art.Path("sentences.jsonl"), ToRecords(r.sentences),
               art.Meta("sentences", c));
    record(r.documents);
    record(r.sentence_gate);
    sentences = std::move(r.sentences);
  } else if (c.stages.lid) {
    for (const Json& j : ReadArtifact(art.Path("sentences.jsonl"), c).records) {
      sentences.push_back(ingest::SentenceFromJson(j));
    }
  }

  // lid
  std::vector<lid::CsSentence> cs;
  if (c.stages.lid) {
    std::optional<lid::LexiconSet> lex;
    if (c.lid_mode == LidMode::kWordlist) {
      RequireInput("lid", "lexicon_manifest", c.inputs.lexicon_manifest);
      lex = lid::LexiconSet::LoadManifest(c.inputs.lexicon_manifest);
    }
    std::unique_ptr<lid::MonoLidBackend> mono;
    if (c.backends.mono_lid == "trigram") {
      RequireInput("lid", "lid_seed_dir", c.inputs.lid_seed_dir);
      mono = std::make_unique<lid::TrigramProfileClassifier>(
          lid::TrigramProfileClassifier::FromDirectory(c.inputs.lid_seed_dir));
    } else if (c.backends.mono_lid != "none") {
      mono = std::make_unique<lid::HttpMonoLid>(c.backends.mono_lid);
    }
    LidOptions opt;
    opt.mode = c.lid_mode;
    opt.lexicons = lex ? &*lex : nullptr;
    opt.mono_lid = mono.get();
    opt.default_claim = c.lang1;
    opt.ne_threshold = c.thresholds.ne_threshold;
    opt.max_unknown_ratio = c.thresholds.max_unknown_ratio;
    LidResult r = RunLid(sentences, opt);
    WriteJsonl(art.Path("cs_sentences.jsonl"), ToRecords(r.sentences),
               art.Meta("cs_sentences", c));
    record(r.report);
    cs = std::move(r.sentences);
  } else if (c.stages.bundle) {
    for (const Json& j : ReadArtifact(art.Path("cs_sentences.jsonl"), c).records) {
      cs.push_back(lid::CsSentenceFromJson(j));
    }
  }

  // bundle
  std::vector<bundle::AnnotationBundle> bundles;
  if (c.stages.bundle) {
    RequireInput("bundle", "bundles", c.inputs.bundles);
    std::vector<bundle::AnnotationBundle> raw;
    JsonlFile f = ReadJsonl(c.inputs.bundles);
    for (std::size_t i = 0; i < f.records.size(); ++i) {
      try {
        raw.push_back(bundle::BundleFromJson(f.records[i]));
      } catch (...) {
        RethrowInStage("bundle", c.inputs.bundles + ":" + std::to_string(i + 1));
      }
    }
    BundleResult r = RunBundleGate(raw, &cs, {c.thresholds.levenshtein_min, "X"});
    WriteJsonl(art.Path("bundles.jsonl"), ToRecords(r.bundles), art.Meta("bundles", c));
    record(r.report);
    bundles = std::move(r.bundles);
  } else if (c.stages.genpairs) {
    for (const Json& j : ReadArtifact(art.Path("bundles.jsonl"), c).records) {
      bundles.push_back(bundle::BundleFromJson(j));
    }
  }

  // genpairs
  std::vector<pairgen::MinimalPair> pairs;
  if (c.stages.genpairs) {
    std::optional<bundle::MweLexicon> mwe;
    if (!c.inputs.mwe_list.empty()) {
      RequireInput("genpairs", "mwe_list", c.inputs.mwe_list);
      mwe = bundle::MweLexicon::Load(c.inputs.mwe_list);
    }
    pairgen::GenerateOptions opt;
    opt.seed = c.seed;
    opt.cap = c.thresholds.pair_cap;
    opt.lang_pair = c.lang_pair;
    opt.mwe_lexicon = mwe ? &*mwe : nullptr;
    GenpairsResult r = RunGenpairs(bundles, opt);
    WriteJsonl(art.Path("pairs.jsonl"), ToRecords(r.pairs), art.Meta("pairs", c));
    record(r.report);
    pairs = std::move(r.pairs);
  } else if (c.stages.score || c.stages.stats) {
    std::string path = art.Path("pairs.jsonl");
    if (fs::exists(path)) {
      for (const Json& j : ReadArtifact(path, c).records) {
        pairs.push_back(pairgen::PairFromJson(j));
      }
    }
  }

  // score
  std::vector<scoring::ScoredPair> scored;
  if (c.stages.score) {
    std::unique_ptr<scoring::ScorerBackend> backend;
    if (!c.backends.scorer.empty()) {
      backend = std::make_unique<scoring::EndpointScorer>(
          c.backends.scorer, c.backends.scorer,
          c.backends.scorer_kind == "masked" ? scoring::ScorerKind::kMasked
                                             : scoring::ScorerKind::kAutoregressive);
    } else {
      RequireInput("score", "scores", c.inputs.scores);
      backend = std::make_unique<scoring::FileScorer>(
          scoring::FileScorer::Load(c.inputs.scores));
    }
    ScoreStageResult r = RunScore(pairs, *backend);
    for (auto& s : r.run.scored) s.scorer_id = fs::path(s.scorer_id).filename().string();
    WriteJsonl(art.Path("scored.jsonl"), ToRecords(r.run.scored), art.Meta("scored", c));
    std::vector<Json> failures;
    for (const auto& f : r.run.failures) {
      failures.push_back({{"pair_id", f.pair_id}, {"reason", f.reason}});
    }
    WriteJsonl(art.Path("score_failures.jsonl"), failures, art.Meta("score_failures", c));
    record(r.report);
    scored = std::move(r.run.scored);
  } else if (c.stages.stats) {
    std::string path = art.Path("scored.jsonl");
    if (fs::exists(path)) {
      for (const Json& j : ReadArtifact(path, c).records) {
        scored.push_back(scoring::ScoredPairFromJson(j));
      }
    }
  }
  if (!scored.empty()) summary.accuracy = scoring::Accuracy(scored);

  // stats
  if (c.stages.stats) {
    std::vector<judge::JudgmentRecord> judgments;
    if (!c.inputs.judgments.empty()) {
      RequireInput("stats", "judgments", c.inputs.judgments);
      for (const Json& j : ReadJsonl(c.inputs.judgments).records) {
        judgments.push_back(judge::JudgmentFromJson(j));
      }
    }
    StatsInputs in;
    in.pairs = &pairs;
    in.scored = &scored;
    in.judgments = &judgments;
    in.raters = c.thresholds.raters;
    in.pos_min_group = c.thresholds.pos_min_group;
    in.permutation.resamples = c.thresholds.resamples;
    in.permutation.alpha = c.thresholds.alpha;
    in.permutation.seed = c.seed;
    Json report;
    try {
      report = RunStats(in);
    } catch (...) {
      RethrowInStage("stats", "(corpus)");
    }
    report["config_hash"] = c.hash;
    report["seed"] = c.seed;
    WriteFile(art.Path("stats.json"), report.dump(2) + "\n");
  }

  WriteFile(art.Path("summary.json"), ToJson(summary).dump(2) + "\n");
  return summary;
}

}  // namespace acs::pipeline
