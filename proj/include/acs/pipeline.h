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

// Stage runners shared by the CLI subcommands, and the config-driven
// end-to-end run.

#ifndef ACS_PIPELINE_H_
#define ACS_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acs/bundle.h"
#include "acs/ingest.h"
#include "acs/jsonl.h"
#include "acs/judgment.h"
#include "acs/lid.h"
#include "acs/pairgen.h"
#include "acs/scoring.h"
#include "acs/stats.h"

namespace acs::pipeline {

struct StageReport {
  StageReport() = default;
  explicit StageReport(std::string name) : stage(std::move(name)) {}

  std::string stage;
  std::size_t input = 0;
  std::size_t output = 0;
  std::map<std::string, std::size_t> rejections;

  // Throws std::logic_error unless rejections sum to input - output.
  void CheckBalanced() const;
};

Json ToJson(const StageReport& r);

// Wraps an error raised while processing one item so the message names the
// stage and item. Keeps the error category for exit-code mapping.
[[noreturn]] void RethrowInStage(const std::string& stage, const std::string& item);

struct IngestOptions {
  const ingest::WordSet* obscene = nullptr;
  ingest::SegmentationBackend* segmenter = nullptr;  // required
  ingest::LengthLimits limits;
  ingest::TokenizerOptions tokenizer;
};

struct IngestResult {
  std::vector<ingest::SentenceRecord> sentences;
  StageReport documents{"ingest.documents"};
  StageReport sentence_gate{"ingest.sentences"};
};

// Normalize, obscenity gate (per document), segment, length gate.
IngestResult RunIngest(const std::vector<ingest::RawDocument>& documents,
                       const IngestOptions& options);

enum class LidMode { kWordlist, kHan };

struct LidOptions {
  LidMode mode = LidMode::kWordlist;
  const lid::LexiconSet* lexicons = nullptr;  // required in wordlist mode
  lid::MonoLidBackend* mono_lid = nullptr;    // consistency check skipped if null
  std::string default_claim;                  // used when a sentence has none
  double ne_threshold = 0.75;
  double max_unknown_ratio = 0.5;
};

struct LidResult {
  std::vector<lid::CsSentence> sentences;
  StageReport report{"lid"};
};

LidResult RunLid(const std::vector<ingest::SentenceRecord>& sentences,
                 const LidOptions& options);

struct BundleResult {
  std::vector<bundle::AnnotationBundle> bundles;
  StageReport report{"bundle"};
};

// Joins CS sentences with their external annotations by sentence id, takes
// the labels from the CS sentence, validates and applies the residue gate.
// Without `sentences` every bundle is taken as is.
BundleResult RunBundleGate(const std::vector<bundle::AnnotationBundle>& bundles,
                           const std::vector<lid::CsSentence>* sentences,
                           const bundle::ResidueGateConfig& gate = {});

struct GenpairsResult {
  std::vector<pairgen::MinimalPair> pairs;
  StageReport report{"genpairs"};
};

GenpairsResult RunGenpairs(const std::vector<bundle::AnnotationBundle>& bundles,
                           const pairgen::GenerateOptions& options);

std::vector<scoring::PairTexts> TextsOf(const std::vector<pairgen::MinimalPair>& pairs);

struct ScoreStageResult {
  scoring::ScoreRun run;
  StageReport report{"score"};
};

ScoreStageResult RunScore(const std::vector<pairgen::MinimalPair>& pairs,
                          scoring::ScorerBackend& backend,
                          const scoring::ScoreOptions& options = {});

struct StatsInputs {
  const std::vector<pairgen::MinimalPair>* pairs = nullptr;
  const std::vector<scoring::ScoredPair>* scored = nullptr;
  const std::vector<judge::JudgmentRecord>* judgments = nullptr;
  int raters = 1;
  std::size_t pos_min_group = 10;
  stats::PermutationConfig permutation;
};

Json RunStats(const StatsInputs& inputs);

// Versioned run configuration. Thresholds default to the reference values.
struct PipelineConfig {
  int version = 1;
  std::string lang_pair = "de-en";
  std::string lang1;  // language code expected from the monolingual LID
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  struct Stages {
    bool ingest = true;
    bool lid = true;
    bool bundle = true;
    bool genpairs = true;
    bool score = true;
    bool stats = true;
  } stages;

  struct Inputs {
    std::string corpus;
    std::string obscene_list;
    std::string lexicon_manifest;
    std::string bundles;
    std::string mwe_list;
    std::string lid_seed_dir;
    std::string scores;
    std::string judgments;
  } inputs;

  struct Backends {
    std::string segmenter = "fallback";  // or an endpoint URL
    std::string mono_lid = "trigram";    // "trigram", "none" or an endpoint URL
    std::string scorer;                  // endpoint URL; empty uses inputs.scores
    std::string scorer_kind = "autoregressive";
  } backends;

  LidMode lid_mode = LidMode::kWordlist;

  struct Thresholds {
    std::size_t max_chars = 200;
    std::size_t min_tokens = 6;
    double max_unknown_ratio = 0.5;
    double ne_threshold = 0.75;
    std::size_t levenshtein_min = 5;
    std::size_t pair_cap = 1000;
    std::size_t resamples = 10000;
    double alpha = 0.05;
    std::size_t batch_size = 67;
    std::size_t pos_min_group = 10;
    int raters = 1;
  } thresholds;

  std::string hash;  // of the canonical config, filled by Load/Parse

  // Relative paths resolve against `base_dir`. Throws UsageError on unknown
  // keys, bad versions and out-of-range thresholds.
  static PipelineConfig Parse(const Json& j, const std::string& base_dir);
  static PipelineConfig Load(const std::string& path);
  Json Canonical() const;
};

struct PipelineSummary {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<StageReport> stages;
  std::optional<double> accuracy;
};

Json ToJson(const PipelineSummary& s);

// Runs enabled stages in order. Each stage reads the previous stage's
// artifact from out_dir, so disabled stages must have been run before under
// the same config. Writes summary.json last.
PipelineSummary RunPipeline(const PipelineConfig& config);

std::string HashConfig(const Json& canonical);

}  // namespace acs::pipeline

#endif  // ACS_PIPELINE_H_
