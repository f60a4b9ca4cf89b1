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

// Sentence log-probabilities from external scorers, per-pair margins and
// challenge-set accuracy. All scores are natural-log probabilities (nats).

#ifndef ACS_SCORING_H_
#define ACS_SCORING_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acs/jsonl.h"

namespace acs::scoring {

enum class ScorerKind { kAutoregressive, kMasked };
enum class Transport { kEndpoint, kFile };

struct PairTexts {
  std::string pair_id;
  std::string observed;
  std::string manipulated;
};

struct ScoredPair {
  std::string pair_id;
  double logp_observed = 0.0;
  double logp_manipulated = 0.0;
  std::string scorer_id;
};

struct ScoreFailure {
  std::string pair_id;
  std::string reason;
};

struct PairOutcome {
  std::optional<std::pair<double, double>> logprobs;  // (observed, manipulated)
  std::string error;
};

// A backend scores raw sentence text with no length normalization. Masked
// backends must report the pseudo-log-likelihood (whole-word masking variant)
// as the sentence score.
class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  virtual std::string Id() const = 0;
  virtual ScorerKind Kind() const = 0;
  virtual Transport transport() const = 0;
  // One outcome per input, in order. Throws BackendError on transport
  // failure (retried by the caller) and MalformedResponse on bad payloads.
  virtual std::vector<PairOutcome> ScoreBatch(std::span<const PairTexts> batch) = 0;
};

class MalformedResponse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Whitespace-separated "pair_id logp_observed logp_manipulated". Lines whose
// first field starts with '#' are comments.
class FileScorer : public ScorerBackend {
 public:
  FileScorer(std::string id, std::map<std::string, std::pair<double, double>> rows)
      : id_(std::move(id)), rows_(std::move(rows)) {}
  static FileScorer Load(const std::string& path);
  static FileScorer Parse(const std::string& content, const std::string& origin);

  std::string Id() const override { return id_; }
  ScorerKind Kind() const override { return ScorerKind::kAutoregressive; }
  Transport transport() const override { return Transport::kFile; }
  std::vector<PairOutcome> ScoreBatch(std::span<const PairTexts> batch) override;

  const std::map<std::string, std::pair<double, double>>& rows() const { return rows_; }

 private:
  std::string id_;
  std::map<std::string, std::pair<double, double>> rows_;
};

struct ScoreOptions {
  std::size_t batch_size = 32;
  int retries = 3;
  std::size_t max_inflight = 4;
};

struct ScoreRun {
  std::vector<ScoredPair> scored;  // sorted by pair_id
  std::vector<ScoreFailure> failures;
};

ScoreRun ScorePairs(std::span<const PairTexts> pairs, ScorerBackend& backend,
                    const ScoreOptions& options = {});

double Margin(const ScoredPair& pair);

// Fraction of pairs with logp_observed strictly greater; ties count against
// the scorer. Throws DataError("empty challenge set") on empty input.
double Accuracy(std::span<const ScoredPair> pairs);

Json ToJson(const ScoredPair& p);
ScoredPair ScoredPairFromJson(const Json& j);

// Reads either scored-pair JSONL or a whitespace score file.
std::vector<ScoredPair> LoadScoredPairs(const std::string& path);

}  // namespace acs::scoring

#endif  // ACS_SCORING_H_
