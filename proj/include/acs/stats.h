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

// Significance tests and agreement statistics.

#ifndef ACS_STATS_H_
#define ACS_STATS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "acs/judgment.h"
#include "acs/jsonl.h"
#include "acs/pairgen.h"
#include "acs/scoring.h"

namespace acs::stats {

// Exact enumeration replaces resampling when the number of sign patterns
// (paired) or partitions (unpaired) is at most this.
inline constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 20;

enum class PermutationMode { kAuto, kExact, kMonteCarlo };

struct PermutationConfig {
  std::size_t resamples = 10000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  PermutationMode mode = PermutationMode::kAuto;
  // Resample r always draws from stream r, so the result is independent of
  // the worker count.
  std::size_t workers = 1;

  void Validate() const;
};

struct PermutationResult {
  double p_value = 1.0;
  double statistic = 0.0;
  bool exact = false;
  std::uint64_t permutations = 0;  // patterns enumerated or resamples drawn

  bool Significant(double alpha) const { return p_value < alpha; }
};

// Two-tailed; statistic is the mean paired difference a - b. Monte-Carlo
// p-values use (1 + hits) / (R + 1).
PermutationResult PairedPermutationTest(std::span<const double> a,
                                        std::span<const double> b,
                                        const PermutationConfig& config = {});

enum class Statistic { kMean, kMedian };

// Two-tailed; statistic is stat(a) - stat(b) under shuffled group membership.
PermutationResult UnpairedPermutationTest(std::span<const double> a,
                                          std::span<const double> b,
                                          const PermutationConfig& config = {},
                                          Statistic statistic = Statistic::kMean);

// N items x k categories; each row sums to the number of raters n.
struct JudgmentMatrix {
  std::vector<std::vector<int>> counts;
  int raters = 0;

  int categories() const {
    return counts.empty() ? 0 : static_cast<int>(counts.front().size());
  }
  void Validate() const;
};

double FleissKappa(const JudgmentMatrix& matrix);

// Items are pairs judged by exactly `raters` annotators; categories are
// {observed, manipulated}. Pairs with a different judgment count are dropped.
JudgmentMatrix BuildJudgmentMatrix(std::span<const judge::JudgmentRecord> records,
                                   int raters);

struct AccuracyCount {
  std::size_t judged = 0;
  std::size_t chose_observed = 0;
  double accuracy() const {
    return judged == 0 ? 0.0
                       : static_cast<double>(chose_observed) /
                             static_cast<double>(judged);
  }
};

struct AgreementReport {
  std::map<std::string, AccuracyCount> per_annotator;
  AccuracyCount pooled;
};

// Throws DataError for a judgment on a pair not in `known_pairs`.
AgreementReport GoldAgreement(std::span<const judge::JudgmentRecord> records,
                              const std::set<std::string>& known_pairs);

enum class PosClass { kClosed, kOpen, kNeither };
PosClass ClassOf(const std::string& upos);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Hazen (midpoint) quantile: position n*p + 1/2 over the sorted sample,
// linearly interpolated and clamped to the sample range.
double Quantile(std::span<const double> sorted, double p);
Summary Summarize(std::vector<double> values);

struct PosGroup {
  std::string upos;
  PosClass pos_class = PosClass::kNeither;
  std::vector<double> absolute_margins;
};

struct PosGroupReport {
  std::string upos;
  PosClass pos_class = PosClass::kNeither;
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
};

struct PosReport {
  std::size_t eligible_pairs = 0;
  std::vector<PosGroupReport> groups;  // only groups with >= min_group pairs
  std::vector<std::string> excluded;   // groups below the threshold
  std::size_t closed_count = 0;
  std::size_t open_count = 0;
  double closed_mean = 0.0;
  double open_mean = 0.0;
  std::optional<double> p_value;  // closed vs open, unpaired
};

PosReport PosMarginAnalysis(std::span<const pairgen::MinimalPair> pairs,
                            std::span<const scoring::ScoredPair> scored,
                            const PermutationConfig& config = {},
                            std::size_t min_group = 10);

struct BucketReport {
  int agreement = 0;  // annotators choosing the observed sentence
  std::optional<Summary> summary;  // absent for empty buckets
};

struct BucketComparison {
  int a = 0;
  int b = 0;
  double p_mean = 1.0;
  double p_median = 1.0;
};

struct MarginAgreementReport {
  std::vector<BucketReport> buckets;  // agreement 0..raters
  std::vector<BucketComparison> comparisons;
};

MarginAgreementReport MarginVsAgreement(
    std::span<const judge::JudgmentRecord> records,
    std::span<const scoring::ScoredPair> scored, int raters,
    const PermutationConfig& config = {});

// One-sample Kolmogorov-Smirnov statistic against Uniform(0, 1).
double KsUniformStatistic(std::vector<double> samples);
// Asymptotic critical value sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double KsCriticalValue(std::size_t n, double alpha);

Json ToJson(const PermutationResult& r);
Json ToJson(const AgreementReport& r);
Json ToJson(const PosReport& r);
Json ToJson(const MarginAgreementReport& r);

std::string FormatTable(const AgreementReport& r);
std::string FormatTable(const PosReport& r);
std::string FormatTable(const MarginAgreementReport& r);

}  // namespace acs::stats

#endif  // ACS_STATS_H_
