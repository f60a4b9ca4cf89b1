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

#include "acs/stats.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "acs/error.h"
#include "acs/rng.h"

namespace acs::stats {
namespace {

// Relative slack when comparing resampled statistics with the observed one,
// so that sums accumulated in a different order still count as ties.
constexpr double kTieSlack = 1e-9;

double MeanOf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double MedianOf(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double Tolerance(std::span<const double> values) {
  double scale = 0.0;
  for (double x : values) scale = std::max(scale, std::fabs(x));
  return kTieSlack * std::max(scale, 1e-300);
}

bool UseExact(const PermutationConfig& config, double patterns) {
  switch (config.mode) {
    case PermutationMode::kExact:
      if (patterns > 64.0 * static_cast<double>(kExactLimit)) {
        throw UsageError("exact permutation test too large");
      }
      return true;
    case PermutationMode::kMonteCarlo:
      return false;
    case PermutationMode::kAuto:
      break;
  }
  return patterns <= static_cast<double>(kExactLimit);
}

// Runs `hit(r)` for r in [0, R) over `workers` threads and returns the count
// of true results. Each resample owns its RNG stream, so the split does not
// matter.
template <typename Fn>
std::uint64_t CountHits(std::size_t resamples, std::size_t workers, Fn hit) {
  workers = std::max<std::size_t>(1, std::min(workers, resamples));
  std::vector<std::uint64_t> counts(workers, 0);
  auto run = [&](std::size_t w) {
    std::size_t lo = resamples * w / workers;
    std::size_t hi = resamples * (w + 1) / workers;
    std::uint64_t c = 0;
    for (std::size_t r = lo; r < hi; ++r) c += hit(r) ? 1 : 0;
    counts[w] = c;
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double Binomial(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return c;
}

}  // namespace

void PermutationConfig::Validate() const {
  if (resamples < 1) throw UsageError("resample count must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw UsageError("alpha must lie in (0, 1)");
  }
}

PermutationResult PairedPermutationTest(std::span<const double> a,
                                        std::span<const double> b,
                                        const PermutationConfig& config) {
  config.Validate();
  if (a.size() != b.size()) {
    throw DataError("paired test: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + " values");
  }
  if (a.empty()) throw DataError("paired test: no pairs");
  std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  double total = std::accumulate(d.begin(), d.end(), 0.0);
  double observed = std::fabs(total);
  double tol = Tolerance(d) * static_cast<double>(n);

  PermutationResult result;
  result.statistic = total / static_cast<double>(n);
  if (UseExact(config, std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 1000))))) {
    // Gray-code walk: each step flips one sign.
    std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    double sum = total;
    std::uint64_t gray = 0;
    for (std::uint64_t i = 0; i < patterns; ++i) {
      if (i > 0) {
        int bit = std::countr_zero(i);
        gray ^= std::uint64_t{1} << bit;
        sum += (gray >> bit & 1) ? -2.0 * d[bit] : 2.0 * d[bit];
      }
      if (std::fabs(sum) >= observed - tol) ++hits;
    }
    result.exact = true;
    result.permutations = patterns;
    result.p_value = static_cast<double>(hits) / static_cast<double>(patterns);
    return result;
  }
  std::uint64_t hits =
      CountHits(config.resamples, config.workers, [&](std::size_t r) {
        CounterRng rng(StreamKey(config.seed, static_cast<std::uint64_t>(r)));
        double s = 0.0;
        for (double x : d) s += rng.Coin() ? x : -x;
        return std::fabs(s) >= observed - tol;
      });
  result.permutations = config.resamples;
  result.p_value = static_cast<double>(hits + 1) /
                   static_cast<double>(config.resamples + 1);
  return result;
}

PermutationResult UnpairedPermutationTest(std::span<const double> a,
                                          std::span<const double> b,
                                          const PermutationConfig& config,
                                          Statistic statistic) {
  config.Validate();
  if (a.empty() || b.empty()) throw DataError("unpaired test: empty group");
  std::size_t na = a.size();
  std::size_t n = na + b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double grand = std::accumulate(pooled.begin(), pooled.end(), 0.0);

  // Statistic of the split where `in_a` lists the pooled indices of group a.
  std::vector<double> ga, gb;
  auto stat_of = [&](const std::vector<char>& in_a, std::vector<double>& xa,
                     std::vector<double>& xb) {
    if (statistic == Statistic::kMean) {
      double sa = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (in_a[i]) sa += pooled[i];
      }
      return sa / static_cast<double>(na) -
             (grand - sa) / static_cast<double>(n - na);
    }
    xa.clear();
    xb.clear();
    for (std::size_t i = 0; i < n; ++i) (in_a[i] ? xa : xb).push_back(pooled[i]);
    return MedianOf(xa) - MedianOf(xb);
  };

  std::vector<char> original(n, 0);
  std::fill(original.begin(), original.begin() + static_cast<long>(na), 1);
  PermutationResult result;
  result.statistic = stat_of(original, ga, gb);
  double observed = std::fabs(result.statistic);
  double tol = Tolerance(pooled) * 4.0;

  if (UseExact(config, Binomial(n, na))) {
    // Enumerate every size-na subset in lexicographic order.
    std::vector<std::size_t> idx(na);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<char> in_a(n, 0);
    std::uint64_t hits = 0, total = 0;
    while (true) {
      std::fill(in_a.begin(), in_a.end(), 0);
      for (std::size_t i : idx) in_a[i] = 1;
      if (std::fabs(stat_of(in_a, ga, gb)) >= observed - tol) ++hits;
      ++total;
      std::size_t i = na;
      while (i > 0 && idx[i - 1] == n - na + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < na; ++j) idx[j] = idx[j - 1] + 1;
    }
    result.exact = true;
    result.permutations = total;
    result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    return result;
  }
  std::uint64_t hits =
      CountHits(config.resamples, config.workers, [&](std::size_t r) {
        CounterRng rng(StreamKey(config.seed, static_cast<std::uint64_t>(r)));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.Shuffle(order);
        std::vector<char> in_a(n, 0);
        for (std::size_t i = 0; i < na; ++i) in_a[order[i]] = 1;
        std::vector<double> xa, xb;
        return std::fabs(stat_of(in_a, xa, xb)) >= observed - tol;
      });
  result.permutations = config.resamples;
  result.p_value = static_cast<double>(hits + 1) /
                   static_cast<double>(config.resamples + 1);
  return result;
}

void JudgmentMatrix::Validate() const {
  if (raters < 2) throw DataError("fleiss kappa needs at least 2 raters per item");
  if (counts.empty()) throw DataError("fleiss kappa: no items");
  std::size_t k = counts.front().size();
  if (k < 2) throw DataError("fleiss kappa needs at least 2 categories");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto& row = counts[i];
    if (row.size() != k) {
      throw DataError("fleiss kappa: item " + std::to_string(i) +
                      " has " + std::to_string(row.size()) + " categories");
    }
    int sum = 0;
    for (int c : row) {
      if (c < 0) throw DataError("fleiss kappa: negative count");
      sum += c;
    }
    if (sum != raters) {
      throw DataError("fleiss kappa: item " + std::to_string(i) + " has " +
                      std::to_string(sum) + " ratings, expected " +
                      std::to_string(raters));
    }
  }
}

double FleissKappa(const JudgmentMatrix& matrix) {
  matrix.Validate();
  const double n = matrix.raters;
  const double items = static_cast<double>(matrix.counts.size());
  const std::size_t k = static_cast<std::size_t>(matrix.categories());
  std::vector<double> p(k, 0.0);
  double p_bar = 0.0;
  for (const auto& row : matrix.counts) {
    double agree = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p[j] += row[j];
      agree += static_cast<double>(row[j]) * (row[j] - 1);
    }
    p_bar += agree / (n * (n - 1));
  }
  p_bar /= items;
  double pe = 0.0;
  for (double& pj : p) {
    pj /= items * n;
    pe += pj * pj;
  }
  if (std::fabs(1.0 - pe) < 1e-12) return 1.0;  // only one category used
  return (p_bar - pe) / (1.0 - pe);
}

JudgmentMatrix BuildJudgmentMatrix(std::span<const judge::JudgmentRecord> records,
                                   int raters) {
  std::map<std::string, std::array<int, 2>> by_pair;
  for (const auto& r : records) {
    auto& row = by_pair[r.pair_id];
    ++row[r.resolved == judge::Resolved::kObserved ? 0 : 1];
  }
  JudgmentMatrix m;
  m.raters = raters;
  for (const auto& [id, row] : by_pair) {
    if (row[0] + row[1] == raters) m.counts.push_back({row[0], row[1]});
  }
  return m;
}

AgreementReport GoldAgreement(std::span<const judge::JudgmentRecord> records,
                              const std::set<std::string>& known_pairs) {
  AgreementReport report;
  for (const auto& r : records) {
    if (!known_pairs.count(r.pair_id)) {
      throw DataError("judgment by " + r.annotator_id + " references unknown pair " +
                      r.pair_id);
    }
    bool observed = judge::Resolve(r.choice, r.observed_first) ==
                    judge::Resolved::kObserved;
    for (AccuracyCount* c : {&report.per_annotator[r.annotator_id], &report.pooled}) {
      ++c->judged;
      if (observed) ++c->chose_observed;
    }
  }
  return report;
}

PosClass ClassOf(const std::string& upos) {
  static const std::set<std::string> kClosed = {"ADP", "AUX",  "CCONJ", "DET",
                                                "NUM", "PART", "PRON",  "SCONJ"};
  static const std::set<std::string> kOpen = {"ADJ",  "ADV",   "INTJ",
                                              "NOUN", "PROPN", "VERB"};
  if (kClosed.count(upos)) return PosClass::kClosed;
  if (kOpen.count(upos)) return PosClass::kOpen;
  return PosClass::kNeither;
}

double Quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of empty sample");
  double n = static_cast<double>(sorted.size());
  double pos = n * p + 0.5;  // 1-based
  if (pos <= 1.0) return sorted.front();
  if (pos >= n) return sorted.back();
  double lo = std::floor(pos);
  double frac = pos - lo;
  std::size_t i = static_cast<std::size_t>(lo) - 1;
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

Summary Summarize(std::vector<double> values) {
  if (values.empty()) throw DataError("summary of empty sample");
  std::sort(values.begin(), values.end());
  Summary s;
  s.count = values.size();
  s.mean = MeanOf(values);
  s.q1 = Quantile(values, 0.25);
  s.median = Quantile(values, 0.5);
  s.q3 = Quantile(values, 0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

namespace {

std::map<std::string, double> MarginIndex(std::span<const scoring::ScoredPair> scored) {
  std::map<std::string, double> out;
  for (const auto& s : scored) {
    if (!out.emplace(s.pair_id, scoring::Margin(s)).second) {
      throw DataError("duplicate score for pair " + s.pair_id);
    }
  }
  return out;
}

}  // namespace

PosReport PosMarginAnalysis(std::span<const pairgen::MinimalPair> pairs,
                            std::span<const scoring::ScoredPair> scored,
                            const PermutationConfig& config,
                            std::size_t min_group) {
  auto margins = MarginIndex(scored);
  std::map<std::string, PosGroup> groups;
  PosReport report;
  for (const auto& p : pairs) {
    if (!p.pos_eligible || !p.changed_word_pos) continue;
    auto it = margins.find(p.pair_id);
    if (it == margins.end()) continue;
    ++report.eligible_pairs;
    auto& g = groups[*p.changed_word_pos];
    g.upos = *p.changed_word_pos;
    g.pos_class = ClassOf(g.upos);
    g.absolute_margins.push_back(std::fabs(it->second));
  }
  std::vector<double> closed, open;
  for (const auto& [upos, g] : groups) {
    if (g.absolute_margins.size() < min_group) {
      report.excluded.push_back(upos);
      continue;
    }
    PosGroupReport r;
    r.upos = upos;
    r.pos_class = g.pos_class;
    r.count = g.absolute_margins.size();
    r.mean = MeanOf(g.absolute_margins);
    r.median = MedianOf(g.absolute_margins);
    report.groups.push_back(r);
    if (g.pos_class == PosClass::kClosed) {
      closed.insert(closed.end(), g.absolute_margins.begin(), g.absolute_margins.end());
    } else if (g.pos_class == PosClass::kOpen) {
      open.insert(open.end(), g.absolute_margins.begin(), g.absolute_margins.end());
    }
  }
  report.closed_count = closed.size();
  report.open_count = open.size();
  if (!closed.empty()) report.closed_mean = MeanOf(closed);
  if (!open.empty()) report.open_mean = MeanOf(open);
  if (!closed.empty() && !open.empty()) {
    report.p_value = UnpairedPermutationTest(closed, open, config).p_value;
  }
  return report;
}

MarginAgreementReport MarginVsAgreement(
    std::span<const judge::JudgmentRecord> records,
    std::span<const scoring::ScoredPair> scored, int raters,
    const PermutationConfig& config) {
  if (raters < 1) throw UsageError("raters must be positive");
  auto margins = MarginIndex(scored);
  std::map<std::string, std::pair<int, int>> votes;  // (observed, total)
  for (const auto& r : records) {
    auto& v = votes[r.pair_id];
    if (judge::Resolve(r.choice, r.observed_first) == judge::Resolved::kObserved) {
      ++v.first;
    }
    ++v.second;
  }
  std::vector<std::vector<double>> buckets(static_cast<std::size_t>(raters) + 1);
  for (const auto& [id, v] : votes) {
    if (v.second != raters) continue;
    auto it = margins.find(id);
    if (it == margins.end()) continue;
    buckets[static_cast<std::size_t>(v.first)].push_back(it->second);
  }
  MarginAgreementReport report;
  for (int a = 0; a <= raters; ++a) {
    BucketReport b;
    b.agreement = a;
    if (!buckets[a].empty()) b.summary = Summarize(buckets[a]);
    report.buckets.push_back(b);
  }
  for (int a = 0; a <= raters; ++a) {
    for (int b = a + 1; b <= raters; ++b) {
      if (buckets[a].empty() || buckets[b].empty()) continue;
      BucketComparison c;
      c.a = a;
      c.b = b;
      c.p_mean = UnpairedPermutationTest(buckets[a], buckets[b], config,
                                         Statistic::kMean).p_value;
      c.p_median = UnpairedPermutationTest(buckets[a], buckets[b], config,
                                           Statistic::kMedian).p_value;
      report.comparisons.push_back(c);
    }
  }
  return report;
}

double KsUniformStatistic(std::vector<double> samples) {
  if (samples.empty()) throw DataError("KS statistic of empty sample");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double x = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1) / n - x,
                  x - static_cast<double>(i) / n});
  }
  return d;
}

double KsCriticalValue(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

namespace {

const char* ClassName(PosClass c) {
  switch (c) {
    case PosClass::kClosed: return "closed";
    case PosClass::kOpen: return "open";
    case PosClass::kNeither: return "other";
  }
  return "other";
}

Json SummaryJson(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean},     {"q1", s.q1},
          {"median", s.median}, {"q3", s.q3}, {"min", s.min}, {"max", s.max}};
}

std::string Fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

Json ToJson(const PermutationResult& r) {
  return {{"p_value", r.p_value},
          {"statistic", r.statistic},
          {"exact", r.exact},
          {"permutations", r.permutations}};
}

Json ToJson(const AgreementReport& r) {
  Json annotators = Json::array();
  for (const auto& [id, c] : r.per_annotator) {
    annotators.push_back({{"annotator_id", id},
                          {"judged", c.judged},
                          {"chose_observed", c.chose_observed},
                          {"accuracy", c.accuracy()}});
  }
  return {{"annotators", annotators},
          {"pooled",
           {{"judged", r.pooled.judged},
            {"chose_observed", r.pooled.chose_observed},
            {"accuracy", r.pooled.accuracy()}}}};
}

Json ToJson(const PosReport& r) {
  Json groups = Json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"upos", g.upos},
                      {"class", ClassName(g.pos_class)},
                      {"count", g.count},
                      {"mean", g.mean},
                      {"median", g.median}});
  }
  Json j = {{"eligible_pairs", r.eligible_pairs},
            {"groups", groups},
            {"excluded", r.excluded},
            {"closed", {{"count", r.closed_count}, {"mean", r.closed_mean}}},
            {"open", {{"count", r.open_count}, {"mean", r.open_mean}}},
            {"p_value", nullptr}};
  if (r.p_value) j["p_value"] = *r.p_value;
  return j;
}

Json ToJson(const MarginAgreementReport& r) {
  Json buckets = Json::array();
  for (const auto& b : r.buckets) {
    Json j = {{"agreement", b.agreement}, {"absent", !b.summary.has_value()}};
    if (b.summary) j["summary"] = SummaryJson(*b.summary);
    buckets.push_back(j);
  }
  Json comps = Json::array();
  for (const auto& c : r.comparisons) {
    comps.push_back(
        {{"a", c.a}, {"b", c.b}, {"p_mean", c.p_mean}, {"p_median", c.p_median}});
  }
  return {{"buckets", buckets}, {"comparisons", comps}};
}

std::string FormatTable(const AgreementReport& r) {
  std::ostringstream out;
  out << "annotator\tjudged\taccuracy\n";
  for (const auto& [id, c] : r.per_annotator) {
    out << id << '\t' << c.judged << '\t' << Fixed(100.0 * c.accuracy(), 1) << "%\n";
  }
  out << "pooled\t" << r.pooled.judged << '\t'
      << Fixed(100.0 * r.pooled.accuracy(), 1) << "%\n";
  return out.str();
}

std::string FormatTable(const PosReport& r) {
  std::ostringstream out;
  out << "upos\tclass\tcount\tmean\tmedian\n";
  for (const auto& g : r.groups) {
    out << g.upos << '\t' << ClassName(g.pos_class) << '\t' << g.count << '\t'
        << Fixed(g.mean) << '\t' << Fixed(g.median) << '\n';
  }
  out << "closed\t\t" << r.closed_count << '\t' << Fixed(r.closed_mean) << '\n';
  out << "open\t\t" << r.open_count << '\t' << Fixed(r.open_mean) << '\n';
  out << "p(closed vs open)\t" << (r.p_value ? Fixed(*r.p_value, 4) : "n/a") << '\n';
  if (!r.excluded.empty()) {
    out << "excluded (<min pairs):";
    for (const auto& e : r.excluded) out << ' ' << e;
    out << '\n';
  }
  return out.str();
}

std::string FormatTable(const MarginAgreementReport& r) {
  std::ostringstream out;
  out << "agree\tcount\tmean\tq1\tmedian\tq3\n";
  for (const auto& b : r.buckets) {
    out << b.agreement << '\t';
    if (!b.summary) {
      out << "0\t(absent)\n";
      continue;
    }
    const auto& s = *b.summary;
    out << s.count << '\t' << Fixed(s.mean) << '\t' << Fixed(s.q1) << '\t'
        << Fixed(s.median) << '\t' << Fixed(s.q3) << '\n';
  }
  out << "buckets\tp(mean)\tp(median)\n";
  for (const auto& c : r.comparisons) {
    out << c.a << " vs " << c.b << '\t' << Fixed(c.p_mean, 4) << '\t'
        << Fixed(c.p_median, 4) << '\n';
  }
  return out.str();
}

}  // namespace acs::stats
