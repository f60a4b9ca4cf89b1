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

#include "acs/scoring.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "acs/error.h"
#include "acs/text.h"

namespace acs::scoring {

FileScorer FileScorer::Parse(const std::string& content,
                             const std::string& origin) {
  std::map<std::string, std::pair<double, double>> rows;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = text::SplitWhitespace(line);
    // Pair ids contain '#', so only whole-line comments are allowed.
    if (fields.empty() || fields[0][0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (fields.size() != 3) {
      throw DataError(where + ": expected 3 columns, got " +
                      std::to_string(fields.size()));
    }
    double obs = 0.0;
    double man = 0.0;
    try {
      obs = std::stod(fields[1]);
      man = std::stod(fields[2]);
    } catch (const std::exception&) {
      throw DataError(where + ": non-numeric score");
    }
    if (!rows.emplace(fields[0], std::make_pair(obs, man)).second) {
      throw DataError(where + ": duplicate pair id " + fields[0]);
    }
  }
  return FileScorer(origin, std::move(rows));
}

FileScorer FileScorer::Load(const std::string& path) {
  return Parse(ReadFile(path), path);
}

std::vector<PairOutcome> FileScorer::ScoreBatch(
    std::span<const PairTexts> batch) {
  std::vector<PairOutcome> out;
  out.reserve(batch.size());
  for (const auto& p : batch) {
    auto it = rows_.find(p.pair_id);
    if (it == rows_.end()) {
      out.push_back({std::nullopt, "no score for pair"});
    } else {
      out.push_back({it->second, ""});
    }
  }
  return out;
}

ScoreRun ScorePairs(std::span<const PairTexts> pairs, ScorerBackend& backend,
                    const ScoreOptions& options) {
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);
  const std::size_t batches = (pairs.size() + batch_size - 1) / batch_size;
  std::vector<std::vector<PairOutcome>> outcomes(batches);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t b = next++; b < batches; b = next++) {
      const auto batch = pairs.subspan(
          b * batch_size, std::min(batch_size, pairs.size() - b * batch_size));
      std::string error;
      for (int attempt = 0; attempt <= options.retries; ++attempt) {
        try {
          auto result = backend.ScoreBatch(batch);
          if (result.size() != batch.size()) {
            throw MalformedResponse("expected " + std::to_string(batch.size()) +
                                    " results, got " +
                                    std::to_string(result.size()));
          }
          outcomes[b] = std::move(result);
          error.clear();
          break;
        } catch (const MalformedResponse& e) {
          error = std::string("malformed response: ") + e.what();
          break;
        } catch (const BackendError& e) {
          error = std::string("transport failure: ") + e.what();
        }
      }
      if (!error.empty()) {
        outcomes[b].assign(batch.size(), PairOutcome{std::nullopt, error});
      }
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(options.max_inflight, 1, std::max<std::size_t>(1, batches));
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < workers; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  ScoreRun run;
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < outcomes[b].size(); ++i) {
      const PairTexts& p = pairs[b * batch_size + i];
      const PairOutcome& o = outcomes[b][i];
      if (!o.logprobs) {
        run.failures.push_back({p.pair_id, o.error});
      } else if (!std::isfinite(o.logprobs->first) ||
                 !std::isfinite(o.logprobs->second)) {
        run.failures.push_back({p.pair_id, "non-finite score"});
      } else {
        run.scored.push_back(
            {p.pair_id, o.logprobs->first, o.logprobs->second, backend.Id()});
      }
    }
  }
  std::sort(run.scored.begin(), run.scored.end(),
            [](const ScoredPair& a, const ScoredPair& b) {
              return a.pair_id < b.pair_id;
            });
  std::sort(run.failures.begin(), run.failures.end(),
            [](const ScoreFailure& a, const ScoreFailure& b) {
              return a.pair_id < b.pair_id;
            });
  return run;
}

double Margin(const ScoredPair& pair) {
  return pair.logp_observed - pair.logp_manipulated;
}

double Accuracy(std::span<const ScoredPair> pairs) {
  if (pairs.empty()) throw DataError("empty challenge set");
  const auto correct = std::count_if(pairs.begin(), pairs.end(),
                                     [](const ScoredPair& p) {
                                       return p.logp_observed > p.logp_manipulated;
                                     });
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

Json ToJson(const ScoredPair& p) {
  return {{"pair_id", p.pair_id},
          {"logp_observed", p.logp_observed},
          {"logp_manipulated", p.logp_manipulated},
          {"scorer", p.scorer_id},
          {"margin", Margin(p)}};
}

ScoredPair ScoredPairFromJson(const Json& j) {
  try {
    return {j.at("pair_id").get<std::string>(),
            j.at("logp_observed").get<double>(),
            j.at("logp_manipulated").get<double>(), j.value("scorer", "")};
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed scored-pair record: ") + e.what());
  }
}

std::vector<ScoredPair> LoadScoredPairs(const std::string& path) {
  const std::string content = ReadFile(path);
  const auto first = content.find_first_not_of(" \t\r\n");
  std::vector<ScoredPair> out;
  if (first != std::string::npos && content[first] == '{') {
    for (const Json& j : ParseJsonl(content, path).records) {
      out.push_back(ScoredPairFromJson(j));
    }
    return out;
  }
  const FileScorer scorer = FileScorer::Parse(content, path);
  for (const auto& [id, scores] : scorer.rows()) {
    out.push_back({id, scores.first, scores.second, path});
  }
  return out;
}

}  // namespace acs::scoring
