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

// Backends that call external services over HTTP with JSON bodies.

#ifndef ACS_HTTP_BACKENDS_H_
#define ACS_HTTP_BACKENDS_H_

#include <string>
#include <string_view>

#include "acs/ingest.h"
#include "acs/lid.h"
#include "acs/scoring.h"

namespace acs {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // begins with '/'

  // Throws UsageError for anything but http(s)://host[:port][/path].
  static Endpoint Parse(const std::string& url);
};

// POSTs `body` and returns the response body. Non-2xx and connection errors
// throw BackendError carrying the status and message.
std::string PostJson(const Endpoint& endpoint, const std::string& body,
                     int timeout_seconds = 30);

// Replaces bare NaN / Infinity / -Infinity tokens outside strings with null so
// the payload parses as standard JSON.
std::string NullNonFinite(std::string_view json);

namespace ingest {

// {text} -> {char_offsets: [[start, end), ...]} in code points.
class HttpSegmenter : public SegmentationBackend {
 public:
  explicit HttpSegmenter(std::string url) : endpoint_(Endpoint::Parse(url)) {}
  std::vector<std::pair<std::size_t, std::size_t>> Boundaries(
      std::string_view text) override;
  std::string Name() const override { return endpoint_.base + endpoint_.path; }

 private:
  Endpoint endpoint_;
};

}  // namespace ingest

namespace lid {

// {text} -> {language, confidence}.
class HttpMonoLid : public MonoLidBackend {
 public:
  explicit HttpMonoLid(std::string url) : endpoint_(Endpoint::Parse(url)) {}
  LanguagePrediction Predict(std::string_view text) override;
  std::string Name() const override { return endpoint_.base + endpoint_.path; }

 private:
  Endpoint endpoint_;
};

}  // namespace lid

namespace scoring {

// {texts: [...]} -> {logprobs: [...]}, same order. Each batch sends the
// observed and manipulated text of every pair, interleaved.
class EndpointScorer : public ScorerBackend {
 public:
  EndpointScorer(std::string id, std::string url, ScorerKind kind)
      : id_(std::move(id)), endpoint_(Endpoint::Parse(url)), kind_(kind) {}

  std::string Id() const override { return id_; }
  ScorerKind Kind() const override { return kind_; }
  Transport transport() const override { return Transport::kEndpoint; }
  std::vector<PairOutcome> ScoreBatch(std::span<const PairTexts> batch) override;

 private:
  std::string id_;
  Endpoint endpoint_;
  ScorerKind kind_;
};

}  // namespace scoring
}  // namespace acs

#endif  // ACS_HTTP_BACKENDS_H_
