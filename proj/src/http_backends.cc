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

#include "acs/http_backends.h"

#include <cmath>

#include "acs/error.h"
#include "acs/text.h"
#include "httplib.h"

namespace acs {

Endpoint Endpoint::Parse(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw UsageError("endpoint URL needs a scheme: " + url);
  std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw UsageError("unsupported endpoint scheme: " + url);
  }
  auto path_at = url.find('/', scheme_end + 3);
  Endpoint e;
  e.base = url.substr(0, path_at);
  e.path = path_at == std::string::npos ? "/" : url.substr(path_at);
  if (e.base.size() <= scheme_end + 3) throw UsageError("endpoint URL has no host: " + url);
  return e;
}

std::string PostJson(const Endpoint& endpoint, const std::string& body,
                     int timeout_seconds) {
  httplib::Client client(endpoint.base);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  auto res = client.Post(endpoint.path, body, "application/json");
  if (!res) {
    throw BackendError(endpoint.base + endpoint.path + ": " +
                       httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError(endpoint.base + endpoint.path + ": HTTP " +
                       std::to_string(res->status) + ": " + res->body);
  }
  return res->body;
}

std::string NullNonFinite(std::string_view json) {
  std::string out;
  out.reserve(json.size());
  bool in_string = false;
  for (std::size_t i = 0; i < json.size(); ++i) {
    char c = json[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < json.size()) {
        out += json[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    bool replaced = false;
    for (std::string_view token : {"-Infinity", "Infinity", "NaN"}) {
      if (json.substr(i, token.size()) == token) {
        out += "null";
        i += token.size() - 1;
        replaced = true;
        break;
      }
    }
    if (!replaced) out += c;
  }
  return out;
}

namespace {

Json ParseResponse(const std::string& body) {
  Json j = Json::parse(NullNonFinite(body), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw scoring::MalformedResponse("not a JSON object: " + body.substr(0, 200));
  }
  return j;
}

}  // namespace

namespace ingest {

std::vector<std::pair<std::size_t, std::size_t>> HttpSegmenter::Boundaries(
    std::string_view text) {
  Json req = {{"text", std::string(text)}};
  std::string body = PostJson(endpoint_, req.dump());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  try {
    Json j = ParseResponse(body);
    for (const auto& r : j.at("char_offsets")) {
      auto b = r.at(0).get<std::size_t>();
      auto e = r.at(1).get<std::size_t>();
      out.emplace_back(text::ByteOffsetOfCodePoint(text, b),
                       text::ByteOffsetOfCodePoint(text, e));
    }
  } catch (const std::exception& e) {
    throw BackendError(Name() + ": malformed segmentation response: " + e.what());
  }
  return out;
}

}  // namespace ingest

namespace lid {

LanguagePrediction HttpMonoLid::Predict(std::string_view text) {
  Json req = {{"text", std::string(text)}};
  std::string body = PostJson(endpoint_, req.dump());
  try {
    Json j = ParseResponse(body);
    LanguagePrediction p;
    p.language = j.at("language").get<std::string>();
    p.confidence = j.value("confidence", 0.0);
    return p;
  } catch (const std::exception& e) {
    throw BackendError(Name() + ": malformed language response: " + e.what());
  }
}

}  // namespace lid

namespace scoring {

std::vector<PairOutcome> EndpointScorer::ScoreBatch(std::span<const PairTexts> batch) {
  Json texts = Json::array();
  for (const auto& p : batch) {
    texts.push_back(p.observed);
    texts.push_back(p.manipulated);
  }
  std::string body = PostJson(endpoint_, Json{{"texts", texts}}.dump());
  Json j = ParseResponse(body);
  if (!j.contains("logprobs") || !j["logprobs"].is_array()) {
    throw MalformedResponse("missing logprobs: " + body.substr(0, 200));
  }
  const Json& lp = j["logprobs"];
  if (lp.size() != texts.size()) {
    throw MalformedResponse("expected " + std::to_string(texts.size()) +
                            " logprobs, got " + std::to_string(lp.size()));
  }
  std::vector<PairOutcome> out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Json& o = lp[2 * i];
    const Json& m = lp[2 * i + 1];
    if (o.is_null() || m.is_null()) {
      out.push_back({std::nullopt, "non-finite score"});
    } else if (!o.is_number() || !m.is_number()) {
      out.push_back({std::nullopt, "malformed response: non-numeric logprob"});
    } else {
      out.push_back({std::make_pair(o.get<double>(), m.get<double>()), ""});
    }
  }
  return out;
}

}  // namespace scoring
}  // namespace acs
