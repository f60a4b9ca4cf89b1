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

// Line-delimited JSON artifacts. Pipeline-produced files start with a header
// line {"_meta": {...}} carrying the artifact kind, config hash and seed.

#ifndef ACS_JSONL_H_
#define ACS_JSONL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace acs {

using Json = nlohmann::json;

struct ArtifactMeta {
  std::string artifact;
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct JsonlFile {
  std::optional<ArtifactMeta> meta;
  std::vector<Json> records;
};

// Throws DataError naming file and line on malformed input.
JsonlFile ReadJsonl(const std::string& path);
JsonlFile ParseJsonl(const std::string& content, const std::string& origin);

std::string DumpJsonl(const std::vector<Json>& records,
                      const std::optional<ArtifactMeta>& meta = std::nullopt);
void WriteJsonl(const std::string& path, const std::vector<Json>& records,
                const std::optional<ArtifactMeta>& meta = std::nullopt);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& content);

// Rejects artifacts produced under a different configuration.
void CheckMeta(const JsonlFile& file, const std::string& path,
               const std::string& expected_hash);

}  // namespace acs

#endif  // ACS_JSONL_H_
