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

#include "acs/jsonl.h"

#include <fstream>
#include <sstream>

#include "acs/error.h"

namespace acs {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out << content;
  if (!out) throw DataError("write failed: " + path);
}

JsonlFile ParseJsonl(const std::string& content, const std::string& origin) {
  JsonlFile file;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw DataError(origin + ":" + std::to_string(line_no) +
                      ": malformed JSON: " + e.what());
    }
    if (j.is_object() && j.contains("_meta")) {
      const Json& m = j["_meta"];
      file.meta = ArtifactMeta{m.value("artifact", ""),
                               m.value("config_hash", ""),
                               m.value("seed", std::uint64_t{0})};
      continue;
    }
    file.records.push_back(std::move(j));
  }
  return file;
}

JsonlFile ReadJsonl(const std::string& path) {
  return ParseJsonl(ReadFile(path), path);
}

std::string DumpJsonl(const std::vector<Json>& records,
                      const std::optional<ArtifactMeta>& meta) {
  std::string out;
  if (meta) {
    Json header = {{"_meta",
                    {{"artifact", meta->artifact},
                     {"config_hash", meta->config_hash},
                     {"seed", meta->seed}}}};
    out += header.dump();
    out += '\n';
  }
  for (const Json& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

void WriteJsonl(const std::string& path, const std::vector<Json>& records,
                const std::optional<ArtifactMeta>& meta) {
  WriteFile(path, DumpJsonl(records, meta));
}

void CheckMeta(const JsonlFile& file, const std::string& path,
               const std::string& expected_hash) {
  if (!file.meta) return;
  if (file.meta->config_hash != expected_hash) {
    throw DataError(path + ": artifact was produced under config " +
                    file.meta->config_hash + ", expected " + expected_hash);
  }
}

}  // namespace acs
