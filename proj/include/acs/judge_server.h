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

// HTTP wire API for the judge service. All bodies are JSON.
//
//   POST /api/plan      {pool, k, seed, batch_size?}   -> plan (with tokens)
//   POST /api/session   {token}                        -> {annotator_id, progress}
//   POST /api/next      {token, after?}                -> item or {status: complete}
//   POST /api/submit    {token, pair_id, choice}       -> {status, record, judged, total}
//   POST /api/progress  {token}                        -> progress
//   GET  /api/export[?annotator=ID&complete=1]         -> {records: [...]}
//
// Everything except submit is idempotent.

#ifndef ACS_JUDGE_SERVER_H_
#define ACS_JUDGE_SERVER_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "acs/judge.h"

namespace httplib {
class Server;
}

namespace acs::judge {

struct ServerConfig {
  std::map<std::string, PairView> views;
  std::string plan_path;  // loaded if present, written by POST /api/plan
  std::string log_path;
  ServiceOptions options;
};

class JudgeServer {
 public:
  explicit JudgeServer(ServerConfig config);
  ~JudgeServer();

  // Binds to host:port (port 0 picks a free one) and returns the bound port.
  int Bind(const std::string& host, int port);
  // Blocks until Stop().
  void Serve();
  void Stop();

  JudgeService* service();

 private:
  void Routes();
  void InstallPlan(Plan plan);

  ServerConfig config_;
  std::unique_ptr<httplib::Server> http_;
  std::mutex plan_mu_;
  std::shared_ptr<JudgeService> service_;
};

}  // namespace acs::judge

#endif  // ACS_JUDGE_SERVER_H_
