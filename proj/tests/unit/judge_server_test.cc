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

#include "acs/judge_server.h"

#include <gtest/gtest.h>

#include <chrono>
#include <set>
#include <thread>

#include "httplib.h"
#include "test_support.h"

namespace acs::judge {
namespace {

std::map<std::string, PairView> Views(int n) {
  std::map<std::string, PairView> out;
  for (int i = 0; i < n; ++i) {
    const std::string id = "de-en:d" + std::to_string(100 + i) + "#0";
    out[id] = {"obs " + id, "man " + id, {0, 3}, {0, 3}};
  }
  return out;
}

// Runs a server on a free port for the lifetime of the object.
class RunningServer {
 public:
  RunningServer(const testing::TempDir& dir, int pairs) {
    ServerConfig config;
    config.views = Views(pairs);
    config.plan_path = dir.File("plan.json");
    config.log_path = dir.File("judgments.jsonl");
    server_ = std::make_unique<JudgeServer>(std::move(config));
    port_ = server_->Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->Serve(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    // Wait until the listener accepts.
    for (int i = 0; i < 200 && !client_->Get("/api/export"); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ~RunningServer() {
    server_->Stop();
    thread_.join();
  }

  std::pair<int, Json> Post(const std::string& path, const Json& body) {
    auto res = client_->Post(path, body.dump(), "application/json");
    if (!res) return {0, Json()};
    return {res->status, Json::parse(res->body)};
  }
  std::pair<int, Json> Get(const std::string& path) {
    auto res = client_->Get(path);
    if (!res) return {0, Json()};
    return {res->status, Json::parse(res->body)};
  }

 private:
  std::unique_ptr<JudgeServer> server_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST(JudgeServerTest, FullSessionOverTheWire) {
  testing::TempDir dir;
  RunningServer s(dir, 12);
  EXPECT_EQ(s.Post("/api/next", {{"token", "x"}}).first, 409);

  const auto [plan_status, plan] =
      s.Post("/api/plan", {{"pool", {"ann1", "ann2", "ann3"}}, {"k", 2}, {"seed", 4},
                           {"batch_size", 4}});
  ASSERT_EQ(plan_status, 200) << plan.dump();
  const std::string token = plan["tokens"]["ann1"];
  // Same parameters are idempotent, different ones conflict.
  const auto again = s.Post("/api/plan", {{"pool", {"ann1", "ann2", "ann3"}}, {"k", 2},
                                          {"seed", 4}, {"batch_size", 4}});
  EXPECT_EQ(again.first, 200);
  EXPECT_EQ(again.second["tokens"], plan["tokens"]);
  EXPECT_EQ(s.Post("/api/plan", {{"pool", {"ann1", "ann2"}}, {"k", 2}}).first, 409);

  EXPECT_EQ(s.Post("/api/session", {{"token", "bogus"}}).first, 401);
  const auto session = s.Post("/api/session", {{"token", token}});
  ASSERT_EQ(session.first, 200);
  EXPECT_EQ(session.second["annotator_id"], "ann1");
  const std::size_t total = session.second["progress"]["total"];
  EXPECT_EQ(total, 8u);

  std::set<std::string> seen;
  for (std::size_t i = 0; i < total; ++i) {
    const auto next = s.Post("/api/next", {{"token", token}});
    ASSERT_EQ(next.first, 200);
    EXPECT_FALSE(next.second.dump().find("observed_first") != std::string::npos);
    const std::string pid = next.second["pair_id"];
    EXPECT_TRUE(seen.insert(pid).second);
    const auto sub = s.Post("/api/submit", {{"token", token}, {"pair_id", pid}, {"choice", "A"}});
    ASSERT_EQ(sub.first, 200) << sub.second.dump();
    EXPECT_EQ(sub.second["judged"], i + 1);
    const auto dup = s.Post("/api/submit", {{"token", token}, {"pair_id", pid}, {"choice", "B"}});
    EXPECT_EQ(dup.first, 409);
    EXPECT_EQ(dup.second["record"]["choice"], "A");
  }
  const auto done = s.Post("/api/next", {{"token", token}});
  EXPECT_EQ(done.second["status"], "complete");

  const auto progress = s.Post("/api/progress", {{"token", token}});
  EXPECT_EQ(progress.second["judged"], total);

  const auto exported = s.Get("/api/export?annotator=ann1&complete=1");
  ASSERT_EQ(exported.first, 200);
  EXPECT_EQ(exported.second["records"].size(), total);
  EXPECT_EQ(s.Get("/api/export?annotator=ann2").second["records"].size(), 0u);
}

TEST(JudgeServerTest, BadRequests) {
  testing::TempDir dir;
  RunningServer s(dir, 4);
  EXPECT_EQ(s.Post("/api/plan", {{"pool", {"a"}}, {"k", 3}}).first, 400);
  const auto plan = s.Post("/api/plan", {{"pool", {"a", "b"}}, {"k", 1}, {"seed", 1}});
  ASSERT_EQ(plan.first, 200);
  const std::string a = plan.second["tokens"]["a"];
  EXPECT_EQ(s.Post("/api/submit", {{"token", a}, {"pair_id", "de-en:d100#0"}, {"choice", "C"}})
                .first,
            400);
  EXPECT_EQ(s.Post("/api/submit", {{"token", a}, {"choice", "A"}}).first, 400);
  EXPECT_EQ(s.Post("/api/submit", {{"token", a}, {"pair_id", "zzz"}, {"choice", "A"}}).first,
            404);
  std::string foreign;
  for (const auto& asg : plan.second["assignments"]) {
    if (asg["annotators"][0] == "b") foreign = asg["pair_id"];
  }
  ASSERT_FALSE(foreign.empty());
  EXPECT_EQ(s.Post("/api/submit", {{"token", a}, {"pair_id", foreign}, {"choice", "A"}}).first,
            403);
}

TEST(JudgeServerTest, PlanAndLogSurviveRestart) {
  testing::TempDir dir;
  std::string token;
  std::string judged;
  {
    RunningServer s(dir, 6);
    const auto plan = s.Post("/api/plan", {{"pool", {"a"}}, {"k", 1}, {"seed", 2}});
    token = plan.second["tokens"]["a"];
    judged = s.Post("/api/next", {{"token", token}}).second["pair_id"];
    ASSERT_EQ(
        s.Post("/api/submit", {{"token", token}, {"pair_id", judged}, {"choice", "B"}}).first,
        200);
  }
  RunningServer s(dir, 6);
  const auto progress = s.Post("/api/progress", {{"token", token}});
  ASSERT_EQ(progress.first, 200);
  EXPECT_EQ(progress.second["judged"], 1);
  EXPECT_NE(s.Post("/api/next", {{"token", token}}).second["pair_id"], judged);
  EXPECT_EQ(s.Get("/api/export").second["records"][0]["pair_id"], judged);
}

}  // namespace
}  // namespace acs::judge
