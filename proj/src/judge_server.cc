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

#include <filesystem>

#include "acs/error.h"
#include "httplib.h"

namespace acs::judge {
namespace {

void Reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void Fail(httplib::Response& res, int status, const std::string& message) {
  Reply(res, status, {{"error", message}});
}

Json ParseBody(const httplib::Request& req) {
  Json j = Json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw UsageError("body must be a JSON object");
  return j;
}

std::string StringField(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw UsageError(std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

JudgeServer::JudgeServer(ServerConfig config)
    : config_(std::move(config)), http_(std::make_unique<httplib::Server>()) {
  if (!config_.plan_path.empty() && std::filesystem::exists(config_.plan_path)) {
    InstallPlan(PlanFromJson(Json::parse(ReadFile(config_.plan_path))));
  }
  Routes();
}

JudgeServer::~JudgeServer() = default;

JudgeService* JudgeServer::service() {
  std::lock_guard<std::mutex> lock(plan_mu_);
  return service_.get();
}

void JudgeServer::InstallPlan(Plan plan) {
  service_ = std::make_shared<JudgeService>(std::move(plan), config_.views,
                                            config_.log_path, config_.options);
}

int JudgeServer::Bind(const std::string& host, int port) {
  if (port == 0) return http_->bind_to_any_port(host);
  if (!http_->bind_to_port(host, port)) {
    throw UsageError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void JudgeServer::Serve() { http_->listen_after_bind(); }

void JudgeServer::Stop() { http_->stop(); }

void JudgeServer::Routes() {
  // Wraps a handler with session lookup and error mapping.
  auto with_session = [this](auto fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        std::shared_ptr<JudgeService> svc;
        {
          std::lock_guard<std::mutex> lock(plan_mu_);
          svc = service_;
        }
        if (!svc) return Fail(res, 409, "no plan loaded");
        Json body = ParseBody(req);
        auto annotator = svc->Authenticate(StringField(body, "token"));
        if (!annotator) return Fail(res, 401, "unknown token");
        fn(*svc, *annotator, body, res);
      } catch (const UsageError& e) {
        Fail(res, 400, e.what());
      } catch (const std::exception& e) {
        Fail(res, 500, e.what());
      }
    };
  };

  http_->Post("/api/plan", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      Json body = ParseBody(req);
      auto pool = body.at("pool").get<std::vector<std::string>>();
      int k = body.value("k", 1);
      std::uint64_t seed = body.value("seed", std::uint64_t{0});
      std::size_t batch = body.value("batch_size", kDefaultBatchSize);
      std::lock_guard<std::mutex> lock(plan_mu_);
      if (service_) {
        const Plan& p = service_->plan();
        if (p.pool == pool && p.k == k && p.seed == seed && p.batch_size == batch) {
          return Reply(res, 200, ToJson(p));
        }
        return Fail(res, 409, "a different plan is already loaded");
      }
      std::vector<std::string> ids;
      for (const auto& [id, view] : config_.views) ids.push_back(id);
      Plan plan = PlanAssignments(ids, pool, k, seed, batch);
      Json j = ToJson(plan);
      if (!config_.plan_path.empty()) {
        std::string tmp = config_.plan_path + ".tmp";
        WriteFile(tmp, j.dump(2) + "\n");
        std::filesystem::rename(tmp, config_.plan_path);
      }
      InstallPlan(std::move(plan));
      Reply(res, 200, j);
    } catch (const Json::exception& e) {
      Fail(res, 400, e.what());
    } catch (const UsageError& e) {
      Fail(res, 400, e.what());
    } catch (const std::exception& e) {
      Fail(res, 500, e.what());
    }
  });

  http_->Post("/api/session",
              with_session([](JudgeService& svc, const std::string& ann, const Json&,
                              httplib::Response& res) {
                Reply(res, 200,
                      {{"annotator_id", ann}, {"progress", ToJson(svc.GetProgress(ann))}});
              }));

  http_->Post("/api/next",
              with_session([](JudgeService& svc, const std::string& ann,
                              const Json& body, httplib::Response& res) {
                std::optional<std::string> after;
                if (body.contains("after") && body["after"].is_string()) {
                  after = body["after"].get<std::string>();
                }
                Reply(res, 200, ToJson(svc.NextItem(ann, after)));
              }));

  http_->Post("/api/submit",
              with_session([](JudgeService& svc, const std::string& ann,
                              const Json& body, httplib::Response& res) {
                std::string pid = StringField(body, "pair_id");
                std::string c = StringField(body, "choice");
                if (c != "A" && c != "B") return Fail(res, 400, "choice must be A or B");
                auto r = svc.Submit(ann, pid, c == "A" ? Choice::kA : Choice::kB);
                switch (r.status) {
                  case SubmitStatus::kAccepted:
                    return Reply(res, 200,
                                 {{"status", "ok"},
                                  {"record", ToJson(r.record)},
                                  {"judged", r.judged},
                                  {"total", r.total}});
                  case SubmitStatus::kDuplicate:
                    return Reply(res, 409,
                                 {{"error", "already judged"},
                                  {"record", ToJson(r.record)},
                                  {"judged", r.judged},
                                  {"total", r.total}});
                  case SubmitStatus::kUnknownPair:
                    return Fail(res, 404, "unknown pair " + pid);
                  case SubmitStatus::kForeignPair:
                    return Fail(res, 403, "pair " + pid + " is not assigned to you");
                }
              }));

  http_->Post("/api/progress",
              with_session([](JudgeService& svc, const std::string& ann, const Json&,
                              httplib::Response& res) {
                Reply(res, 200, ToJson(svc.GetProgress(ann)));
              }));

  http_->Get("/api/export", [this](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<JudgeService> svc;
    {
      std::lock_guard<std::mutex> lock(plan_mu_);
      svc = service_;
    }
    Json records = Json::array();
    if (svc) {
      ExportFilter f;
      if (req.has_param("annotator")) f.annotator_id = req.get_param_value("annotator");
      f.complete_batches_only = req.get_param_value("complete") == "1";
      for (const auto& r : svc->Export(f)) records.push_back(ToJson(r));
    }
    Reply(res, 200, {{"records", records}});
  });
}

}  // namespace acs::judge
