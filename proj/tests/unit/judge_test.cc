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

#include "acs/judge.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "acs/error.h"
#include "test_support.h"

namespace acs::judge {
namespace {

std::vector<std::string> PairIds(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "de-en:d%04d#0", i);
    out.push_back(buf);
  }
  return out;
}

std::map<std::string, PairView> Views(const std::vector<std::string>& ids) {
  std::map<std::string, PairView> out;
  for (const auto& id : ids) {
    out[id] = {"observed " + id, "manipulated " + id, {0, 8}, {0, 11}};
  }
  return out;
}

const std::vector<std::string> kPool = {"ann1", "ann2", "ann3", "ann4", "ann5"};

TEST(PlanTest, ThreeThirtyFiveOverFive) {
  const auto ids = PairIds(335);
  const Plan plan = PlanAssignments(ids, kPool, 3, 17);
  std::map<std::string, std::set<std::string>> per_annotator;
  for (const auto& a : plan.assignments) {
    ASSERT_EQ(a.annotators.size(), 3u);
    EXPECT_EQ(std::set<std::string>(a.annotators.begin(), a.annotators.end()).size(), 3u);
    for (const auto& ann : a.annotators) per_annotator[ann].insert(a.pair_id);
  }
  for (const auto& ann : kPool) {
    EXPECT_EQ(per_annotator[ann].size(), 201u) << ann;
    const auto batches = plan.BatchesOf(ann);
    ASSERT_EQ(batches.size(), 3u) << ann;
    std::set<std::string> batched;
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(batches[i]->index, i);
      EXPECT_EQ(batches[i]->pair_ids.size(), 67u);
      batched.insert(batches[i]->pair_ids.begin(), batches[i]->pair_ids.end());
    }
    EXPECT_EQ(batched, per_annotator[ann]);
  }
  EXPECT_EQ(plan.tokens.size(), 5u);
}

TEST(PlanTest, SingleAnnotator) {
  const std::vector<std::string> pool = {"solo"};
  const Plan plan = PlanAssignments(PairIds(201), pool, 1, 1);
  const auto batches = plan.BatchesOf("solo");
  ASSERT_EQ(batches.size(), 3u);
  for (const Batch* b : batches) EXPECT_EQ(b->pair_ids.size(), 67u);
}

TEST(PlanTest, Errors) {
  const auto ids = PairIds(10);
  const std::vector<std::string> two = {"a", "b"};
  EXPECT_THROW(PlanAssignments(ids, two, 3, 1), UsageError);
  const std::vector<std::string> dup = {"a", "a", "b"};
  EXPECT_THROW(PlanAssignments(ids, dup, 2, 1), UsageError);
  EXPECT_THROW(PlanAssignments(ids, two, 0, 1), UsageError);
  std::vector<std::string> repeated = ids;
  repeated.push_back(ids[0]);
  EXPECT_THROW(PlanAssignments(repeated, two, 1, 1), DataError);
}

TEST(PlanTest, SeededAndSerializable) {
  const auto ids = PairIds(50);
  const Plan a = PlanAssignments(ids, kPool, 2, 9);
  const Plan b = PlanAssignments(ids, kPool, 2, 9);
  Json ja = ToJson(a);
  Json jb = ToJson(b);
  // Tokens are random secrets; everything else is seeded.
  ja.erase("tokens");
  jb.erase("tokens");
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(ToJson(PlanFromJson(ToJson(a))), ToJson(a));
  EXPECT_THROW(PlanFromJson(Json{{"version", 1}}), DataError);
}

TEST(PresentationTest, StableAndBalanced) {
  int first = 0;
  for (const auto& id : PairIds(1000)) {
    const bool a = ObservedFirst(5, id, "ann1");
    EXPECT_EQ(a, ObservedFirst(5, id, "ann1"));
    first += a ? 1 : 0;
  }
  EXPECT_GT(first, 400);
  EXPECT_LT(first, 600);
  EXPECT_EQ(Resolve(Choice::kA, true), Resolved::kObserved);
  EXPECT_EQ(Resolve(Choice::kA, false), Resolved::kManipulated);
  EXPECT_EQ(Resolve(Choice::kB, true), Resolved::kManipulated);
  EXPECT_EQ(Resolve(Choice::kB, false), Resolved::kObserved);
}

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest()
      : ids_(PairIds(20)),
        plan_(PlanAssignments(ids_, std::vector<std::string>{"a", "b"}, 1, 3, 4)) {}

  std::unique_ptr<JudgeService> Open(ServiceOptions options = {}) {
    return std::make_unique<JudgeService>(plan_, Views(ids_), dir_.File("log.jsonl"), options);
  }

  // Judges the next `n` items for `annotator`, always choosing A.
  static void Judge(JudgeService& svc, const std::string& annotator, int n) {
    for (int i = 0; i < n; ++i) {
      const ItemPayload item = svc.NextItem(annotator);
      ASSERT_FALSE(item.complete);
      ASSERT_EQ(svc.Submit(annotator, item.pair_id, Choice::kA).status,
                SubmitStatus::kAccepted);
    }
  }

  testing::TempDir dir_;
  std::vector<std::string> ids_;
  Plan plan_;
};

TEST_F(ServiceTest, NextItemHidesSide) {
  auto svc = Open();
  const ItemPayload item = svc->NextItem("a");
  EXPECT_EQ(item.pair_id, plan_.BatchesOf("a")[0]->pair_ids[0]);
  EXPECT_EQ(svc->NextItem("a").pair_id, item.pair_id);
  const bool obs_first = ObservedFirst(plan_.seed, item.pair_id, "a");
  EXPECT_EQ(item.text_a, (obs_first ? "observed " : "manipulated ") + item.pair_id);
  EXPECT_EQ(item.span_a.end, obs_first ? 8u : 11u);
  const Json j = ToJson(item);
  EXPECT_FALSE(j.dump().find("observed_first") != std::string::npos);
  EXPECT_NE(svc->NextItem("a", item.pair_id).pair_id, item.pair_id);
  EXPECT_EQ(svc->Authenticate(plan_.tokens.at("b")), "b");
  EXPECT_FALSE(svc->Authenticate("nope").has_value());
}

TEST_F(ServiceTest, SubmitStatuses) {
  auto svc = Open();
  const std::string mine = svc->NextItem("a").pair_id;
  const std::string theirs = svc->NextItem("b").pair_id;
  const SubmitResult ok = svc->Submit("a", mine, Choice::kB);
  EXPECT_EQ(ok.status, SubmitStatus::kAccepted);
  EXPECT_EQ(ok.record.resolved, Resolve(Choice::kB, ok.record.observed_first));
  EXPECT_EQ(ok.judged, 1u);
  EXPECT_EQ(ok.total, 10u);

  const SubmitResult dup = svc->Submit("a", mine, Choice::kA);
  EXPECT_EQ(dup.status, SubmitStatus::kDuplicate);
  EXPECT_EQ(dup.record.choice, Choice::kB);
  EXPECT_EQ(svc->Submit("a", theirs, Choice::kA).status, SubmitStatus::kForeignPair);
  EXPECT_EQ(svc->Submit("a", "de-en:nope#0", Choice::kA).status, SubmitStatus::kUnknownPair);
  EXPECT_EQ(svc->RecordCount(), 1u);
  EXPECT_NE(svc->NextItem("a").pair_id, mine);
}

TEST_F(ServiceTest, ProgressAndCompletion) {
  auto svc = Open();
  Judge(*svc, "a", 5);
  const Progress p = svc->GetProgress("a");
  EXPECT_EQ(p.judged, 5u);
  EXPECT_EQ(p.total, 10u);
  ASSERT_EQ(p.batches.size(), 3u);
  EXPECT_EQ(p.batches[0].judged, 4u);
  EXPECT_EQ(p.batches[1].judged, 1u);
  EXPECT_EQ(p.batches[2].size, 2u);
  Judge(*svc, "a", 5);
  EXPECT_TRUE(svc->NextItem("a").complete);
  EXPECT_THROW(svc->GetProgress("zed"), UsageError);
}

TEST_F(ServiceTest, ExportOrderAndFilter) {
  auto svc = Open();
  Judge(*svc, "b", 6);
  Judge(*svc, "a", 2);
  const auto all = svc->Export();
  ASSERT_EQ(all.size(), 8u);
  EXPECT_EQ(all[0].annotator_id, "a");
  EXPECT_EQ(all[2].annotator_id, "b");
  for (std::size_t i = 2; i + 1 < all.size(); ++i) {
    EXPECT_LE(all[i].batch_index, all[i + 1].batch_index);
  }
  const auto complete = svc->Export({std::nullopt, true});
  ASSERT_EQ(complete.size(), 4u);
  for (const auto& r : complete) {
    EXPECT_EQ(r.annotator_id, "b");
    EXPECT_EQ(r.batch_index, 0);
  }
  EXPECT_EQ(svc->Export({std::string("a"), false}).size(), 2u);
}

TEST_F(ServiceTest, RestartKeepsEverything) {
  std::vector<JudgmentRecord> before;
  {
    auto svc = Open();
    Judge(*svc, "a", 7);
    Judge(*svc, "b", 3);
    before = svc->Export();
  }
  auto svc = Open();
  EXPECT_EQ(svc->RecordCount(), 10u);
  const auto after = svc->Export();
  ASSERT_EQ(after.size(), before.size());
  for (std::size_t i = 0; i < after.size(); ++i) EXPECT_EQ(ToJson(after[i]), ToJson(before[i]));
  EXPECT_EQ(ReadJudgmentLog(dir_.File("log.jsonl")).size(), 10u);
}

TEST_F(ServiceTest, TornTailTruncated) {
  {
    auto svc = Open();
    Judge(*svc, "a", 3);
  }
  const std::string log = dir_.File("log.jsonl");
  const auto intact = std::filesystem::file_size(log);
  {
    std::ofstream out(log, std::ios::app);
    out << R"({"annotator_id":"a","pair)";
  }
  EXPECT_EQ(ReadJudgmentLog(log).size(), 3u);
  auto svc = Open();
  EXPECT_EQ(svc->RecordCount(), 3u);
  EXPECT_EQ(std::filesystem::file_size(log), intact);
  Judge(*svc, "a", 1);
  EXPECT_EQ(ReadJudgmentLog(log).size(), 4u);
}

TEST_F(ServiceTest, CorruptMiddleIsDataError) {
  {
    auto svc = Open();
    Judge(*svc, "a", 2);
  }
  const std::string log = dir_.File("log.jsonl");
  std::string content = ReadFile(log);
  content.insert(content.find('\n') + 1, "garbage\n");
  WriteFile(log, content);
  EXPECT_THROW(Open(), DataError);
}

TEST_F(ServiceTest, SnapshotReplay) {
  ServiceOptions options;
  options.snapshot_every = 3;
  {
    auto svc = Open(options);
    Judge(*svc, "a", 7);
  }
  EXPECT_TRUE(std::filesystem::exists(dir_.File("log.jsonl.snapshot")));
  {
    auto svc = Open(options);
    EXPECT_EQ(svc->RecordCount(), 7u);
    Judge(*svc, "b", 2);
  }
  WriteFile(dir_.File("log.jsonl.snapshot"), "{not json");
  auto svc = Open(options);
  EXPECT_EQ(svc->RecordCount(), 9u);
  EXPECT_EQ(svc->Export({std::string("b"), false}).size(), 2u);
}

TEST_F(ServiceTest, LogFromAnotherPlanRejected) {
  {
    auto svc = Open();
    Judge(*svc, "a", 2);
  }
  plan_ = PlanAssignments(ids_, std::vector<std::string>{"c", "d"}, 1, 3, 4);
  EXPECT_THROW(Open(), DataError);
}

TEST(JudgmentRecordTest, RoundTrip) {
  JudgmentRecord r{"a", "de-en:d1#0", Choice::kB, false, Resolved::kObserved, 2,
                   "2026-01-01T00:00:00Z"};
  const Json j = ToJson(r);
  EXPECT_EQ(j["choice"], "B");
  EXPECT_EQ(ToJson(JudgmentFromJson(j)), j);
  Json bad = j;
  bad["resolved_choice"] = "manipulated";
  EXPECT_THROW(JudgmentFromJson(bad), DataError);
  EXPECT_EQ(Iso8601Now().size(), 24u);
}

}  // namespace
}  // namespace acs::judge
