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

// Forced-choice human judgment collection: assignment planning, randomized
// presentation, an append-only judgment log and export for the statistics.

#ifndef ACS_JUDGE_H_
#define ACS_JUDGE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "acs/judgment.h"
#include "acs/jsonl.h"
#include "acs/pairgen.h"

namespace acs::judge {

inline constexpr std::size_t kDefaultBatchSize = 67;

// True when the observed sentence is shown as A. A pure function of its
// arguments, so restarts never change the presentation.
bool ObservedFirst(std::uint64_t seed, const std::string& pair_id,
                   const std::string& annotator_id);

struct Assignment {
  std::string pair_id;
  std::vector<std::string> annotators;
};

struct Batch {
  std::string annotator_id;
  int index = 0;
  std::vector<std::string> pair_ids;
};

struct Plan {
  std::uint64_t seed = 0;
  int k = 1;
  std::size_t batch_size = kDefaultBatchSize;
  std::vector<std::string> pool;
  std::map<std::string, std::string> tokens;  // annotator -> opaque token
  std::vector<Assignment> assignments;
  std::vector<Batch> batches;  // per annotator, in order

  std::vector<const Batch*> BatchesOf(const std::string& annotator) const;
};

// Each pair goes to k distinct annotators chosen least-loaded first, with
// seeded tie-breaks, so loads differ by at most one. Throws UsageError if the
// pool is smaller than k or contains duplicates.
Plan PlanAssignments(std::span<const std::string> pair_ids,
                     std::span<const std::string> pool, int k, std::uint64_t seed,
                     std::size_t batch_size = kDefaultBatchSize);

Json ToJson(const Plan& plan);
Plan PlanFromJson(const Json& j);

// What an annotator needs to judge a pair. The service never sends which
// side is observed.
struct PairView {
  std::string observed;
  std::string manipulated;
  pairgen::CharSpan observed_span;
  pairgen::CharSpan manipulated_span;
};

std::map<std::string, PairView> ViewsOf(std::span<const pairgen::MinimalPair> pairs);

struct ItemPayload {
  bool complete = false;
  std::string pair_id;
  std::string text_a;
  std::string text_b;
  pairgen::CharSpan span_a;
  pairgen::CharSpan span_b;
  int batch_index = 0;
  std::size_t judged = 0;
  std::size_t total = 0;
};

Json ToJson(const ItemPayload& p);

enum class SubmitStatus { kAccepted, kDuplicate, kUnknownPair, kForeignPair };

struct SubmitResult {
  SubmitStatus status = SubmitStatus::kAccepted;
  JudgmentRecord record;  // new record, or the original for a duplicate
  std::size_t judged = 0;
  std::size_t total = 0;
};

struct BatchProgress {
  int index = 0;
  std::size_t judged = 0;
  std::size_t size = 0;
};

struct Progress {
  std::string annotator_id;
  std::size_t judged = 0;
  std::size_t total = 0;
  std::vector<BatchProgress> batches;
};

Json ToJson(const Progress& p);

struct ExportFilter {
  std::optional<std::string> annotator_id;
  // Drop judgments from batches the annotator has not finished.
  bool complete_batches_only = false;
};

struct ServiceOptions {
  std::size_t snapshot_every = 64;  // records between snapshot rewrites
  bool sync = true;                 // fsync the log before acknowledging
};

// Appends are serialized through one writer; readers work on an immutable
// state snapshot swapped in after each durable append.
class JudgeService {
 public:
  // Replays `log_path` (and its snapshot) on construction. A torn final line
  // left by a crash is truncated; any other corruption is a DataError.
  JudgeService(Plan plan, std::map<std::string, PairView> views,
               std::string log_path, ServiceOptions options = {});
  ~JudgeService();

  JudgeService(const JudgeService&) = delete;
  JudgeService& operator=(const JudgeService&) = delete;

  const Plan& plan() const { return plan_; }

  // Annotator for a token, or nullopt.
  std::optional<std::string> Authenticate(const std::string& token) const;

  // First unjudged pair in batch order, or the first one after `after` when
  // the annotator skips. Repeated calls return the same item.
  ItemPayload NextItem(const std::string& annotator,
                       const std::optional<std::string>& after = std::nullopt) const;

  SubmitResult Submit(const std::string& annotator, const std::string& pair_id,
                      Choice choice);

  Progress GetProgress(const std::string& annotator) const;

  // Sorted by (annotator, batch, position in batch).
  std::vector<JudgmentRecord> Export(const ExportFilter& filter = {}) const;

  std::size_t RecordCount() const;

 private:
  struct Slot {
    std::string annotator;
    int batch = 0;
    std::size_t position = 0;  // within the annotator's full sequence
  };
  struct State {
    // annotator -> pair_id -> record
    std::map<std::string, std::shared_ptr<const std::map<std::string, JudgmentRecord>>>
        judged;
    std::size_t count = 0;
  };

  void Recover();
  void AppendDurably(const std::string& line);
  void WriteSnapshot(const State& state);
  void Apply(State& state, const JudgmentRecord& record) const;
  std::shared_ptr<const State> Load() const;
  const std::vector<std::string>& SequenceOf(const std::string& annotator) const;

  Plan plan_;
  std::map<std::string, PairView> views_;
  std::string log_path_;
  ServiceOptions options_;
  std::map<std::string, std::string> token_index_;
  std::map<std::string, std::vector<std::string>> sequence_;  // batch order
  std::map<std::pair<std::string, std::string>, Slot> slots_;
  std::shared_ptr<const State> state_;
  std::mutex writer_;
  int fd_ = -1;
  std::uint64_t log_bytes_ = 0;
  std::size_t since_snapshot_ = 0;
};

// Reads the judgment log offline, tolerating a torn final line.
std::vector<JudgmentRecord> ReadJudgmentLog(const std::string& path);

std::string Iso8601Now();

}  // namespace acs::judge

#endif  // ACS_JUDGE_H_
