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

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <random>

#include "acs/error.h"
#include "acs/rng.h"
#include "acs/text.h"

namespace acs::judge {

Resolved Resolve(Choice choice, bool observed_first) {
  bool picked_a = choice == Choice::kA;
  return picked_a == observed_first ? Resolved::kObserved : Resolved::kManipulated;
}

namespace {

const char* ChoiceName(Choice c) { return c == Choice::kA ? "A" : "B"; }

Choice ParseChoice(const std::string& s) {
  if (s == "A" || s == "a") return Choice::kA;
  if (s == "B" || s == "b") return Choice::kB;
  throw DataError("choice must be A or B, got '" + s + "'");
}

const char* ResolvedName(Resolved r) {
  return r == Resolved::kObserved ? "observed" : "manipulated";
}

}  // namespace

Json ToJson(const JudgmentRecord& r) {
  return {{"annotator_id", r.annotator_id},
          {"pair_id", r.pair_id},
          {"choice", ChoiceName(r.choice)},
          {"observed_first", r.observed_first},
          {"resolved_choice", ResolvedName(r.resolved)},
          {"batch_index", r.batch_index},
          {"timestamp", r.timestamp}};
}

JudgmentRecord JudgmentFromJson(const Json& j) {
  JudgmentRecord r;
  try {
    r.annotator_id = j.at("annotator_id").get<std::string>();
    r.pair_id = j.at("pair_id").get<std::string>();
    r.choice = ParseChoice(j.at("choice").get<std::string>());
    r.observed_first = j.at("observed_first").get<bool>();
    r.batch_index = j.value("batch_index", 0);
    r.timestamp = j.value("timestamp", "");
  } catch (const Json::exception& e) {
    throw DataError(std::string("judgment record: ") + e.what());
  }
  r.resolved = Resolve(r.choice, r.observed_first);
  if (j.contains("resolved_choice") &&
      j["resolved_choice"] != ResolvedName(r.resolved)) {
    throw DataError("judgment " + r.annotator_id + "/" + r.pair_id +
                    ": resolved_choice inconsistent with presentation");
  }
  return r;
}

bool ObservedFirst(std::uint64_t seed, const std::string& pair_id,
                   const std::string& annotator_id) {
  std::uint64_t key = StreamKey(seed, "present\x1f" + pair_id + "\x1f" + annotator_id);
  return (SplitMix64(key) & 1) == 0;
}

std::vector<const Batch*> Plan::BatchesOf(const std::string& annotator) const {
  std::vector<const Batch*> out;
  for (const auto& b : batches) {
    if (b.annotator_id == annotator) out.push_back(&b);
  }
  return out;
}

namespace {

std::string NewToken() {
  std::random_device rd;
  char buf[33];
  std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", rd(), rd(), rd(), rd());
  return buf;
}

}  // namespace

Plan PlanAssignments(std::span<const std::string> pair_ids,
                     std::span<const std::string> pool, int k, std::uint64_t seed,
                     std::size_t batch_size) {
  if (k < 1) throw UsageError("k must be at least 1");
  if (batch_size < 1) throw UsageError("batch size must be at least 1");
  if (pool.size() < static_cast<std::size_t>(k)) {
    throw UsageError("annotator pool of " + std::to_string(pool.size()) +
                     " is smaller than k = " + std::to_string(k));
  }
  std::set<std::string> unique_pool(pool.begin(), pool.end());
  if (unique_pool.size() != pool.size()) throw UsageError("duplicate annotator in pool");
  std::set<std::string> seen;
  for (const auto& id : pair_ids) {
    if (!seen.insert(id).second) throw DataError("duplicate pair id " + id);
  }

  Plan plan;
  plan.seed = seed;
  plan.k = k;
  plan.batch_size = batch_size;
  plan.pool.assign(pool.begin(), pool.end());
  std::map<std::string, std::size_t> load;
  std::map<std::string, std::vector<std::string>> owned;
  for (const auto& a : pool) load[a] = 0;

  for (const auto& pid : pair_ids) {
    CounterRng rng(StreamKey(seed, "assign\x1f" + pid));
    std::vector<std::pair<std::size_t, std::uint64_t>> keys;  // (load, tiebreak)
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      order[i] = i;
      keys.emplace_back(load[pool[i]], rng.Next());
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return keys[x] < keys[y]; });
    Assignment a;
    a.pair_id = pid;
    for (int i = 0; i < k; ++i) a.annotators.push_back(pool[order[i]]);
    std::sort(a.annotators.begin(), a.annotators.end());
    for (const auto& ann : a.annotators) {
      ++load[ann];
      owned[ann].push_back(pid);
    }
    plan.assignments.push_back(std::move(a));
  }

  for (const auto& ann : pool) {
    auto& mine = owned[ann];
    CounterRng rng(StreamKey(seed, "order\x1f" + ann));
    rng.Shuffle(mine);
    for (std::size_t at = 0, index = 0; at < mine.size(); at += batch_size, ++index) {
      Batch b;
      b.annotator_id = ann;
      b.index = static_cast<int>(index);
      auto end = std::min(mine.size(), at + batch_size);
      b.pair_ids.assign(mine.begin() + static_cast<long>(at),
                        mine.begin() + static_cast<long>(end));
      plan.batches.push_back(std::move(b));
    }
    plan.tokens[ann] = NewToken();
  }
  return plan;
}

Json ToJson(const Plan& plan) {
  Json assignments = Json::array();
  for (const auto& a : plan.assignments) {
    Json presentation = Json::object();
    for (const auto& ann : a.annotators) {
      presentation[ann] = ObservedFirst(plan.seed, a.pair_id, ann) ? "observed_first"
                                                                   : "manipulated_first";
    }
    assignments.push_back({{"pair_id", a.pair_id},
                           {"annotators", a.annotators},
                           {"presentation", presentation}});
  }
  Json batches = Json::array();
  for (const auto& b : plan.batches) {
    batches.push_back(
        {{"annotator_id", b.annotator_id}, {"index", b.index}, {"pair_ids", b.pair_ids}});
  }
  return {{"version", 1},
          {"seed", plan.seed},
          {"k", plan.k},
          {"batch_size", plan.batch_size},
          {"pool", plan.pool},
          {"tokens", plan.tokens},
          {"assignments", assignments},
          {"batches", batches}};
}

Plan PlanFromJson(const Json& j) {
  Plan plan;
  try {
    if (j.value("version", 1) != 1) throw DataError("unsupported plan version");
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.k = j.at("k").get<int>();
    plan.batch_size = j.at("batch_size").get<std::size_t>();
    plan.pool = j.at("pool").get<std::vector<std::string>>();
    plan.tokens = j.at("tokens").get<std::map<std::string, std::string>>();
    for (const auto& a : j.at("assignments")) {
      plan.assignments.push_back(
          {a.at("pair_id").get<std::string>(),
           a.at("annotators").get<std::vector<std::string>>()});
    }
    for (const auto& b : j.at("batches")) {
      plan.batches.push_back({b.at("annotator_id").get<std::string>(),
                              b.at("index").get<int>(),
                              b.at("pair_ids").get<std::vector<std::string>>()});
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("plan: ") + e.what());
  }
  return plan;
}

std::map<std::string, PairView> ViewsOf(std::span<const pairgen::MinimalPair> pairs) {
  std::map<std::string, PairView> out;
  for (const auto& p : pairs) {
    PairView v{p.observed.record.text, p.manipulated.record.text, p.observed_span,
               p.manipulated_span};
    if (!out.emplace(p.pair_id, std::move(v)).second) {
      throw DataError("duplicate pair id " + p.pair_id);
    }
  }
  return out;
}

Json ToJson(const ItemPayload& p) {
  if (p.complete) {
    return {{"status", "complete"}, {"judged", p.judged}, {"total", p.total}};
  }
  return {{"status", "item"},
          {"pair_id", p.pair_id},
          {"a", {{"text", p.text_a}, {"span", {p.span_a.begin, p.span_a.end}}}},
          {"b", {{"text", p.text_b}, {"span", {p.span_b.begin, p.span_b.end}}}},
          {"batch_index", p.batch_index},
          {"judged", p.judged},
          {"total", p.total}};
}

Json ToJson(const Progress& p) {
  Json batches = Json::array();
  for (const auto& b : p.batches) {
    batches.push_back({{"index", b.index}, {"judged", b.judged}, {"size", b.size}});
  }
  return {{"annotator_id", p.annotator_id},
          {"judged", p.judged},
          {"total", p.total},
          {"batches", batches}};
}

std::string Iso8601Now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

namespace {

// Parses log content; returns the records and the byte length of the intact
// prefix. Only the final line may be damaged.
std::vector<JudgmentRecord> ParseLog(const std::string& content,
                                     const std::string& origin,
                                     std::uint64_t base_offset, std::uint64_t* good) {
  std::vector<JudgmentRecord> out;
  std::size_t at = 0;
  while (at < content.size()) {
    std::size_t nl = content.find('\n', at);
    bool last = nl == std::string::npos;
    std::string line = content.substr(at, last ? std::string::npos : nl - at);
    JudgmentRecord r;
    bool ok = !last;
    if (ok) {
      try {
        r = JudgmentFromJson(Json::parse(line));
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      bool trailing = last || nl + 1 == content.size();
      if (!trailing) {
        throw DataError(origin + ": corrupt judgment at byte " +
                        std::to_string(base_offset + at));
      }
      break;  // torn final write
    }
    out.push_back(std::move(r));
    at = nl + 1;
  }
  *good = base_offset + at;
  return out;
}

std::string ReadFrom(const std::string& path, std::uint64_t offset) {
  std::string all = ReadFile(path);
  return offset >= all.size() ? std::string() : all.substr(offset);
}

}  // namespace

std::vector<JudgmentRecord> ReadJudgmentLog(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  std::uint64_t good = 0;
  return ParseLog(ReadFile(path), path, 0, &good);
}

JudgeService::JudgeService(Plan plan, std::map<std::string, PairView> views,
                           std::string log_path, ServiceOptions options)
    : plan_(std::move(plan)),
      views_(std::move(views)),
      log_path_(std::move(log_path)),
      options_(options) {
  for (const auto& [ann, token] : plan_.tokens) token_index_[token] = ann;
  for (const auto& ann : plan_.pool) sequence_[ann];
  for (const auto& b : plan_.batches) {
    auto& seq = sequence_[b.annotator_id];
    for (const auto& pid : b.pair_ids) {
      if (!views_.count(pid)) throw DataError("plan references unknown pair " + pid);
      slots_[{b.annotator_id, pid}] = Slot{b.annotator_id, b.index, seq.size()};
      seq.push_back(pid);
    }
  }
  Recover();
}

JudgeService::~JudgeService() {
  if (fd_ >= 0) ::close(fd_);
}

void JudgeService::Apply(State& state, const JudgmentRecord& record) const {
  auto it = slots_.find({record.annotator_id, record.pair_id});
  if (it == slots_.end()) {
    throw DataError(log_path_ + ": judgment for unassigned pair " +
                    record.annotator_id + "/" + record.pair_id);
  }
  if (record.observed_first !=
      ObservedFirst(plan_.seed, record.pair_id, record.annotator_id)) {
    throw DataError(log_path_ + ": presentation mismatch for " + record.annotator_id +
                    "/" + record.pair_id);
  }
  auto& slot = state.judged[record.annotator_id];
  auto copy = slot ? std::make_shared<std::map<std::string, JudgmentRecord>>(*slot)
                   : std::make_shared<std::map<std::string, JudgmentRecord>>();
  if (!copy->emplace(record.pair_id, record).second) {
    throw DataError(log_path_ + ": duplicate judgment " + record.annotator_id + "/" +
                    record.pair_id);
  }
  slot = std::move(copy);
  ++state.count;
}

void JudgeService::Recover() {
  auto state = std::make_shared<State>();
  std::uint64_t start = 0;
  std::uint64_t size = std::filesystem::exists(log_path_)
                           ? std::filesystem::file_size(log_path_)
                           : 0;
  std::string snap_path = log_path_ + ".snapshot";
  if (std::filesystem::exists(snap_path)) {
    try {
      Json snap = Json::parse(ReadFile(snap_path));
      std::uint64_t bytes = snap.at("log_bytes").get<std::uint64_t>();
      if (bytes <= size) {
        auto tmp = std::make_shared<State>();
        for (const auto& r : snap.at("records")) Apply(*tmp, JudgmentFromJson(r));
        state = tmp;
        start = bytes;
      }
    } catch (const std::exception&) {
      // Unreadable snapshot: fall back to a full replay.
      state = std::make_shared<State>();
      start = 0;
    }
  }
  std::uint64_t good = start;
  if (size > start) {
    for (const auto& r : ParseLog(ReadFrom(log_path_, start), log_path_, start, &good)) {
      Apply(*state, r);
    }
  }
  fd_ = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw DataError("cannot open judgment log " + log_path_ + ": " +
                    std::strerror(errno));
  }
  if (good < size) {
    if (::ftruncate(fd_, static_cast<off_t>(good)) != 0) {
      throw DataError("cannot truncate torn judgment log " + log_path_);
    }
    ::fsync(fd_);
  }
  log_bytes_ = good;
  std::atomic_store(&state_, std::shared_ptr<const State>(state));
}

void JudgeService::AppendDurably(const std::string& line) {
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw DataError("judgment log write failed: " + std::string(std::strerror(errno)));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (options_.sync && ::fsync(fd_) != 0) {
    throw DataError("judgment log fsync failed: " + std::string(std::strerror(errno)));
  }
  log_bytes_ += line.size();
}

void JudgeService::WriteSnapshot(const State& state) {
  Json records = Json::array();
  for (const auto& [ann, m] : state.judged) {
    for (const auto& [pid, r] : *m) records.push_back(ToJson(r));
  }
  Json snap = {{"log_bytes", log_bytes_}, {"records", records}};
  std::string tmp = log_path_ + ".snapshot.tmp";
  WriteFile(tmp, snap.dump() + "\n");
  int fd = ::open(tmp.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  std::filesystem::rename(tmp, log_path_ + ".snapshot");
}

std::shared_ptr<const JudgeService::State> JudgeService::Load() const {
  return std::atomic_load(&state_);
}

const std::vector<std::string>& JudgeService::SequenceOf(
    const std::string& annotator) const {
  auto it = sequence_.find(annotator);
  if (it == sequence_.end()) throw UsageError("unknown annotator " + annotator);
  return it->second;
}

std::optional<std::string> JudgeService::Authenticate(const std::string& token) const {
  auto it = token_index_.find(token);
  if (it == token_index_.end()) return std::nullopt;
  return it->second;
}

ItemPayload JudgeService::NextItem(const std::string& annotator,
                                   const std::optional<std::string>& after) const {
  const auto& seq = SequenceOf(annotator);
  auto state = Load();
  auto it = state->judged.find(annotator);
  const std::map<std::string, JudgmentRecord>* mine =
      it == state->judged.end() ? nullptr : it->second.get();
  ItemPayload p;
  p.total = seq.size();
  p.judged = mine ? mine->size() : 0;
  std::size_t start = 0;
  if (after) {
    auto s = slots_.find({annotator, *after});
    if (s != slots_.end()) start = s->second.position + 1;
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& pid = seq[(start + i) % seq.size()];
    if (mine && mine->count(pid)) continue;
    const auto& view = views_.at(pid);
    bool obs_first = ObservedFirst(plan_.seed, pid, annotator);
    p.pair_id = pid;
    p.text_a = obs_first ? view.observed : view.manipulated;
    p.text_b = obs_first ? view.manipulated : view.observed;
    p.span_a = obs_first ? view.observed_span : view.manipulated_span;
    p.span_b = obs_first ? view.manipulated_span : view.observed_span;
    p.batch_index = slots_.at({annotator, pid}).batch;
    return p;
  }
  p.complete = true;
  return p;
}

SubmitResult JudgeService::Submit(const std::string& annotator,
                                  const std::string& pair_id, Choice choice) {
  SubmitResult result;
  if (!views_.count(pair_id)) {
    result.status = SubmitStatus::kUnknownPair;
    return result;
  }
  auto slot = slots_.find({annotator, pair_id});
  if (slot == slots_.end()) {
    result.status = SubmitStatus::kForeignPair;
    return result;
  }
  std::lock_guard<std::mutex> lock(writer_);
  auto current = Load();
  result.total = SequenceOf(annotator).size();
  auto mine = current->judged.find(annotator);
  if (mine != current->judged.end()) {
    auto prior = mine->second->find(pair_id);
    if (prior != mine->second->end()) {
      result.status = SubmitStatus::kDuplicate;
      result.record = prior->second;
      result.judged = mine->second->size();
      return result;
    }
  }
  JudgmentRecord r;
  r.annotator_id = annotator;
  r.pair_id = pair_id;
  r.choice = choice;
  r.observed_first = ObservedFirst(plan_.seed, pair_id, annotator);
  r.resolved = Resolve(choice, r.observed_first);
  r.batch_index = slot->second.batch;
  r.timestamp = Iso8601Now();

  AppendDurably(ToJson(r).dump() + "\n");
  auto next = std::make_shared<State>(*current);
  Apply(*next, r);
  std::atomic_store(&state_, std::shared_ptr<const State>(next));
  if (++since_snapshot_ >= options_.snapshot_every) {
    since_snapshot_ = 0;
    WriteSnapshot(*next);
  }
  result.record = r;
  result.judged = next->judged.at(annotator)->size();
  return result;
}

Progress JudgeService::GetProgress(const std::string& annotator) const {
  const auto& seq = SequenceOf(annotator);
  auto state = Load();
  auto it = state->judged.find(annotator);
  Progress p;
  p.annotator_id = annotator;
  p.total = seq.size();
  for (const Batch* b : plan_.BatchesOf(annotator)) {
    BatchProgress bp;
    bp.index = b->index;
    bp.size = b->pair_ids.size();
    if (it != state->judged.end()) {
      for (const auto& pid : b->pair_ids) bp.judged += it->second->count(pid);
    }
    p.judged += bp.judged;
    p.batches.push_back(bp);
  }
  return p;
}

std::vector<JudgmentRecord> JudgeService::Export(const ExportFilter& filter) const {
  auto state = Load();
  std::vector<JudgmentRecord> out;
  for (const auto& [ann, seq] : sequence_) {
    if (filter.annotator_id && *filter.annotator_id != ann) continue;
    auto it = state->judged.find(ann);
    if (it == state->judged.end()) continue;
    const auto& mine = *it->second;
    std::set<int> complete;
    if (filter.complete_batches_only) {
      for (const Batch* b : plan_.BatchesOf(ann)) {
        bool done = std::all_of(b->pair_ids.begin(), b->pair_ids.end(),
                                [&](const std::string& pid) { return mine.count(pid) > 0; });
        if (done) complete.insert(b->index);
      }
    }
    for (const auto& pid : seq) {
      auto r = mine.find(pid);
      if (r == mine.end()) continue;
      if (filter.complete_batches_only && !complete.count(r->second.batch_index)) continue;
      out.push_back(r->second);
    }
  }
  return out;
}

std::size_t JudgeService::RecordCount() const { return Load()->count; }

}  // namespace acs::judge
