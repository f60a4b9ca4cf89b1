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

// One annotator's forced choice on one minimal pair. Shared by the judge
// service (which produces these) and the statistics (which consume them).

#ifndef ACS_JUDGMENT_H_
#define ACS_JUDGMENT_H_

#include <string>

#include "acs/jsonl.h"

namespace acs::judge {

enum class Choice { kA, kB };
enum class Resolved { kObserved, kManipulated };

struct JudgmentRecord {
  std::string annotator_id;
  std::string pair_id;
  Choice choice = Choice::kA;
  bool observed_first = true;  // observed sentence was shown as A
  Resolved resolved = Resolved::kObserved;
  int batch_index = 0;
  std::string timestamp;  // ISO-8601 UTC
};

Resolved Resolve(Choice choice, bool observed_first);

Json ToJson(const JudgmentRecord& r);
// Throws DataError if resolved_choice disagrees with (choice, presentation).
JudgmentRecord JudgmentFromJson(const Json& j);

}  // namespace acs::judge

#endif  // ACS_JUDGMENT_H_
