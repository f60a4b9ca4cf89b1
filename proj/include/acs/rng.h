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

// Counter-based random streams. A stream is identified by a 64-bit key derived
// from (seed, label); the n-th draw depends only on (key, n), so results do
// not change with processing order or worker count.

#ifndef ACS_RNG_H_
#define ACS_RNG_H_

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace acs {

std::uint64_t Fnv1a64(std::string_view bytes);
std::uint64_t SplitMix64(std::uint64_t x);

// Key for the stream named `label` under `seed`.
std::uint64_t StreamKey(std::uint64_t seed, std::string_view label);
std::uint64_t StreamKey(std::uint64_t seed, std::uint64_t index);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t Next();
  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t Below(std::uint64_t bound);
  // Uniform in [0, 1).
  double Unit();
  bool Coin() { return (Next() >> 63) != 0; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace acs

#endif  // ACS_RNG_H_
