/*
 * Copyright 2026 The PIE Lab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "pie/folds.h"

#include <algorithm>
#include <map>

#include "pie/random.h"

namespace pie {

std::vector<int> StratifiedFolds(std::span<const int> strata, int k, uint64_t seed) {
  std::vector<int> fold(strata.size(), 0);
  if (k <= 1) return fold;
  std::map<int, std::vector<size_t>> members;
  for (size_t i = 0; i < strata.size(); ++i) members[strata[i]].push_back(i);
  Rng rng(seed);
  int next = 0;
  for (auto& [stratum, items] : members) {
    // Fisher-Yates with our own draws; std::shuffle is implementation-defined.
    for (size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<size_t>(Uniform01(rng) * static_cast<double>(i));
      std::swap(items[i - 1], items[std::min(j, i - 1)]);
    }
    for (size_t item : items) {
      fold[item] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

}  // namespace pie
