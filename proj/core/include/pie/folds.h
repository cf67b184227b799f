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
#ifndef PIE_FOLDS_H_
#define PIE_FOLDS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace pie {

// Assigns each item a fold in [0, k). Items are shuffled within each stratum
// and dealt round-robin, continuing the deal across strata so fold sizes
// differ by at most one. Deterministic in (strata, k, seed).
std::vector<int> StratifiedFolds(std::span<const int> strata, int k, uint64_t seed);

}  // namespace pie

#endif  // PIE_FOLDS_H_
