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
#ifndef PIE_RANDOM_H_
#define PIE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pie {

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Child seed for a named stage and index; every random stream in the library
// is derived from one root seed through this function.
inline uint64_t DeriveSeed(uint64_t root, std::initializer_list<uint64_t> path) {
  uint64_t s = SplitMix64(root);
  for (uint64_t p : path) s = SplitMix64(s ^ SplitMix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stage tags for DeriveSeed.
enum SeedStage : uint64_t {
  kStageSimulation = 1,
  kStageForest = 2,
  kStageFolds = 3,
  kStageEvaluation = 4,
};

using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace pie

#endif  // PIE_RANDOM_H_
