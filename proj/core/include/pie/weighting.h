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
#ifndef PIE_WEIGHTING_H_
#define PIE_WEIGHTING_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pie/types.h"

namespace pie {

struct EffectEstimate {
  double value = 0.0;  // icpd
  double se = 0.0;     // icpd_se
};

// DerSimonian-Laird moment estimator of the between-RCT variance:
// with v_i = 1/se_i^2, m = sum(v y)/sum(v), Q = sum v (y - m)^2,
// gamma^2 = max(0, (Q - (k - 1)) / (sum v - sum v^2 / sum v)).
absl::StatusOr<double> DlBetweenVariance(std::span<const EffectEstimate> estimates);

struct WeightSet {
  std::string group;
  double gamma_sq = 0.0;
  std::vector<std::string> rct_ids;
  std::vector<double> weights;  // parallel to rct_ids, sums to 1
};

// Weights proportional to 1/(se^2 + gamma_sq), normalized within the group.
absl::StatusOr<WeightSet> ComputeWeights(std::span<const EffectEstimate> estimates,
                                         std::span<const std::string> rct_ids,
                                         double gamma_sq, std::string group);

// How RCTs are grouped when estimating gamma^2.
enum class GammaGrouping { kGlobal, kFunnel, kFunnelVertical };

absl::string_view GammaGroupingName(GammaGrouping grouping);
absl::StatusOr<GammaGrouping> ParseGammaGrouping(absl::string_view text);

std::string GroupKey(const RctSummary& s, GammaGrouping grouping);

// Weights for a pool of RCTs, as used for training and evaluation.
// Each group gets its own gamma^2 (zero for groups with fewer than two RCTs),
// weights are normalized to one within the group, and then scaled by the
// group's share of RCTs so the pooled weights also sum to one.
struct PooledWeights {
  GammaGrouping grouping = GammaGrouping::kFunnel;
  std::map<std::string, double> gamma_sq;  // by group key
  std::vector<double> raw;     // 1/(se^2 + gamma^2), parallel to input
  std::vector<double> pooled;  // normalized as described above
};

absl::StatusOr<PooledWeights> ComputePooledWeights(
    std::span<const RctSummary> summaries, GammaGrouping grouping);

// Unnormalized weight of an RCT outside the pool, using the pool's frozen
// gamma^2 for its group (zero if the group is absent).
double RawWeightFor(const RctSummary& s, const PooledWeights& pool);

}  // namespace pie

#endif  // PIE_WEIGHTING_H_
