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
#include "pie/weighting.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace pie {

absl::StatusOr<double> DlBetweenVariance(std::span<const EffectEstimate> estimates) {
  if (estimates.size() < 2) {
    return absl::InvalidArgumentError("DerSimonian-Laird needs at least 2 estimates");
  }
  double sum_v = 0.0, sum_v2 = 0.0, sum_vy = 0.0;
  for (const EffectEstimate& e : estimates) {
    if (!(e.se > 0.0) || !std::isfinite(e.se)) {
      return absl::InvalidArgumentError(
          "DerSimonian-Laird needs positive finite standard errors");
    }
    const double v = 1.0 / (e.se * e.se);
    sum_v += v;
    sum_v2 += v * v;
    sum_vy += v * e.value;
  }
  const double mean = sum_vy / sum_v;
  double q = 0.0;
  for (const EffectEstimate& e : estimates) {
    const double d = e.value - mean;
    q += d * d / (e.se * e.se);
  }
  const double k = static_cast<double>(estimates.size());
  const double denominator = sum_v - sum_v2 / sum_v;
  if (!(denominator > 0.0)) return 0.0;
  return std::max(0.0, (q - (k - 1.0)) / denominator);
}

absl::StatusOr<WeightSet> ComputeWeights(std::span<const EffectEstimate> estimates,
                                         std::span<const std::string> rct_ids,
                                         double gamma_sq, std::string group) {
  if (estimates.empty()) return absl::InvalidArgumentError("empty weight group");
  if (estimates.size() != rct_ids.size()) {
    return absl::InvalidArgumentError("estimates and rct_ids differ in length");
  }
  if (!(gamma_sq >= 0.0) || !std::isfinite(gamma_sq)) {
    return absl::InvalidArgumentError("gamma_sq must be finite and nonnegative");
  }
  WeightSet set;
  set.group = std::move(group);
  set.gamma_sq = gamma_sq;
  set.rct_ids.assign(rct_ids.begin(), rct_ids.end());
  set.weights.reserve(estimates.size());
  double total = 0.0;
  for (const EffectEstimate& e : estimates) {
    if (!std::isfinite(e.se)) return absl::InvalidArgumentError("se must be finite");
    const double variance = e.se * e.se + gamma_sq;
    if (!(variance > 0.0)) {
      return absl::InvalidArgumentError("se^2 + gamma^2 must be positive");
    }
    set.weights.push_back(1.0 / variance);
    total += set.weights.back();
  }
  for (double& w : set.weights) w /= total;
  return set;
}

absl::string_view GammaGroupingName(GammaGrouping grouping) {
  switch (grouping) {
    case GammaGrouping::kGlobal:
      return "global";
    case GammaGrouping::kFunnel:
      return "funnel";
    case GammaGrouping::kFunnelVertical:
      return "funnel_vertical";
  }
  return "funnel";
}

absl::StatusOr<GammaGrouping> ParseGammaGrouping(absl::string_view text) {
  for (GammaGrouping g : {GammaGrouping::kGlobal, GammaGrouping::kFunnel,
                          GammaGrouping::kFunnelVertical}) {
    if (GammaGroupingName(g) == text) return g;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown gamma grouping '", text, "'"));
}

std::string GroupKey(const RctSummary& s, GammaGrouping grouping) {
  switch (grouping) {
    case GammaGrouping::kGlobal:
      return "all";
    case GammaGrouping::kFunnel:
      return std::string(FunnelName(s.characteristics.funnel));
    case GammaGrouping::kFunnelVertical:
      return absl::StrCat(FunnelName(s.characteristics.funnel), "/",
                          VerticalName(s.characteristics.vertical));
  }
  return "all";
}

absl::StatusOr<PooledWeights> ComputePooledWeights(
    std::span<const RctSummary> summaries, GammaGrouping grouping) {
  if (summaries.empty()) return absl::InvalidArgumentError("no RCTs to weight");
  PooledWeights pool;
  pool.grouping = grouping;
  std::map<std::string, std::vector<size_t>> members;
  for (size_t i = 0; i < summaries.size(); ++i) {
    members[GroupKey(summaries[i], grouping)].push_back(i);
  }
  pool.raw.assign(summaries.size(), 0.0);
  pool.pooled.assign(summaries.size(), 0.0);
  const auto n_total = static_cast<double>(summaries.size());
  for (const auto& [key, indices] : members) {
    std::vector<EffectEstimate> estimates;
    std::vector<std::string> ids;
    for (size_t i : indices) {
      estimates.push_back({summaries[i].icpd, summaries[i].icpd_se});
      ids.push_back(summaries[i].rct_id);
    }
    double gamma_sq = 0.0;
    if (estimates.size() >= 2) {
      auto g = DlBetweenVariance(estimates);
      if (!g.ok()) {
        return absl::Status(g.status().code(),
                            absl::StrCat("group ", key, ": ", g.status().message()));
      }
      gamma_sq = *g;
    }
    pool.gamma_sq[key] = gamma_sq;
    auto set = ComputeWeights(estimates, ids, gamma_sq, key);
    if (!set.ok()) return set.status();
    const double share = static_cast<double>(indices.size()) / n_total;
    for (size_t j = 0; j < indices.size(); ++j) {
      const RctSummary& s = summaries[indices[j]];
      pool.raw[indices[j]] = 1.0 / (s.icpd_se * s.icpd_se + gamma_sq);
      pool.pooled[indices[j]] = share * set->weights[j];
    }
  }
  return pool;
}

double RawWeightFor(const RctSummary& s, const PooledWeights& pool) {
  auto it = pool.gamma_sq.find(GroupKey(s, pool.grouping));
  const double gamma_sq = it == pool.gamma_sq.end() ? 0.0 : it->second;
  return 1.0 / (s.icpd_se * s.icpd_se + gamma_sq);
}

}  // namespace pie
