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
#include "pie/decision.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"

namespace pie {

absl::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kAgreeSuccess:
      return "agree_success";
    case Verdict::kAgreeFailure:
      return "agree_failure";
    case Verdict::kFalsePositive:
      return "false_positive";
    case Verdict::kFalseNegative:
      return "false_negative";
  }
  return "agree_failure";
}

Verdict Classify(double actual, double predicted, double threshold) {
  const bool actual_success = actual > threshold;
  const bool predicted_success = predicted > threshold;
  if (actual_success == predicted_success) {
    return actual_success ? Verdict::kAgreeSuccess : Verdict::kAgreeFailure;
  }
  return predicted_success ? Verdict::kFalsePositive : Verdict::kFalseNegative;
}

absl::StatusOr<DisagreementRates> RatesAt(std::span<const OutcomePair> pairs,
                                          double threshold) {
  if (pairs.empty()) return absl::InvalidArgumentError("no outcome pairs");
  size_t fp = 0, fn = 0;
  for (const OutcomePair& p : pairs) {
    const Verdict v = Classify(p.actual, p.predicted, threshold);
    fp += v == Verdict::kFalsePositive;
    fn += v == Verdict::kFalseNegative;
  }
  const auto n = static_cast<double>(pairs.size());
  DisagreementRates r;
  r.fp_rate = static_cast<double>(fp) / n;
  r.fn_rate = static_cast<double>(fn) / n;
  r.disagreement_rate = static_cast<double>(fp + fn) / n;
  return r;
}

absl::StatusOr<DisagreementCurve> ComputeDisagreementCurve(
    std::span<const OutcomePair> pairs, FunnelLevel funnel,
    std::span<const double> grid) {
  if (pairs.empty()) return absl::InvalidArgumentError("no outcome pairs");
  if (grid.empty()) return absl::InvalidArgumentError("empty threshold grid");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      return absl::InvalidArgumentError("threshold grid must be strictly increasing");
    }
  }
  DisagreementCurve curve;
  curve.funnel = funnel;
  curve.n = pairs.size();
  curve.thresholds.assign(grid.begin(), grid.end());
  for (double t : grid) curve.rates.push_back(*RatesAt(pairs, t));
  return curve;
}

absl::StatusOr<double> WeightedPercentile(std::span<const double> values,
                                          std::span<const double> weights, double q) {
  if (values.empty() || values.size() != weights.size()) {
    return absl::InvalidArgumentError("values and weights must be nonempty and equal length");
  }
  if (!(q >= 0.0 && q <= 1.0)) return absl::InvalidArgumentError("q must lie in [0, 1]");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError("weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) return absl::InvalidArgumentError("weights sum to zero");
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  double cumulative = 0.0;
  for (size_t i : order) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    if (cumulative / total >= q) return values[i];
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (weights[*it] > 0.0) return values[*it];
  }
  return values[order.back()];
}

absl::StatusOr<std::vector<double>> DefaultThresholdGrid(
    std::span<const double> actual, std::span<const double> weights, int points) {
  if (points < 2) return absl::InvalidArgumentError("grid needs at least two points");
  auto lo = WeightedPercentile(actual, weights, 0.01);
  if (!lo.ok()) return lo.status();
  auto hi = WeightedPercentile(actual, weights, 0.99);
  if (!hi.ok()) return hi.status();
  if (!(*hi > *lo)) return std::vector<double>{*lo};
  std::vector<double> grid;
  grid.reserve(static_cast<size_t>(points));
  const double step = (*hi - *lo) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) grid.push_back(*lo + step * static_cast<double>(i));
  grid.back() = *hi;
  return grid;
}

}  // namespace pie
