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
#include "pie/metrics.h"

#include <cmath>

#include "absl/status/status.h"

namespace pie {
namespace {

absl::StatusOr<double> WeightTotal(std::span<const double> weights, size_t n) {
  if (weights.size() != n) return absl::InvalidArgumentError("length mismatch");
  if (n == 0) return absl::InvalidArgumentError("metrics need at least one record");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError("negative or non-finite weight");
    }
    total += w;
  }
  if (!(total > 0.0)) return absl::InvalidArgumentError("weights sum to zero");
  return total;
}

}  // namespace

absl::StatusOr<double> Wrmse(std::span<const double> actual,
                             std::span<const double> predicted,
                             std::span<const double> weights, bool* renormalized) {
  if (actual.size() != predicted.size()) {
    return absl::InvalidArgumentError("length mismatch");
  }
  auto total = WeightTotal(weights, actual.size());
  if (!total.ok()) return total.status();
  const bool rescale = std::abs(*total - 1.0) > kWeightSumTolerance;
  if (renormalized != nullptr) *renormalized = rescale;
  const double norm = rescale ? *total : 1.0;
  double sum = 0.0;
  for (size_t i = 0; i < actual.size(); ++i) {
    const double e = actual[i] - predicted[i];
    sum += weights[i] / norm * e * e;
  }
  return std::sqrt(sum);
}

absl::StatusOr<double> WeightedMean(std::span<const double> values,
                                    std::span<const double> weights) {
  auto total = WeightTotal(weights, values.size());
  if (!total.ok()) return total.status();
  double sum = 0.0;
  for (size_t i = 0; i < values.size(); ++i) sum += weights[i] * values[i];
  return sum / *total;
}

absl::StatusOr<double> PercentWrmse(double wrmse, std::span<const double> actual,
                                    std::span<const double> weights) {
  if (!(wrmse >= 0.0)) return absl::InvalidArgumentError("wrmse must be nonnegative");
  auto mean = WeightedMean(actual, weights);
  if (!mean.ok()) return mean.status();
  if (*mean == 0.0) {
    return absl::InvalidArgumentError("weighted mean of actuals is zero");
  }
  return wrmse / std::abs(*mean);
}

absl::StatusOr<double> Wmape(std::span<const double> actual,
                             std::span<const double> predicted,
                             std::span<const double> weights) {
  if (actual.size() != predicted.size()) {
    return absl::InvalidArgumentError("length mismatch");
  }
  auto total = WeightTotal(weights, actual.size());
  if (!total.ok()) return total.status();
  double sum = 0.0;
  for (size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) return absl::InvalidArgumentError("actual value is zero");
    sum += weights[i] * std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
  }
  return sum / *total;
}

}  // namespace pie
