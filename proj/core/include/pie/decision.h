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
#ifndef PIE_DECISION_H_
#define PIE_DECISION_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pie/types.h"

namespace pie {

enum class Verdict { kAgreeSuccess, kAgreeFailure, kFalsePositive, kFalseNegative };

absl::string_view VerdictName(Verdict v);

// Success means value > threshold; a value equal to the threshold fails.
Verdict Classify(double actual, double predicted, double threshold);

struct OutcomePair {
  double actual = 0.0;
  double predicted = 0.0;
};

struct DisagreementRates {
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  double disagreement_rate = 0.0;
};

// Means of the false-positive and false-negative indicators over `pairs`.
absl::StatusOr<DisagreementRates> RatesAt(std::span<const OutcomePair> pairs,
                                          double threshold);

struct DisagreementCurve {
  FunnelLevel funnel = FunnelLevel::kLower;
  std::vector<double> thresholds;
  std::vector<DisagreementRates> rates;  // parallel to thresholds
  size_t n = 0;
};

// Grid must be nonempty and strictly increasing.
absl::StatusOr<DisagreementCurve> ComputeDisagreementCurve(
    std::span<const OutcomePair> pairs, FunnelLevel funnel,
    std::span<const double> grid);

// Smallest value whose cumulative normalized weight reaches q, q in [0, 1].
absl::StatusOr<double> WeightedPercentile(std::span<const double> values,
                                          std::span<const double> weights, double q);

inline constexpr int kDefaultGridPoints = 101;

// `points` evenly spaced thresholds from the weighted 1st to the weighted
// 99th percentile of the actuals; a single point if those coincide.
absl::StatusOr<std::vector<double>> DefaultThresholdGrid(
    std::span<const double> actual, std::span<const double> weights,
    int points = kDefaultGridPoints);

}  // namespace pie

#endif  // PIE_DECISION_H_
