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
#ifndef PIE_METRICS_H_
#define PIE_METRICS_H_

#include <span>

#include "absl/status/statusor.h"

namespace pie {

inline constexpr double kWeightSumTolerance = 1e-9;

// sqrt(sum w (y - yhat)^2). Weights that do not sum to one (within
// kWeightSumTolerance) are renormalized and *renormalized is set.
absl::StatusOr<double> Wrmse(std::span<const double> actual,
                             std::span<const double> predicted,
                             std::span<const double> weights,
                             bool* renormalized = nullptr);

// Weighted mean of the actuals; weights are renormalized.
absl::StatusOr<double> WeightedMean(std::span<const double> values,
                                    std::span<const double> weights);

// wrmse / |weighted mean of actuals|.
absl::StatusOr<double> PercentWrmse(double wrmse, std::span<const double> actual,
                                    std::span<const double> weights);

// sum w |y - yhat| / |y| with renormalized weights; every actual must be
// nonzero.
absl::StatusOr<double> Wmape(std::span<const double> actual,
                             std::span<const double> predicted,
                             std::span<const double> weights);

}  // namespace pie

#endif  // PIE_METRICS_H_
