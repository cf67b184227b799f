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
#ifndef PIE_REGRESSION_H_
#define PIE_REGRESSION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace pie {

// Weighted no-intercept fit y = theta * x.
struct CalibrationFit {
  double theta = 0.0;
  double se = 0.0;  // heteroskedasticity-robust (HC1)
  size_t n = 0;
};

// theta = sum(w x y) / sum(w x^2). Requires at least two records with
// nonzero x and positive weight.
absl::StatusOr<CalibrationFit> FitCalibration(std::span<const double> x,
                                              std::span<const double> y,
                                              std::span<const double> w);

inline constexpr double kRidgeJitter = 1e-8;

// Weighted least squares on a row-major n x p design. With `intercept` the
// first returned coefficient is the intercept. Columns are scaled to unit
// weighted RMS and a ridge of kRidgeJitter is added to the scaled normal
// equations (intercept unpenalized); a few steps of iterative refinement
// against the unpenalized system remove the ridge bias on well-determined
// directions while directions in the null space stay at zero.
absl::StatusOr<std::vector<double>> FitWeightedLeastSquares(
    std::span<const double> design, size_t p, std::span<const double> y,
    std::span<const double> w, bool intercept);

}  // namespace pie

#endif  // PIE_REGRESSION_H_
