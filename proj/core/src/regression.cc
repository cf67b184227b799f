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
#include "pie/regression.h"

#include <cmath>

#include <Eigen/Dense>

#include "absl/status/status.h"

namespace pie {
namespace {

absl::Status CheckWeights(std::span<const double> w, size_t n) {
  if (w.size() != n) return absl::InvalidArgumentError("weights differ in length");
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError("weights must be finite and nonnegative");
    }
    total += v;
  }
  if (!(total > 0.0)) return absl::InvalidArgumentError("total weight is zero");
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<CalibrationFit> FitCalibration(std::span<const double> x,
                                              std::span<const double> y,
                                              std::span<const double> w) {
  if (x.size() != y.size()) return absl::InvalidArgumentError("x and y differ in length");
  if (auto s = CheckWeights(w, x.size()); !s.ok()) return s;
  double sxy = 0.0, sxx = 0.0;
  size_t usable = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += w[i] * x[i] * y[i];
    sxx += w[i] * x[i] * x[i];
    if (x[i] != 0.0 && w[i] > 0.0) ++usable;
  }
  if (!(sxx > 0.0)) return absl::InvalidArgumentError("all lcpd values are zero");
  if (usable < 2) {
    return absl::InvalidArgumentError("calibration needs two records with nonzero lcpd");
  }
  CalibrationFit fit;
  fit.theta = sxy / sxx;
  fit.n = usable;
  double meat = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.theta * x[i];
    meat += w[i] * w[i] * x[i] * x[i] * e * e;
  }
  const double n = static_cast<double>(usable);
  fit.se = std::sqrt(meat * n / (n - 1.0)) / sxx;
  return fit;
}

absl::StatusOr<std::vector<double>> FitWeightedLeastSquares(
    std::span<const double> design, size_t p, std::span<const double> y,
    std::span<const double> w, bool intercept) {
  const size_t n = y.size();
  if (design.size() != n * p) {
    return absl::InvalidArgumentError("design matrix has the wrong size");
  }
  if (auto s = CheckWeights(w, n); !s.ok()) return s;
  const size_t q = p + (intercept ? 1 : 0);
  const size_t offset = intercept ? 1 : 0;

  double total = 0.0;
  for (double v : w) total += v;
  Eigen::MatrixXd x(n, q);
  Eigen::VectorXd target(n), weight(n);
  for (size_t i = 0; i < n; ++i) {
    if (intercept) x(i, 0) = 1.0;
    for (size_t j = 0; j < p; ++j) x(i, j + offset) = design[i * p + j];
    target(i) = y[i];
    weight(i) = w[i] / total;
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(q);
  for (size_t j = offset; j < q; ++j) {
    const double rms = std::sqrt(weight.dot(x.col(j).cwiseAbs2()));
    if (rms > 0.0) scale(j) = rms;
  }
  x = x * scale.cwiseInverse().asDiagonal();

  const Eigen::MatrixXd xtw = x.transpose() * weight.asDiagonal();
  const Eigen::MatrixXd a = xtw * x;
  const Eigen::VectorXd b = xtw * target;
  Eigen::MatrixXd penalized = a;
  for (size_t j = offset; j < q; ++j) penalized(j, j) += kRidgeJitter;
  const Eigen::LDLT<Eigen::MatrixXd> solver(penalized);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("normal equations could not be factorized");
  }
  Eigen::VectorXd beta = solver.solve(b);
  for (int step = 0; step < 3; ++step) beta += solver.solve(b - a * beta);
  if (!beta.allFinite()) return absl::InternalError("least squares diverged");

  std::vector<double> out(q);
  for (size_t j = 0; j < q; ++j) out[j] = beta(j) / scale(j);
  return out;
}

}  // namespace pie
