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
#ifndef PIE_ESTIMATORS_H_
#define PIE_ESTIMATORS_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "pie/event_log.h"
#include "pie/types.h"

namespace pie {

struct AttEstimate {
  double tau = 0.0;  // conversions per exposed user
  double se = 0.0;
  int64_t n_test = 0;
  int64_t n_control = 0;
  int64_t n_exposed = 0;
  double exposure_rate = 0.0;  // n_exposed / n_test
};

// Sufficient statistics of a two-arm experiment with one-sided
// non-compliance and binary (converter) outcomes.
struct ArmCounts {
  int64_t n_test = 0;
  int64_t n_control = 0;
  int64_t n_exposed = 0;
  int64_t test_converters = 0;
  int64_t control_converters = 0;
  int64_t exposed_converters = 0;  // test users with W=1 and Y=1
};

ArmCounts CountArms(const EventLog& log);

// ATT as the Wald ratio (mean test outcome - mean control outcome) /
// exposure rate, which is the 2SLS estimate with assignment instrumenting
// exposure. The standard error is the delta-method variance of the ratio
// with heteroskedasticity-robust (unpooled) arm variances, including the
// covariance between the test-arm mean and the exposure rate.
absl::StatusOr<AttEstimate> EstimateAtt(const ArmCounts& counts);
absl::StatusOr<AttEstimate> EstimateAtt(const EventLog& log);

// IC = tau * n_exposed. Negative values are kept.
double IncrementalConversions(const AttEstimate& att);

struct PerDollar {
  double value = 0.0;
  double se = 0.0;
};

absl::StatusOr<double> Icpd(double incremental_conversions, double cost);
absl::StatusOr<PerDollar> Icpd(double incremental_conversions,
                               double incremental_conversions_se, double cost);

// Cost per incremental conversion; nullopt unless icpd > 0.
std::optional<double> Cpic(double icpd);

// Last-click conversions within `w` per dollar.
int64_t LastClickConversions(const EventLog& log, AttributionWindow w);
absl::StatusOr<double> Lcpd(const EventLog& log, AttributionWindow w, double cost);

// Exact two-sided binomial test of n_test successes out of
// n_test + n_control at `planned_test_share`. The p-value sums the
// probabilities of every outcome no more likely than the observed one (with a
// 1e-7 relative slack for floating ties), capped at 1.
absl::StatusOr<double> RandomizationCheck(int64_t n_test, int64_t n_control,
                                          double planned_test_share);

// Full per-RCT summary from a log; validated before returning.
absl::StatusOr<RctSummary> SummarizeRct(const EventLogFile& file);

}  // namespace pie

#endif  // PIE_ESTIMATORS_H_
