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
#include "pie/estimators.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "pie/summary.h"

namespace pie {
namespace {

double LogBinomialPmf(int64_t k, int64_t n, double log_p, double log_q) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0) +
         static_cast<double>(k) * log_p + static_cast<double>(n - k) * log_q;
}

}  // namespace

ArmCounts CountArms(const EventLog& log) {
  ArmCounts counts;
  for (size_t i = 0; i < log.size(); ++i) {
    const UserEvents u = log.user(i);
    const int64_t y = u.converted() ? 1 : 0;
    if (u.assigned_test) {
      ++counts.n_test;
      counts.test_converters += y;
      if (u.exposed) {
        ++counts.n_exposed;
        counts.exposed_converters += y;
      }
    } else {
      ++counts.n_control;
      counts.control_converters += y;
    }
  }
  return counts;
}

absl::StatusOr<AttEstimate> EstimateAtt(const ArmCounts& c) {
  if (c.n_test < 2 || c.n_control < 2) {
    return absl::FailedPreconditionError(
        "ATT needs at least two users in each of the test and control arms");
  }
  if (c.n_exposed == 0) {
    return absl::FailedPreconditionError("exposure rate is zero");
  }
  const auto nt = static_cast<double>(c.n_test);
  const auto nc = static_cast<double>(c.n_control);
  const double mean_test = static_cast<double>(c.test_converters) / nt;
  const double mean_control = static_cast<double>(c.control_converters) / nc;
  const double rate = static_cast<double>(c.n_exposed) / nt;

  AttEstimate est;
  est.n_test = c.n_test;
  est.n_control = c.n_control;
  est.n_exposed = c.n_exposed;
  est.exposure_rate = rate;
  est.tau = (mean_test - mean_control) / rate;

  // Unbiased within-arm moments of binary y (and w in the test arm).
  const double var_y_test = nt * mean_test * (1.0 - mean_test) / (nt - 1.0);
  const double var_y_control = nc * mean_control * (1.0 - mean_control) / (nc - 1.0);
  const double var_w = nt * rate * (1.0 - rate) / (nt - 1.0);
  const double cov_yw =
      (static_cast<double>(c.exposed_converters) - nt * mean_test * rate) /
      (nt - 1.0);
  const double tau = est.tau;
  const double variance =
      (var_y_test / nt + var_y_control / nc - 2.0 * tau * cov_yw / nt +
       tau * tau * var_w / nt) /
      (rate * rate);
  est.se = std::sqrt(std::max(0.0, variance));
  return est;
}

absl::StatusOr<AttEstimate> EstimateAtt(const EventLog& log) {
  return EstimateAtt(CountArms(log));
}

double IncrementalConversions(const AttEstimate& att) {
  return att.tau * static_cast<double>(att.n_exposed);
}

absl::StatusOr<double> Icpd(double incremental_conversions, double cost) {
  if (!(cost > 0.0)) return absl::InvalidArgumentError("cost must be positive");
  return incremental_conversions / cost;
}

absl::StatusOr<PerDollar> Icpd(double incremental_conversions,
                               double incremental_conversions_se, double cost) {
  if (!(cost > 0.0)) return absl::InvalidArgumentError("cost must be positive");
  return PerDollar{incremental_conversions / cost,
                   incremental_conversions_se / cost};
}

std::optional<double> Cpic(double icpd) {
  if (!(icpd > 0.0)) return std::nullopt;
  return 1.0 / icpd;
}

int64_t LastClickConversions(const EventLog& log, AttributionWindow w) {
  const Seconds window = WindowSeconds(w);
  int64_t count = 0;
  for (size_t i = 0; i < log.size(); ++i) {
    const std::optional<Seconds> delay = LastClickDelay(log.user(i));
    if (delay && *delay <= window) ++count;
  }
  return count;
}

absl::StatusOr<double> Lcpd(const EventLog& log, AttributionWindow w, double cost) {
  if (!(cost > 0.0)) return absl::InvalidArgumentError("cost must be positive");
  return static_cast<double>(LastClickConversions(log, w)) / cost;
}

absl::StatusOr<double> RandomizationCheck(int64_t n_test, int64_t n_control,
                                          double planned_test_share) {
  if (!(planned_test_share > 0.0 && planned_test_share < 1.0)) {
    return absl::InvalidArgumentError("planned share must lie in (0, 1)");
  }
  if (n_test < 0 || n_control < 0 || n_test + n_control < 1) {
    return absl::InvalidArgumentError("need at least one assigned user");
  }
  const int64_t n = n_test + n_control;
  const double log_p = std::log(planned_test_share);
  const double log_q = std::log1p(-planned_test_share);
  const double observed = LogBinomialPmf(n_test, n, log_p, log_q);
  const double cutoff = observed + std::log1p(1e-7);
  // Accumulate relative to the observed outcome's probability.
  double relative_sum = 0.0;
  for (int64_t k = 0; k <= n; ++k) {
    const double lp = LogBinomialPmf(k, n, log_p, log_q);
    if (lp <= cutoff) relative_sum += std::exp(lp - observed);
  }
  return std::min(1.0, relative_sum * std::exp(observed));
}

absl::StatusOr<RctSummary> SummarizeRct(const EventLogFile& file) {
  auto att = EstimateAtt(file.log);
  if (!att.ok()) {
    return absl::Status(att.status().code(),
                        absl::StrCat(file.rct_id, ": ", att.status().message()));
  }
  const double ic = IncrementalConversions(*att);
  auto icpd = Icpd(ic, att->se * static_cast<double>(att->n_exposed), file.cost);
  if (!icpd.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(file.rct_id, ": ", icpd.status().message()));
  }
  RctSummary s;
  s.rct_id = file.rct_id;
  s.experiment_id = file.experiment_id;
  s.characteristics = file.characteristics;
  s.cost = file.cost;
  s.n_exposed = att->n_exposed;
  s.att = att->tau;
  s.att_se = att->se;
  s.icpd = icpd->value;
  s.icpd_se = icpd->se;
  for (AttributionWindow w : kAllWindows) {
    s.lcpd[WindowIndex(w)] =
        static_cast<double>(LastClickConversions(file.log, w)) / file.cost;
  }
  auto p = RandomizationCheck(att->n_test, att->n_control, file.planned_test_share);
  if (!p.ok()) return p.status();
  s.randomization_p = *p;
  return ValidateSummary(std::move(s));
}

}  // namespace pie
