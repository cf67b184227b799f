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
#ifndef PIE_SIMULATOR_H_
#define PIE_SIMULATOR_H_

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "pie/event_log.h"
#include "pie/schema.h"
#include "pie/types.h"

namespace pie {

// A log-normal distribution given by its median and the standard deviation of
// its logarithm. log_sd == 0 is a point mass at the median.
struct LogNormalSpec {
  double median = 1.0;
  double log_sd = 0.0;

  friend bool operator==(const LogNormalSpec&, const LogNormalSpec&) = default;
};

// Indexed by static_cast<int>(FunnelLevel).
template <typename T>
using PerFunnel = std::array<T, 3>;

// selection_bias_strength preset used by the selection-bias demonstration.
inline constexpr double kHighSelectionBias = 3.0;

// Defaults reproduce the calibration targets: 10% control, 76.3% mean
// exposure, and per-funnel median ICPD in the ratio 1 : 2.6 : 11.69
// (lower : mid : upper). The lift medians set that ratio directly because
// every other cost and characteristic draw is shared across funnels.
struct SimulationConfig {
  int64_t n_rcts = 300;
  LogNormalSpec users_per_rct = {50000.0, 0.0};
  double control_share = 0.10;
  double exposure_rate_mean = 0.763;
  // Beta concentration of the per-RCT exposure-rate target around the mean.
  double exposure_rate_concentration = 80.0;
  PerFunnel<double> funnel_mix = {783.0 / 2246.0, 633.0 / 2246.0,
                                  830.0 / 2246.0};
  PerFunnel<double> organic_rate_by_funnel = {0.06, 0.10, 0.20};
  // Beta concentration (a + b) of the per-user organic propensity.
  double organic_concentration = 4.0;
  // Per-RCT expected incremental conversions per exposed user.
  PerFunnel<LogNormalSpec> treatment_lift = {
      LogNormalSpec{0.01, 0.45}, LogNormalSpec{0.026, 0.45},
      LogNormalSpec{0.1169, 0.45}};
  // Scales the logistic link from standardized organic propensity to exposure
  // propensity; zero makes exposure ignorable.
  double selection_bias_strength = 1.0;
  // Click probability per impression.
  double click_rate_given_exposure = 0.02;
  // Organic converters click this many times more often per impression.
  double organic_click_multiplier = 8.0;
  // Share of treatment-induced conversions that follow a click; the rest are
  // view-through conversions.
  double click_driven_share = 0.65;
  // Mean click-to-conversion delay for click-driven induced conversions.
  PerFunnel<double> conversion_delay_mean_seconds = {5400.0, 3600.0, 900.0};
  // Mean impression-to-conversion delay for view-through conversions.
  double view_through_delay_mean_seconds = 3.0 * 86400.0;
  // Probability that an organic converter who clicked converts shortly after a
  // click rather than at an unrelated time.
  PerFunnel<double> organic_click_harvest = {0.15, 0.4, 0.8};
  double harvest_delay_mean_seconds = 1200.0;
  LogNormalSpec cost_per_thousand_impressions = {8.0, 0.35};
  LogNormalSpec impressions_per_exposed_user = {4.0, 0.3};
  // Consecutive RCT indices share an experiment id and its characteristics.
  int64_t rcts_per_experiment = 2;
  // When positive, `Simulate` drops RCTs whose test group has fewer factual
  // conversions and keeps drawing until n_rcts are accepted.
  int64_t min_test_conversions = 0;
  // Multiply lift, organic rate and click behavior by campaign-characteristic
  // effects. Disabling makes characteristics pure noise features.
  bool characteristic_effects = true;
  uint64_t seed = 20230331;

  absl::Status Validate() const;
  static absl::StatusOr<SimulationConfig> FromJson(absl::string_view json_text);
  static absl::StatusOr<SimulationConfig> Load(const std::string& path);
  std::string ToJson() const;
};

// Per-window decomposition of the incremental conversions of one RCT. All
// counts are users among the exposed test group.
struct Decomposition {
  std::array<int64_t, 4> lc_within = {0, 0, 0, 0};   // last click within w
  std::array<int64_t, 4> lc_outside = {0, 0, 0, 0};  // last click outside w
  int64_t conversions_no_click = 0;                  // view-through
  int64_t conversions_organic = 0;  // would have converted unexposed

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

struct GroundTruth {
  int64_t n_exposed = 0;
  int64_t true_ic = 0;
  double true_att = 0.0;
  double true_icpd = 0.0;
  Decomposition decomposition;
};

struct SimulatedRct {
  std::string rct_id;
  std::string experiment_id;
  CampaignCharacteristics characteristics;
  double cost = 0.0;
  double planned_test_share = 0.9;
  EventLog log;
  GroundTruth truth;

  EventLogFile ToFile() const;
};

// Generates RCT `rct_index`; a pure function of (cfg, rct_index).
absl::StatusOr<SimulatedRct> GenerateExperiment(const SimulationConfig& cfg,
                                                int64_t rct_index);

// Generates cfg.n_rcts RCTs, honoring min_test_conversions.
absl::StatusOr<std::vector<SimulatedRct>> Simulate(const SimulationConfig& cfg);

// Same sequence as Simulate, handed to `sink` one RCT at a time so only one
// log is held in memory. Stops at the first error from `sink`.
absl::Status SimulateEach(const SimulationConfig& cfg,
                          const std::function<absl::Status(SimulatedRct)>& sink);

// Incremental-conversion decomposition counted from the log alone (needs
// counterfactuals for the organic term).
absl::StatusOr<Decomposition> DecomposeConversions(const EventLog& log);

// True iff true_ic == LC_w + LC_{-w} + no-click - organic, with every term
// recounted from the log and matching the recorded ground truth.
absl::StatusOr<bool> VerifyDecomposition(const EventLog& log,
                                         const GroundTruth& truth,
                                         AttributionWindow w);

// Mean factual conversion of exposed minus unexposed test-group users: the
// observational comparison that ignores selection into exposure.
absl::StatusOr<double> NaiveObservationalAtt(const EventLog& log);

}  // namespace pie

#endif  // PIE_SIMULATOR_H_
