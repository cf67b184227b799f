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
#ifndef PIE_TYPES_H_
#define PIE_TYPES_H_

#include <array>
#include <cstdint>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/statusor.h"

namespace pie {

// Conversion depth of the outcome an RCT measures.
enum class FunnelLevel { kLower = 0, kMid = 1, kUpper = 2 };

inline constexpr std::array<FunnelLevel, 3> kAllFunnels = {
    FunnelLevel::kLower, FunnelLevel::kMid, FunnelLevel::kUpper};

absl::string_view FunnelName(FunnelLevel funnel);
absl::StatusOr<FunnelLevel> ParseFunnel(absl::string_view text);

// Advertiser vertical. Smaller verticals are pooled into kOther.
enum class Vertical {
  kEcommerce = 0,
  kRetail,
  kFinancialServicesTravel,
  kTechTelecom,
  kEntertainmentMedia,
  kConsumerPackagedGoods,
  kOther,
};

inline constexpr std::array<Vertical, 7> kAllVerticals = {
    Vertical::kEcommerce,          Vertical::kRetail,
    Vertical::kFinancialServicesTravel, Vertical::kTechTelecom,
    Vertical::kEntertainmentMedia, Vertical::kConsumerPackagedGoods,
    Vertical::kOther};

absl::string_view VerticalName(Vertical vertical);
// With `lenient`, unknown names map to kOther instead of failing.
absl::StatusOr<Vertical> ParseVertical(absl::string_view text,
                                       bool lenient = false);

// Click-to-conversion lookback windows, ordered by duration.
enum class AttributionWindow { k1h = 0, k1d = 1, k7d = 2, k28d = 3 };

inline constexpr std::array<AttributionWindow, 4> kAllWindows = {
    AttributionWindow::k1h, AttributionWindow::k1d, AttributionWindow::k7d,
    AttributionWindow::k28d};

constexpr int64_t WindowSeconds(AttributionWindow w) {
  switch (w) {
    case AttributionWindow::k1h:
      return 3600;
    case AttributionWindow::k1d:
      return 86400;
    case AttributionWindow::k7d:
      return 604800;
    case AttributionWindow::k28d:
      return 2419200;
  }
  return 0;
}

constexpr int WindowIndex(AttributionWindow w) { return static_cast<int>(w); }

absl::string_view WindowName(AttributionWindow w);  // "1h", "1d", "7d", "28d"
absl::StatusOr<AttributionWindow> ParseWindow(absl::string_view text);

// One value per attribution window, indexed by WindowIndex().
using WindowValues = std::array<double, 4>;

struct CampaignCharacteristics {
  Vertical vertical = Vertical::kOther;
  FunnelLevel funnel = FunnelLevel::kLower;
  std::string targeting_descriptor;
  std::string bidding_strategy;
  std::string optimization_setting;
  double advertiser_experience = 0.0;  // platform tenure, arbitrary units
  std::string campaign_objective;
  double audience_retargeting_share = 0.0;
  int64_t n_test_users = 1;
  double budget = 1.0;
  int64_t length_days = 1;

  friend bool operator==(const CampaignCharacteristics&,
                         const CampaignCharacteristics&) = default;
};

// Canonical per-RCT record consumed by weighting, models and evaluation.
struct RctSummary {
  std::string rct_id;
  std::string experiment_id;
  CampaignCharacteristics characteristics;
  double cost = 0.0;
  int64_t n_exposed = 0;
  double att = 0.0;
  double att_se = 0.0;
  double icpd = 0.0;
  double icpd_se = 0.0;
  WindowValues lcpd = {0.0, 0.0, 0.0, 0.0};
  double randomization_p = 1.0;

  double Lcpd(AttributionWindow w) const { return lcpd[WindowIndex(w)]; }
};

}  // namespace pie

#endif  // PIE_TYPES_H_
