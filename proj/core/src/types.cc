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
#include "pie/types.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace pie {
namespace {

constexpr std::array<absl::string_view, 3> kFunnelNames = {"lower", "mid",
                                                          "upper"};
constexpr std::array<absl::string_view, 7> kVerticalNames = {
    "ecommerce",           "retail",
    "financial_services_travel", "tech_telecom",
    "entertainment_media", "consumer_packaged_goods",
    "other"};
constexpr std::array<absl::string_view, 4> kWindowNames = {"1h", "1d", "7d",
                                                          "28d"};

}  // namespace

absl::string_view FunnelName(FunnelLevel funnel) {
  return kFunnelNames[static_cast<int>(funnel)];
}

absl::StatusOr<FunnelLevel> ParseFunnel(absl::string_view text) {
  for (FunnelLevel f : kAllFunnels) {
    if (FunnelName(f) == text) return f;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown funnel level '", text, "'"));
}

absl::string_view VerticalName(Vertical vertical) {
  return kVerticalNames[static_cast<int>(vertical)];
}

absl::StatusOr<Vertical> ParseVertical(absl::string_view text, bool lenient) {
  for (Vertical v : kAllVerticals) {
    if (VerticalName(v) == text) return v;
  }
  if (lenient) return Vertical::kOther;
  return absl::InvalidArgumentError(absl::StrCat("unknown vertical '", text, "'"));
}

absl::string_view WindowName(AttributionWindow w) {
  return kWindowNames[WindowIndex(w)];
}

absl::StatusOr<AttributionWindow> ParseWindow(absl::string_view text) {
  for (AttributionWindow w : kAllWindows) {
    if (WindowName(w) == text) return w;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown attribution window '", text, "'"));
}

}  // namespace pie
