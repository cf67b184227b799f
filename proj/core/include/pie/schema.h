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
#ifndef PIE_SCHEMA_H_
#define PIE_SCHEMA_H_

#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace pie {

// Closed vocabularies for the categorical campaign characteristics. Feature
// assembly one-hot encodes these in declaration order, so a model trained
// against one schema version can only score records of the same version.
struct CategorySchema {
  std::string version;
  std::vector<std::string> targeting_descriptor;
  std::vector<std::string> bidding_strategy;
  std::vector<std::string> optimization_setting;
  std::vector<std::string> campaign_objective;

  static const CategorySchema& Default();

  // Reads {"version": ..., "targeting_descriptor": [...], ...}.
  static absl::StatusOr<CategorySchema> FromJson(absl::string_view json_text);
  static absl::StatusOr<CategorySchema> Load(const std::string& path);
  std::string ToJson() const;

  // Index of `code` within `vocabulary`, or an error naming `field`.
  static absl::StatusOr<int> CodeIndex(const std::vector<std::string>& vocabulary,
                                       absl::string_view code,
                                       absl::string_view field);

  friend bool operator==(const CategorySchema&, const CategorySchema&) = default;
};

}  // namespace pie

#endif  // PIE_SCHEMA_H_
