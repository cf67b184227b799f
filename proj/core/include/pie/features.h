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
#ifndef PIE_FEATURES_H_
#define PIE_FEATURES_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "pie/schema.h"
#include "pie/types.h"

namespace pie {

// What a model sees of one RCT: the post-campaign proxies and the
// pre-campaign characteristics, tagged with the category schema version.
struct FeatureRecord {
  std::string schema_version;
  WindowValues lcpd = {0.0, 0.0, 0.0, 0.0};
  CampaignCharacteristics characteristics;
};

FeatureRecord ToFeatureRecord(const RctSummary& summary,
                              const CategorySchema& schema = CategorySchema::Default());

// Targets and weights travel beside the features.
struct TrainingData {
  std::vector<FeatureRecord> features;
  std::vector<double> target;  // icpd
  std::vector<double> weight;  // omega

  size_t size() const { return features.size(); }
};

enum class FeatureSet {
  kM1,  // the four LCPD values
  kM2,  // LCPD values plus campaign characteristics
};

enum class CategoricalEncoding {
  kFullOneHot,     // every category gets a column (trees)
  kDropReference,  // first category of each factor is the baseline (linear)
};

// Maps FeatureRecords to dense rows. Column order: lcpd_1h..lcpd_28d, then
// for M2 the one-hot blocks (funnel, vertical, targeting, bidding,
// optimization, objective) followed by the standardized numeric
// characteristics (advertiser_experience, audience_retargeting_share,
// n_test_users, budget, length_days). Standardization constants come from
// the training records only.
class FeatureEncoder {
 public:
  static absl::StatusOr<FeatureEncoder> Fit(std::span<const FeatureRecord> training,
                                            const CategorySchema& schema,
                                            FeatureSet set,
                                            CategoricalEncoding encoding);

  size_t num_features() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  FeatureSet feature_set() const { return set_; }
  const CategorySchema& schema() const { return schema_; }

  // Index range of the characteristic (X_pre) columns; empty for M1.
  size_t pre_begin() const { return 4; }
  size_t pre_end() const { return names_.size(); }

  absl::Status Encode(const FeatureRecord& record, std::span<double> out) const;
  // Row-major n x num_features() matrix.
  absl::StatusOr<std::vector<double>> EncodeAll(
      std::span<const FeatureRecord> records) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<FeatureEncoder> FromJson(const nlohmann::json& doc);

 private:
  CategorySchema schema_;
  FeatureSet set_ = FeatureSet::kM1;
  CategoricalEncoding encoding_ = CategoricalEncoding::kFullOneHot;
  std::vector<std::string> names_;
  std::array<double, 5> numeric_mean_ = {0, 0, 0, 0, 0};
  std::array<double, 5> numeric_scale_ = {1, 1, 1, 1, 1};
};

}  // namespace pie

#endif  // PIE_FEATURES_H_
