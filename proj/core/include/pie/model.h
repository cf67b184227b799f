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
#ifndef PIE_MODEL_H_
#define PIE_MODEL_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nlohmann/json.hpp"
#include "pie/features.h"
#include "pie/random_forest.h"
#include "pie/regression.h"
#include "pie/types.h"

namespace pie {

enum class ModelSpec {
  kRawLc1h,
  kRawLc1d,
  kRawLc7d,
  kRawLc28d,
  kCfLc1h,
  kCfLc1d,
  kCfLc7d,
  kCfLc28d,
  kLmM1,
  kLmM2,
  kRfM1,
  kRfM2,
};

inline constexpr std::array<ModelSpec, 12> kAllModelSpecs = {
    ModelSpec::kRawLc1h, ModelSpec::kRawLc1d, ModelSpec::kRawLc7d,
    ModelSpec::kRawLc28d, ModelSpec::kCfLc1h, ModelSpec::kCfLc1d,
    ModelSpec::kCfLc7d,  ModelSpec::kCfLc28d, ModelSpec::kLmM1,
    ModelSpec::kLmM2,    ModelSpec::kRfM1,    ModelSpec::kRfM2};

enum class ModelFamily { kRaw, kCalibration, kLinear, kForest };

absl::string_view ModelSpecName(ModelSpec spec);  // "raw-lc1h", ..., "rf-m2"
absl::StatusOr<ModelSpec> ParseModelSpec(absl::string_view text);
ModelFamily Family(ModelSpec spec);
// Window of a raw or cf spec.
std::optional<AttributionWindow> SpecWindow(ModelSpec spec);
FeatureSet SpecFeatureSet(ModelSpec spec);
bool HasHyperparameters(ModelSpec spec);

struct ModelOptions {
  bool weighted_calibration = true;
  bool per_funnel_calibration = true;
  ForestOptions forest;
};

struct RawParams {};

struct CalibrationParams {
  CalibrationFit pooled;
  std::map<FunnelLevel, CalibrationFit> by_funnel;  // absent: falls back to pooled
};

struct LinearParams {
  std::vector<std::string> terms;  // "(intercept)", main effects, interactions
  std::vector<double> coefficients;
};

struct ForestParams {
  TreeParams chosen;
  std::vector<CandidateScore> candidates;  // empty when untuned
  RandomForest forest;
};

inline constexpr absl::string_view kModelFileFormat = "pie-model-v1";

class TrainedModel {
 public:
  ModelSpec spec() const { return spec_; }
  const std::string& schema_version() const { return encoder_.schema().version; }
  const FeatureEncoder& encoder() const { return encoder_; }
  const std::variant<RawParams, CalibrationParams, LinearParams, ForestParams>& params()
      const {
    return params_;
  }

  absl::StatusOr<double> Predict(const FeatureRecord& record) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<TrainedModel> FromJson(const nlohmann::json& doc);
  absl::Status Save(const std::string& path) const;
  static absl::StatusOr<TrainedModel> Load(const std::string& path);

 private:
  friend absl::StatusOr<TrainedModel> FitModel(ModelSpec, const TrainingData&,
                                               const CategorySchema&,
                                               const ModelOptions&, uint64_t);

  ModelSpec spec_ = ModelSpec::kRawLc1h;
  FeatureEncoder encoder_;
  std::variant<RawParams, CalibrationParams, LinearParams, ForestParams> params_;
};

// Fits any spec. Weights are the observation weights omega; forests draw all
// randomness from `seed`.
absl::StatusOr<TrainedModel> FitModel(ModelSpec spec, const TrainingData& data,
                                      const CategorySchema& schema,
                                      const ModelOptions& options, uint64_t seed);

// The inner CV fold assignment FitModel uses for a forest fitted with
// `fit_seed`; strata are funnel indices of the training records.
std::vector<int> InnerFolds(std::span<const int> strata, int k, uint64_t fit_seed);

// Expands an encoded row into the linear design (no intercept column): the
// main effects followed, for M2, by every lcpd x characteristic product.
std::vector<double> LinearDesignRow(std::span<const double> encoded,
                                    const FeatureEncoder& encoder);
std::vector<std::string> LinearTermNames(const FeatureEncoder& encoder);

}  // namespace pie

#endif  // PIE_MODEL_H_
