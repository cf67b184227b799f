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
#ifndef PIE_EVALUATION_H_
#define PIE_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pie/model.h"
#include "pie/schema.h"
#include "pie/types.h"
#include "pie/weighting.h"

namespace pie {

struct EvaluationOptions {
  ModelOptions model;
  GammaGrouping grouping = GammaGrouping::kFunnel;
  // Hold out every RCT of an experiment together.
  bool group_by_experiment = false;
  int threads = 1;
};

// Minimum pool size when the model tunes hyperparameters by inner CV.
inline constexpr size_t kMinRctsForInnerCv = 12;

struct FoldPlan {
  std::vector<std::string> held_out;
  std::vector<std::string> training;
  std::vector<int> inner_fold;  // parallel to training; empty without inner CV
  uint64_t seed = 0;            // seed handed to FitModel
};

// One fold per RCT (or per experiment), in first-appearance order.
std::vector<FoldPlan> PlanFolds(std::span<const RctSummary> data, ModelSpec spec,
                                const EvaluationOptions& options, uint64_t seed);

struct PredictionRow {
  std::string rct_id;
  std::string experiment_id;
  FunnelLevel funnel = FunnelLevel::kLower;
  Vertical vertical = Vertical::kOther;
  double actual = 0.0;
  double predicted = 0.0;
  double raw_weight = 0.0;  // 1/(se^2 + training gamma^2)
  double weight = 0.0;      // raw_weight normalized over the report
};

struct SubsetMetrics {
  std::string subset_type;  // "all", "funnel" or "vertical"
  std::string subset;
  double wrmse = 0.0;
  double percent_wrmse = 0.0;  // NaN when the weighted mean actual is zero
  double wmape = 0.0;          // NaN when an actual is zero
  size_t n = 0;
  double weight_share = 0.0;  // subset's share of total raw weight
};

struct EvaluationReport {
  ModelSpec spec = ModelSpec::kRawLc1h;
  std::vector<PredictionRow> rows;  // input order
  std::vector<SubsetMetrics> subsets;
};

// Leave-one-RCT-out: for each fold, gamma^2 and training weights come from
// the training RCTs only, the model is fitted on them, and each held-out RCT
// is scored with weight 1/(se^2 + frozen training gamma^2 of its group).
absl::StatusOr<EvaluationReport> LeaveOneOut(std::span<const RctSummary> data,
                                             ModelSpec spec,
                                             const CategorySchema& schema,
                                             const EvaluationOptions& options,
                                             uint64_t seed);

// Metrics for all rows, each funnel, and each vertical present.
absl::StatusOr<std::vector<SubsetMetrics>> ComputeSubsetMetrics(
    std::span<const PredictionRow> rows);

// Training set for a pool of RCTs with pooled DL weights.
absl::StatusOr<TrainingData> MakeTrainingData(std::span<const RctSummary> pool,
                                              const CategorySchema& schema,
                                              GammaGrouping grouping,
                                              PooledWeights* weights = nullptr);

}  // namespace pie

#endif  // PIE_EVALUATION_H_
