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
#ifndef PIE_TOOLS_COMMANDS_H_
#define PIE_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "pie/random_forest.h"
#include "pie/weighting.h"

namespace pie::cli {

inline constexpr uint64_t kDefaultSeed = 20230331;

struct SimulateOptions {
  std::string out;
  std::string config;  // optional SimulationConfig JSON
  std::optional<int64_t> n_rcts;
  std::optional<double> users_per_rct;
  std::optional<uint64_t> seed;
  std::optional<int64_t> min_test_conversions;
  std::optional<double> selection_bias_strength;
};

struct EstimateOptions {
  std::string input;  // directory of event logs, or a summaries CSV
  std::string out;
  std::string schema;
  bool lenient_vertical = false;
  int threads = 1;
};

// Options shared by the subcommands that fit models.
struct FitOptions {
  std::string summaries;
  std::string out;
  std::string schema;
  bool lenient_vertical = false;
  std::vector<std::string> models;
  uint64_t seed = kDefaultSeed;
  int threads = 1;
  bool unweighted_cf = false;
  bool pooled_cf = false;
  GammaGrouping gamma_grouping = GammaGrouping::kFunnel;
  ForestOptions forest;
};

struct EvaluateOptions {
  FitOptions fit;
  bool group_by_experiment = false;
};

struct DecideOptions {
  std::string predictions;
  std::string out;
  std::vector<std::string> models;  // empty: every model in the file
  int grid_points = 101;
};

struct ReportOptions {
  std::string summaries;
  std::string evaluation;  // directory or fit_metrics.csv
  std::string decision;    // optional directory or disagreement.csv
  std::string out;
  std::string schema;
  bool lenient_vertical = false;
  bool unweighted_cf = false;
  GammaGrouping gamma_grouping = GammaGrouping::kFunnel;
};

absl::Status RunSimulate(const SimulateOptions& options);
absl::Status RunEstimate(const EstimateOptions& options);
absl::Status RunTrain(const FitOptions& options);
absl::Status RunEvaluate(const EvaluateOptions& options);
absl::Status RunDecide(const DecideOptions& options);
absl::Status RunReport(const ReportOptions& options);

}  // namespace pie::cli

#endif  // PIE_TOOLS_COMMANDS_H_
