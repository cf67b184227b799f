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
#ifndef PIE_RANDOM_FOREST_H_
#define PIE_RANDOM_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace pie {

// Row-major design with one presorted row order per column, shared by every
// tree fitted on it.
class ForestData {
 public:
  ForestData(std::vector<double> x, size_t p, std::vector<double> y);

  size_t rows() const { return y_.size(); }
  size_t cols() const { return p_; }
  double x(size_t row, size_t col) const { return x_[row * p_ + col]; }
  double y(size_t row) const { return y_[row]; }
  std::span<const double> row(size_t i) const { return {x_.data() + i * p_, p_}; }
  double column_value(size_t col, size_t row) const { return x_col_[col * rows() + row]; }
  std::span<const uint32_t> order(size_t col) const {
    return {order_.data() + col * rows(), rows()};
  }
  // True when every value of the column is 0 or 1.
  bool is_binary(size_t col) const { return binary_[col] != 0; }

 private:
  std::vector<double> x_;
  std::vector<double> x_col_;  // column-major copy for split scans
  size_t p_;
  std::vector<double> y_;
  std::vector<uint32_t> order_;
  std::vector<char> binary_;
};

struct TreeParams {
  int features_per_split = 1;
  double min_leaf_fraction = 0.01;  // of the tree's total sample weight
  int max_depth = -1;               // negative: unlimited
  bool bootstrap = true;
};

class RegressionTree {
 public:
  struct Node {
    int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // x <= threshold goes left
    int32_t left = -1;
    int32_t right = -1;
    double value = 0.0;
  };

  // Weighted CART. With bootstrap, rows are drawn n times with probability
  // proportional to `weight` and the draw counts become the sample weights;
  // otherwise `weight` is used directly. Rows with zero weight are ignored.
  // The split maximizes S_L^2/W_L + S_R^2/W_R - S^2/W over a fresh random
  // subset of features per node; ties go to the lowest feature index, then
  // the lowest threshold.
  static RegressionTree Fit(const ForestData& data, std::span<const double> weight,
                            const TreeParams& params, uint64_t seed);

  double Predict(std::span<const double> x) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  int depth() const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<RegressionTree> FromJson(const nlohmann::json& doc);

 private:
  std::vector<Node> nodes_;
};

class RandomForest {
 public:
  // Tree t is grown from DeriveSeed(seed, {kStageForest, t}).
  static RandomForest Fit(const ForestData& data, std::span<const double> weight,
                          const TreeParams& params, int n_trees, uint64_t seed);

  // Arithmetic mean of the tree predictions.
  double Predict(std::span<const double> x) const;
  std::vector<double> TreePredictions(std::span<const double> x) const;
  const std::vector<RegressionTree>& trees() const { return trees_; }

  nlohmann::json ToJson() const;
  static absl::StatusOr<RandomForest> FromJson(const nlohmann::json& doc);

 private:
  std::vector<RegressionTree> trees_;
};

struct ForestOptions {
  int n_trees = 1000;
  int cv_n_trees = 0;  // trees per CV fit; 0 means n_trees
  int cv_folds = 10;
  bool tune = true;
  bool bootstrap = true;
  int max_depth = -1;
  // Used when tune is false; 0 features means ceil(p / 3).
  int features_per_split = 0;
  double min_leaf_fraction = 0.01;
};

struct CandidateScore {
  TreeParams params;
  double cv_wrmse = 0.0;
};

struct TuningResult {
  TreeParams best;
  std::vector<CandidateScore> candidates;
};

// Grid: features per split in {ceil(p/3), ceil(sqrt(p)), p} (duplicates
// removed) times minimum leaf weight in {1%, 2.5%, 5%}. Each candidate is
// scored by WRMSE over out-of-fold predictions; the first minimum wins.
std::vector<TreeParams> TuningGrid(size_t p, const ForestOptions& options);

// Seed of the fold assignment TuneForest derives from its own seed.
uint64_t CvFoldSeed(uint64_t tuning_seed);

absl::StatusOr<TuningResult> TuneForest(const ForestData& data,
                                        std::span<const double> weight,
                                        std::span<const int> strata,
                                        const ForestOptions& options, uint64_t seed);

}  // namespace pie

#endif  // PIE_RANDOM_FOREST_H_
