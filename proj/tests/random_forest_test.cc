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
#include "pie/random_forest.h"

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "nlohmann/json.hpp"

namespace pie {
namespace {

struct Dataset {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  size_t p = 0;
};

Dataset RandomData(size_t n, size_t p, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d;
  d.p = p;
  for (size_t i = 0; i < n; ++i) {
    double signal = 0.0;
    for (size_t j = 0; j < p; ++j) {
      const double v = j == 1 ? static_cast<double>(u(rng) < 0.4) : u(rng);
      d.x.push_back(v);
      if (j < 3) signal += (j + 1.0) * v;
    }
    d.y.push_back(signal + 0.3 * u(rng));
    d.w.push_back(0.2 + u(rng));
  }
  return d;
}

TEST(RegressionTreeTest, DepthZeroPredictsWeightedMean) {
  const Dataset d = RandomData(50, 3, 1);
  const ForestData data(d.x, d.p, d.y);
  const TreeParams params{.features_per_split = 3, .max_depth = 0, .bootstrap = false};
  const RandomForest forest = RandomForest::Fit(data, d.w, params, 1, 9);
  double sw = 0, swy = 0;
  for (size_t i = 0; i < d.y.size(); ++i) {
    sw += d.w[i];
    swy += d.w[i] * d.y[i];
  }
  ASSERT_EQ(forest.trees().size(), 1u);
  EXPECT_EQ(forest.trees()[0].nodes().size(), 1u);
  for (const std::vector<double>& probe :
       {std::vector<double>{0, 0, 0}, std::vector<double>{5, 1, -2}}) {
    EXPECT_NEAR(forest.Predict(probe), swy / sw, 1e-12);
  }
}

TEST(RegressionTreeTest, ConstantTargetIsALeaf) {
  Dataset d = RandomData(40, 2, 2);
  for (double& y : d.y) y = 1.25;
  const RegressionTree tree =
      RegressionTree::Fit(ForestData(d.x, d.p, d.y), d.w, TreeParams{}, 3);
  EXPECT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.depth(), 0);
}

TEST(RegressionTreeTest, TiesGoToLowestFeature) {
  // Columns 0 and 2 are identical, so every split on one has an equal-gain
  // twin on the other.
  Dataset d = RandomData(60, 3, 4);
  for (size_t i = 0; i < 60; ++i) d.x[i * 3 + 2] = d.x[i * 3 + 0];
  for (size_t i = 0; i < 60; ++i) d.y[i] = d.x[i * 3] > 0.5 ? 2.0 : 0.0;
  const TreeParams params{.features_per_split = 3, .bootstrap = false};
  const RegressionTree tree = RegressionTree::Fit(ForestData(d.x, d.p, d.y), d.w, params, 5);
  for (const auto& node : tree.nodes()) EXPECT_NE(node.feature, 2);
  EXPECT_EQ(tree.nodes()[0].feature, 0);
}

TEST(RegressionTreeTest, LeavesRespectMinimumWeight) {
  const Dataset d = RandomData(300, 4, 6);
  const ForestData data(d.x, d.p, d.y);
  for (double fraction : {0.01, 0.05, 0.2}) {
    const TreeParams params{.features_per_split = 4,
                            .min_leaf_fraction = fraction,
                            .bootstrap = false};
    const RegressionTree tree = RegressionTree::Fit(data, d.w, params, 8);
    std::map<const RegressionTree::Node*, double> leaf_weight;
    double total = 0;
    for (size_t i = 0; i < data.rows(); ++i) {
      const auto& nodes = tree.nodes();
      size_t k = 0;
      while (nodes[k].feature >= 0) {
        k = data.x(i, nodes[k].feature) <= nodes[k].threshold ? nodes[k].left
                                                              : nodes[k].right;
      }
      leaf_weight[&nodes[k]] += d.w[i];
      total += d.w[i];
    }
    for (const auto& [leaf, w] : leaf_weight) {
      EXPECT_GE(w, fraction * total * (1 - 1e-12)) << "fraction " << fraction;
    }
  }
}

TEST(RandomForestTest, PredictionIsMeanOfTrees) {
  const Dataset d = RandomData(120, 4, 10);
  const ForestData data(d.x, d.p, d.y);
  const RandomForest forest =
      RandomForest::Fit(data, d.w, TreeParams{.features_per_split = 2}, 25, 77);
  for (size_t i = 0; i < 10; ++i) {
    const auto row = data.row(i);
    const std::vector<double> per_tree = forest.TreePredictions(row);
    ASSERT_EQ(per_tree.size(), 25u);
    double mean = 0;
    for (double v : per_tree) mean += v;
    mean /= 25.0;
    EXPECT_NEAR(forest.Predict(row), mean, 1e-12);
  }
}

TEST(RandomForestTest, SameSeedSamePredictions) {
  const Dataset d = RandomData(120, 4, 12);
  const ForestData data(d.x, d.p, d.y);
  const TreeParams params{.features_per_split = 2};
  const RandomForest a = RandomForest::Fit(data, d.w, params, 20, 5);
  const RandomForest b = RandomForest::Fit(data, d.w, params, 20, 5);
  const RandomForest c = RandomForest::Fit(data, d.w, params, 20, 6);
  bool differs = false;
  for (size_t i = 0; i < data.rows(); ++i) {
    EXPECT_EQ(a.Predict(data.row(i)), b.Predict(data.row(i)));
    differs |= a.Predict(data.row(i)) != c.Predict(data.row(i));
  }
  EXPECT_TRUE(differs);
}

class WeightScalingTest : public ::testing::TestWithParam<double> {};

TEST_P(WeightScalingTest, PredictionsInvariant) {
  const Dataset d = RandomData(150, 4, 14);
  const ForestData data(d.x, d.p, d.y);
  std::vector<double> scaled = d.w;
  for (double& w : scaled) w *= GetParam();
  for (bool bootstrap : {false, true}) {
    const TreeParams params{.features_per_split = 2, .bootstrap = bootstrap};
    const RandomForest a = RandomForest::Fit(data, d.w, params, 10, 21);
    const RandomForest b = RandomForest::Fit(data, scaled, params, 10, 21);
    for (size_t i = 0; i < data.rows(); ++i) {
      EXPECT_NEAR(a.Predict(data.row(i)), b.Predict(data.row(i)), 1e-10);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Scales, WeightScalingTest, ::testing::Values(0.001, 3.0, 1024.0));

TEST(RandomForestTest, RecoversStepFunction) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](size_t n, std::vector<double>& x, std::vector<double>& y) {
    for (size_t i = 0; i < n; ++i) {
      for (int j = 0; j < 4; ++j) x.push_back(u(rng));
      y.push_back(x[i * 4] < 0.3 ? 0.1 : (x[i * 4] < 0.7 ? 0.5 : 1.4));
    }
  };
  std::vector<double> x, y, tx, ty;
  draw(2000, x, y);
  draw(500, tx, ty);
  const std::vector<double> w(2000, 1.0);
  const RandomForest forest =
      RandomForest::Fit(ForestData(x, 4, y), w, TreeParams{.features_per_split = 2}, 30, 1);
  double mean = 0;
  for (double v : ty) mean += v / 500.0;
  double sse = 0, sst = 0;
  for (size_t i = 0; i < 500; ++i) {
    const double e = ty[i] - forest.Predict(std::span<const double>(&tx[i * 4], 4));
    sse += e * e;
    sst += (ty[i] - mean) * (ty[i] - mean);
  }
  EXPECT_GT(1.0 - sse / sst, 0.95);
}

TEST(RandomForestTest, JsonRoundTrip) {
  const Dataset d = RandomData(80, 3, 15);
  const ForestData data(d.x, d.p, d.y);
  const RandomForest forest =
      RandomForest::Fit(data, d.w, TreeParams{.features_per_split = 2}, 8, 2);
  auto back = RandomForest::FromJson(nlohmann::json::parse(forest.ToJson().dump()));
  ASSERT_TRUE(back.ok()) << back.status();
  for (size_t i = 0; i < data.rows(); ++i) {
    EXPECT_EQ(back->Predict(data.row(i)), forest.Predict(data.row(i)));
  }
}

TEST(RandomForestTest, FromJsonRejectsMalformedTrees) {
  EXPECT_FALSE(RandomForest::FromJson(nlohmann::json::array()).ok());
  EXPECT_FALSE(RegressionTree::FromJson(nlohmann::json::parse("[[0.5, 0, 0.1, 7, 8]]")).ok());
  EXPECT_FALSE(RegressionTree::FromJson(nlohmann::json::parse("[[1, 2]]")).ok());
  EXPECT_FALSE(RegressionTree::FromJson(nlohmann::json::parse("{}")).ok());
}

TEST(TuningGridTest, DeduplicatesFeatureCounts) {
  const ForestOptions options;
  const auto wide = TuningGrid(35, options);
  ASSERT_EQ(wide.size(), 9u);
  EXPECT_EQ(wide[0].features_per_split, 12);
  EXPECT_EQ(wide[3].features_per_split, 6);
  EXPECT_EQ(wide[6].features_per_split, 35);
  EXPECT_EQ(wide[1].min_leaf_fraction, 0.025);
  EXPECT_EQ(TuningGrid(4, options).size(), 6u);
}

TEST(TuneForestTest, PicksFirstMinimumDeterministically) {
  const Dataset d = RandomData(60, 4, 16);
  const ForestData data(d.x, d.p, d.y);
  std::vector<int> strata(60);
  for (size_t i = 0; i < 60; ++i) strata[i] = static_cast<int>(i % 3);
  ForestOptions options;
  options.n_trees = 10;
  options.cv_folds = 5;
  auto a = TuneForest(data, d.w, strata, options, 4);
  auto b = TuneForest(data, d.w, strata, options, 4);
  ASSERT_TRUE(a.ok()) << a.status();
  ASSERT_TRUE(b.ok());
  ASSERT_EQ(a->candidates.size(), 6u);
  size_t argmin = 0;
  for (size_t i = 0; i < a->candidates.size(); ++i) {
    EXPECT_EQ(a->candidates[i].cv_wrmse, b->candidates[i].cv_wrmse);
    if (a->candidates[i].cv_wrmse < a->candidates[argmin].cv_wrmse) argmin = i;
  }
  EXPECT_EQ(a->best.features_per_split, a->candidates[argmin].params.features_per_split);
  EXPECT_EQ(a->best.min_leaf_fraction, a->candidates[argmin].params.min_leaf_fraction);

  options.cv_folds = 100;
  EXPECT_FALSE(TuneForest(data, d.w, strata, options, 4).ok());
}

}  // namespace
}  // namespace pie
