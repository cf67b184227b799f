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
#include "pie/evaluation.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "pie/folds.h"
#include "test_util.h"

namespace pie {
namespace {

const CategorySchema& Schema() { return CategorySchema::Default(); }

EvaluationOptions FastOptions() {
  EvaluationOptions options;
  options.model.forest.n_trees = 15;
  options.model.forest.cv_n_trees = 5;
  options.model.forest.cv_folds = 3;
  return options;
}

TEST(LeaveOneOutTest, DepthZeroForestPredictsMeanOfOthers) {
  auto data = testing::SyntheticSummaries(3, 1);
  for (RctSummary& s : data) s.characteristics.funnel = FunnelLevel::kMid;
  EvaluationOptions options;
  options.model.forest.tune = false;
  options.model.forest.n_trees = 1;
  options.model.forest.max_depth = 0;
  options.model.forest.bootstrap = false;
  auto report = LeaveOneOut(data, ModelSpec::kRfM1, Schema(), options, 7);
  ASSERT_TRUE(report.ok()) << report.status();
  for (size_t r = 0; r < 3; ++r) {
    const RctSummary& a = data[(r + 1) % 3];
    const RctSummary& b = data[(r + 2) % 3];
    // Two-point moment estimate of gamma^2 within the shared funnel.
    const double va = 1 / (a.icpd_se * a.icpd_se), vb = 1 / (b.icpd_se * b.icpd_se);
    const double m = (va * a.icpd + vb * b.icpd) / (va + vb);
    const double q = va * (a.icpd - m) * (a.icpd - m) + vb * (b.icpd - m) * (b.icpd - m);
    const double g = std::max(0.0, (q - 1) / (va + vb - (va * va + vb * vb) / (va + vb)));
    const double wa = 1 / (a.icpd_se * a.icpd_se + g);
    const double wb = 1 / (b.icpd_se * b.icpd_se + g);
    const double expected = (wa * a.icpd + wb * b.icpd) / (wa + wb);
    EXPECT_NEAR(report->rows[r].predicted, expected, 1e-12) << r;
    EXPECT_NEAR(report->rows[r].raw_weight,
                1 / (data[r].icpd_se * data[r].icpd_se + g), 1e-9 * report->rows[r].raw_weight);
  }
}

TEST(LeaveOneOutTest, RawSpecIgnoresTraining) {
  const auto data = testing::SyntheticSummaries(9, 2);
  auto report = LeaveOneOut(data, ModelSpec::kRawLc1h, Schema(), {}, 1);
  ASSERT_TRUE(report.ok());
  for (size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(report->rows[i].predicted, data[i].lcpd[0]);
    EXPECT_EQ(report->rows[i].actual, data[i].icpd);
    EXPECT_EQ(report->rows[i].rct_id, data[i].rct_id);
  }
  double total = 0;
  for (const auto& row : report->rows) total += row.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

class HeldOutMutationTest : public ::testing::TestWithParam<ModelSpec> {};

TEST_P(HeldOutMutationTest, HeldOutTargetDoesNotLeak) {
  const auto data = testing::SyntheticSummaries(24, 3);
  const EvaluationOptions options = FastOptions();
  auto base = LeaveOneOut(data, GetParam(), Schema(), options, 11);
  ASSERT_TRUE(base.ok()) << base.status();
  for (size_t r : {0u, 7u, 23u}) {
    auto mutated = data;
    mutated[r].icpd *= 25.0;
    auto again = LeaveOneOut(mutated, GetParam(), Schema(), options, 11);
    ASSERT_TRUE(again.ok());
    EXPECT_EQ(again->rows[r].predicted, base->rows[r].predicted) << r;
    EXPECT_EQ(again->rows[r].raw_weight, base->rows[r].raw_weight) << r;
  }
}

INSTANTIATE_TEST_SUITE_P(Specs, HeldOutMutationTest,
                         ::testing::Values(ModelSpec::kCfLc1d, ModelSpec::kLmM1,
                                           ModelSpec::kRfM1, ModelSpec::kRfM2),
                         [](const auto& info) {
                           std::string name(ModelSpecName(info.param));
                           for (char& c : name) c = c == '-' ? '_' : c;
                           return name;
                         });

TEST(LeaveOneOutTest, DeterministicAcrossRunsAndThreads) {
  const auto data = testing::SyntheticSummaries(24, 4);
  EvaluationOptions options = FastOptions();
  auto a = LeaveOneOut(data, ModelSpec::kRfM2, Schema(), options, 5);
  options.threads = 3;
  auto b = LeaveOneOut(data, ModelSpec::kRfM2, Schema(), options, 5);
  ASSERT_TRUE(a.ok()) << a.status();
  ASSERT_TRUE(b.ok());
  for (size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(a->rows[i].predicted, b->rows[i].predicted);
    EXPECT_EQ(a->rows[i].weight, b->rows[i].weight);
  }
  auto c = LeaveOneOut(data, ModelSpec::kRfM2, Schema(), options, 6);
  ASSERT_TRUE(c.ok());
  bool differs = false;
  for (size_t i = 0; i < data.size(); ++i) differs |= a->rows[i].predicted != c->rows[i].predicted;
  EXPECT_TRUE(differs);
}

TEST(LeaveOneOutTest, Preconditions) {
  auto data = testing::SyntheticSummaries(11, 5);
  EXPECT_EQ(LeaveOneOut(data, ModelSpec::kRfM1, Schema(), FastOptions(), 1).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(LeaveOneOut(data, ModelSpec::kCfLc1h, Schema(), {}, 1).ok());
  data[3].rct_id = data[2].rct_id;
  EXPECT_FALSE(LeaveOneOut(data, ModelSpec::kCfLc1h, Schema(), {}, 1).ok());
  EXPECT_FALSE(
      LeaveOneOut(testing::SyntheticSummaries(2, 5), ModelSpec::kRawLc1h, Schema(), {}, 1).ok());
}

TEST(PlanFoldsTest, HeldOutNeverTrains) {
  const auto data = testing::SyntheticSummaries(30, 6);
  for (bool by_experiment : {false, true}) {
    EvaluationOptions options = FastOptions();
    options.group_by_experiment = by_experiment;
    const auto plans = PlanFolds(data, ModelSpec::kRfM1, options, 3);
    EXPECT_EQ(plans.size(), by_experiment ? 15u : 30u);
    for (const FoldPlan& plan : plans) {
      EXPECT_EQ(plan.held_out.size(), by_experiment ? 2u : 1u);
      EXPECT_EQ(plan.held_out.size() + plan.training.size(), data.size());
      const std::set<std::string> training(plan.training.begin(), plan.training.end());
      for (const std::string& id : plan.held_out) EXPECT_FALSE(training.contains(id));
      ASSERT_EQ(plan.inner_fold.size(), plan.training.size());
      std::set<int> used(plan.inner_fold.begin(), plan.inner_fold.end());
      EXPECT_EQ(used, (std::set<int>{0, 1, 2}));
    }
  }
}

TEST(LeaveOneOutTest, GroupByExperimentHoldsOutPairs) {
  const auto data = testing::SyntheticSummaries(12, 7);
  EvaluationOptions options;
  options.group_by_experiment = true;
  auto grouped = LeaveOneOut(data, ModelSpec::kCfLc1h, Schema(), options, 1);
  ASSERT_TRUE(grouped.ok()) << grouped.status();
  // rct0 and rct1 share an experiment, so rct0 is scored by a model trained
  // on rct2..rct11 only.
  std::vector<RctSummary> without_pair(data.begin() + 2, data.end());
  without_pair.insert(without_pair.begin(), data[0]);
  auto single = LeaveOneOut(without_pair, ModelSpec::kCfLc1h, Schema(), {}, 1);
  ASSERT_TRUE(single.ok());
  EXPECT_EQ(grouped->rows[0].predicted, single->rows[0].predicted);
}

TEST(SubsetMetricsTest, CombinationIdentityAndShares) {
  const auto data = testing::SyntheticSummaries(30, 8);
  auto report = LeaveOneOut(data, ModelSpec::kLmM1, Schema(), {}, 2);
  ASSERT_TRUE(report.ok());
  const SubsetMetrics* all = nullptr;
  double combined = 0, share = 0;
  size_t n = 0;
  for (const SubsetMetrics& m : report->subsets) {
    if (m.subset_type == "all") all = &m;
    if (m.subset_type != "funnel") continue;
    combined += m.weight_share * m.wrmse * m.wrmse;
    share += m.weight_share;
    n += m.n;
  }
  ASSERT_NE(all, nullptr);
  EXPECT_EQ(all->subset, "all");
  EXPECT_EQ(n, 30u);
  EXPECT_NEAR(share, 1.0, 1e-12);
  EXPECT_NEAR(all->wrmse * all->wrmse, combined, 1e-10);
  std::vector<double> actual;
  for (const auto& row : report->rows) actual.push_back(row.actual);
  double mean = 0;
  for (const auto& row : report->rows) mean += row.weight * row.actual;
  EXPECT_NEAR(all->percent_wrmse, all->wrmse / mean, 1e-12);
}

TEST(StratifiedFoldsTest, BalancedAndDeterministic) {
  std::vector<int> strata;
  for (int i = 0; i < 37; ++i) strata.push_back(i % 3 == 0 ? 0 : (i % 5 == 0 ? 2 : 1));
  const auto a = StratifiedFolds(strata, 10, 99);
  const auto b = StratifiedFolds(strata, 10, 99);
  EXPECT_EQ(a, b);
  std::vector<int> size(10, 0);
  for (int f : a) ++size[f];
  EXPECT_LE(*std::max_element(size.begin(), size.end()) -
                *std::min_element(size.begin(), size.end()),
            1);
  for (int s = 0; s < 3; ++s) {
    std::vector<int> per(10, 0);
    for (size_t i = 0; i < strata.size(); ++i) {
      if (strata[i] == s) ++per[a[i]];
    }
    EXPECT_LE(*std::max_element(per.begin(), per.end()) -
                  *std::min_element(per.begin(), per.end()),
              1);
  }
  EXPECT_NE(a, StratifiedFolds(strata, 10, 100));
}

}  // namespace
}  // namespace pie
