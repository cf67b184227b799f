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
#include "pie/simulator.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "pie/estimators.h"
#include "pie/summary.h"

namespace pie {
namespace {

SimulationConfig SmallConfig() {
  SimulationConfig cfg;
  cfg.n_rcts = 12;
  cfg.users_per_rct = {4000.0, 0.0};
  return cfg;
}

SimulationConfig ZeroLift(SimulationConfig cfg) {
  for (LogNormalSpec& lift : cfg.treatment_lift) lift = {0.0, 0.0};
  return cfg;
}

TEST(SimulatorTest, SameIndexGivesIdenticalLogs) {
  const SimulationConfig cfg = SmallConfig();
  auto a = GenerateExperiment(cfg, 5);
  auto b = GenerateExperiment(cfg, 5);
  ASSERT_TRUE(a.ok()) << a.status();
  ASSERT_TRUE(b.ok());
  EXPECT_EQ(a->log, b->log);
  EXPECT_EQ(a->truth.decomposition, b->truth.decomposition);
  EXPECT_EQ(a->cost, b->cost);

  auto c = GenerateExperiment(cfg, 6);
  ASSERT_TRUE(c.ok());
  EXPECT_FALSE(a->log == c->log);
}

TEST(SimulatorTest, ExperimentIsPureFunctionOfIndex) {
  const SimulationConfig cfg = SmallConfig();
  auto all = Simulate(cfg);
  ASSERT_TRUE(all.ok()) << all.status();
  ASSERT_EQ(all->size(), 12u);
  auto seventh = GenerateExperiment(cfg, 7);
  ASSERT_TRUE(seventh.ok());
  EXPECT_EQ((*all)[7].log, seventh->log);
}

TEST(SimulatorTest, ZeroLiftHasNoIncrementalConversions) {
  auto rcts = Simulate(ZeroLift(SmallConfig()));
  ASSERT_TRUE(rcts.ok()) << rcts.status();
  for (const SimulatedRct& r : *rcts) {
    EXPECT_EQ(r.truth.true_ic, 0) << r.rct_id;
    EXPECT_EQ(r.truth.true_att, 0.0) << r.rct_id;
    const Decomposition& d = r.truth.decomposition;
    for (AttributionWindow w : kAllWindows) {
      const int i = WindowIndex(w);
      EXPECT_EQ(d.lc_within[i] + d.lc_outside[i] + d.conversions_no_click,
                d.conversions_organic);
    }
  }
}

TEST(SimulatorTest, DecompositionHoldsForEveryWindow) {
  auto rcts = Simulate(SmallConfig());
  ASSERT_TRUE(rcts.ok());
  for (const SimulatedRct& r : *rcts) {
    for (AttributionWindow w : kAllWindows) {
      auto holds = VerifyDecomposition(r.log, r.truth, w);
      ASSERT_TRUE(holds.ok()) << holds.status();
      EXPECT_TRUE(*holds) << r.rct_id << " " << WindowName(w);
    }
  }
}

TEST(SimulatorTest, LogsSatisfyComplianceInvariants) {
  auto rcts = Simulate(SmallConfig());
  ASSERT_TRUE(rcts.ok());
  for (const SimulatedRct& r : *rcts) {
    EXPECT_TRUE(r.log.Validate().ok()) << r.rct_id;
    for (size_t i = 0; i < r.log.size(); ++i) {
      const UserEvents u = r.log.user(i);
      if (!u.assigned_test) {
        EXPECT_FALSE(u.exposed);
        EXPECT_TRUE(u.impression_times.empty());
        EXPECT_TRUE(u.click_times.empty());
      }
    }
  }
}

TEST(SimulatorTest, SummariesPassValidation) {
  auto rcts = Simulate(SmallConfig());
  ASSERT_TRUE(rcts.ok());
  for (const SimulatedRct& r : *rcts) {
    auto s = SummarizeRct(r.ToFile());
    ASSERT_TRUE(s.ok()) << s.status();
    EXPECT_TRUE(ValidateSummary(*s).ok());
    for (size_t w = 1; w < 4; ++w) EXPECT_GE(s->lcpd[w], s->lcpd[w - 1]);
  }
}

TEST(SimulatorTest, ZeroLiftSummaryIsNearZero) {
  auto rcts = Simulate(ZeroLift(SmallConfig()));
  ASSERT_TRUE(rcts.ok());
  for (const SimulatedRct& r : *rcts) {
    auto s = SummarizeRct(r.ToFile());
    ASSERT_TRUE(s.ok());
    EXPECT_LT(std::abs(s->att), 4.0 * s->att_se) << r.rct_id;
    for (double v : s->lcpd) EXPECT_GE(v, 0.0);
  }
}

TEST(NaiveObservationalAttTest, TwoUserLog) {
  EventLog log;
  const std::vector<Seconds> imp = {0}, conv = {10};
  log.AddUser(1, true, true, imp, {}, conv);
  log.AddUser(2, true, false, {}, {}, {});
  EXPECT_EQ(*NaiveObservationalAtt(log), 1.0);
}

TEST(NaiveObservationalAttTest, UnbiasedWithoutSelection) {
  SimulationConfig cfg = ZeroLift(SmallConfig());
  cfg.selection_bias_strength = 0.0;
  cfg.users_per_rct = {40000.0, 0.0};
  cfg.characteristic_effects = false;
  auto r = GenerateExperiment(cfg, 0);
  ASSERT_TRUE(r.ok());
  auto naive = NaiveObservationalAtt(r->log);
  auto att = EstimateAtt(r->log);
  ASSERT_TRUE(naive.ok());
  ASSERT_TRUE(att.ok());
  EXPECT_LT(std::abs(*naive), 3.0 * att->se);
}

TEST(NaiveObservationalAttTest, BiasedUnderStrongSelection) {
  SimulationConfig cfg = ZeroLift(SmallConfig());
  cfg.selection_bias_strength = kHighSelectionBias;
  auto r = GenerateExperiment(cfg, 0);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(*NaiveObservationalAtt(r->log), 0.0);
}

TEST(SimulationConfigTest, JsonRoundTrip) {
  SimulationConfig cfg = SmallConfig();
  cfg.seed = 99;
  cfg.selection_bias_strength = 2.5;
  auto back = SimulationConfig::FromJson(cfg.ToJson());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->ToJson(), cfg.ToJson());
  EXPECT_EQ(back->seed, 99u);
}

TEST(SimulationConfigTest, RejectsInvalidValues) {
  SimulationConfig cfg;
  cfg.control_share = 1.5;
  EXPECT_FALSE(cfg.Validate().ok());
  cfg = SimulationConfig();
  cfg.treatment_lift[0].median = -1.0;
  EXPECT_FALSE(cfg.Validate().ok());
  EXPECT_FALSE(SimulationConfig::FromJson("{\"n_rcts\": \"many\"}").ok());
}

}  // namespace
}  // namespace pie
