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
#include "pie/event_log.h"

#include <filesystem>
#include <vector>

#include "gtest/gtest.h"

namespace pie {
namespace {

EventLog SmallLog(bool counterfactual) {
  EventLog log(counterfactual);
  const std::vector<Seconds> imp = {0, 50}, click = {60}, conv = {100, 900};
  auto cf = [&](bool v) { return counterfactual ? std::optional<bool>(v) : std::nullopt; };
  log.AddUser(10, true, true, imp, click, conv, cf(false));
  log.AddUser(11, true, false, {}, {}, {}, cf(false));
  log.AddUser(12, false, false, {}, {}, conv, cf(true));
  return log;
}

TEST(EventLogTest, StoresUsers) {
  const EventLog log = SmallLog(true);
  ASSERT_EQ(log.size(), 3u);
  const UserEvents u = log.user(0);
  EXPECT_EQ(u.user_id, 10);
  EXPECT_TRUE(u.exposed);
  EXPECT_EQ(u.impression_times.size(), 2u);
  EXPECT_EQ(u.click_times[0], 60);
  EXPECT_TRUE(u.converted());
  EXPECT_EQ(*log.user(2).converted_counterfactual, true);
  EXPECT_TRUE(log.Validate().ok());
}

TEST(EventLogTest, RejectsExposedControlUser) {
  EventLog log;
  const std::vector<Seconds> imp = {0};
  log.AddUser(1, false, true, imp, {}, {});
  EXPECT_FALSE(log.Validate().ok());
}

TEST(EventLogTest, RejectsClickWithoutExposure) {
  EventLog log;
  const std::vector<Seconds> click = {5};
  log.AddUser(1, true, false, {}, click, {});
  EXPECT_FALSE(log.Validate().ok());
}

TEST(EventLogTest, RejectsUnsortedEvents) {
  EventLog log;
  const std::vector<Seconds> imp = {9, 3};
  log.AddUser(1, true, true, imp, {}, {});
  EXPECT_FALSE(log.Validate().ok());
}

TEST(LastClickDelayTest, UsesLastClickBeforeFirstConversion) {
  EventLog log;
  const std::vector<Seconds> imp = {0}, click = {10, 40, 500}, conv = {100, 600};
  log.AddUser(1, true, true, imp, click, conv);
  EXPECT_EQ(*LastClickDelay(log.user(0)), 60);
}

TEST(LastClickDelayTest, ClickAtConversionTimeCounts) {
  EventLog log;
  const std::vector<Seconds> imp = {0}, click = {100}, conv = {100};
  log.AddUser(1, true, true, imp, click, conv);
  EXPECT_EQ(*LastClickDelay(log.user(0)), 0);
}

class EventLogFileTest : public ::testing::TestWithParam<bool> {};

TEST_P(EventLogFileTest, RoundTrip) {
  EventLogFile file;
  file.rct_id = "rct-7";
  file.experiment_id = "exp-3";
  file.cost = 1234.5;
  file.planned_test_share = 0.9;
  file.characteristics.funnel = FunnelLevel::kMid;
  file.characteristics.vertical = Vertical::kRetail;
  file.characteristics.targeting_descriptor = "broad";
  file.characteristics.n_test_users = 2;
  file.log = SmallLog(GetParam());
  const std::string path =
      (std::filesystem::path(::testing::TempDir()) / "roundtrip.eventlog.gz").string();
  ASSERT_TRUE(WriteEventLogFile(path, file).ok());
  auto back = ReadEventLogFile(path);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->rct_id, file.rct_id);
  EXPECT_EQ(back->experiment_id, file.experiment_id);
  EXPECT_EQ(back->cost, file.cost);
  EXPECT_EQ(back->characteristics, file.characteristics);
  EXPECT_EQ(back->log, file.log);
  std::filesystem::remove(path);
}

INSTANTIATE_TEST_SUITE_P(Counterfactual, EventLogFileTest, ::testing::Bool());

TEST(EventLogFileErrorTest, MissingFile) {
  EXPECT_FALSE(ReadEventLogFile("/nonexistent/dir/log.gz").ok());
}

}  // namespace
}  // namespace pie
