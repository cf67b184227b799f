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
#ifndef PIE_EVENT_LOG_H_
#define PIE_EVENT_LOG_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "pie/types.h"

namespace pie {

// Times are whole seconds from the campaign start.
using Seconds = int64_t;

// Read-only view of one user's record inside an EventLog.
struct UserEvents {
  int64_t user_id = 0;
  bool assigned_test = false;  // Z
  bool exposed = false;        // W
  std::span<const Seconds> impression_times;
  std::span<const Seconds> click_times;
  std::span<const Seconds> conversion_times;
  // Conversion had the user been unexposed; only the simulator knows it.
  std::optional<bool> converted_counterfactual;

  bool converted() const { return !conversion_times.empty(); }
};

// Per-user assignment, exposure, click and conversion events for one RCT,
// stored column-wise with the variable-length lists flattened behind offset
// arrays.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(bool has_counterfactual)
      : has_counterfactual_(has_counterfactual) {}

  // Event lists must be sorted ascending. `converted_counterfactual` must be
  // set exactly when the log was constructed with counterfactuals.
  void AddUser(int64_t user_id, bool assigned_test, bool exposed,
               std::span<const Seconds> impression_times,
               std::span<const Seconds> click_times,
               std::span<const Seconds> conversion_times,
               std::optional<bool> converted_counterfactual = std::nullopt);

  void Reserve(size_t users);

  size_t size() const { return user_id_.size(); }
  bool empty() const { return user_id_.empty(); }
  bool has_counterfactual() const { return has_counterfactual_; }

  UserEvents user(size_t i) const;

  // One-sided non-compliance and event-ordering invariants:
  // Z=0 implies W=0, clicks imply W=1, impressions present iff W=1, and every
  // event list is sorted.
  absl::Status Validate() const;

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  friend class EventLogCodec;

  bool has_counterfactual_ = false;
  std::vector<int64_t> user_id_;
  std::vector<uint8_t> assigned_test_;
  std::vector<uint8_t> exposed_;
  std::vector<uint8_t> converted_counterfactual_;
  std::vector<uint64_t> impression_offsets_ = {0};
  std::vector<Seconds> impression_times_;
  std::vector<uint64_t> click_offsets_ = {0};
  std::vector<Seconds> click_times_;
  std::vector<uint64_t> conversion_offsets_ = {0};
  std::vector<Seconds> conversion_times_;
};

// Delay from the last click at or before the user's first conversion to that
// conversion; nullopt when the user did not convert or never clicked before
// converting. Last-click attribution within a window w counts a user iff the
// delay is <= WindowSeconds(w).
std::optional<Seconds> LastClickDelay(const UserEvents& user);

// Everything the estimators need to summarize one RCT from its log.
struct EventLogFile {
  std::string rct_id;
  std::string experiment_id;
  CampaignCharacteristics characteristics;
  double cost = 0.0;
  double planned_test_share = 0.9;
  EventLog log;
};

// Gzip-compressed columnar text. After a "#pie-eventlog v1" line and
// key=value metadata lines, each column is one line: "<name>:" followed by
// space-separated values. List columns are written as a count column plus a
// flattened value column.
absl::Status WriteEventLogFile(const std::string& path, const EventLogFile& file);
absl::StatusOr<EventLogFile> ReadEventLogFile(const std::string& path);

}  // namespace pie

#endif  // PIE_EVENT_LOG_H_
