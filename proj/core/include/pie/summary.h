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
#ifndef PIE_SUMMARY_H_
#define PIE_SUMMARY_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pie/schema.h"
#include "pie/types.h"

namespace pie {

// Relative tolerance for the redundant icpd / icpd_se cross-checks.
inline constexpr double kSummaryConsistencyTolerance = 1e-9;

// Returns `summary` unchanged when every record invariant holds; otherwise an
// InvalidArgument status naming the first violated invariant.
absl::StatusOr<RctSummary> ValidateSummary(
    RctSummary summary, const CategorySchema& schema = CategorySchema::Default());

// rct_summaries.csv column order.
const std::vector<std::string>& SummaryCsvColumns();

absl::Status WriteSummariesCsv(const std::string& path,
                               const std::vector<RctSummary>& summaries);

struct SummaryReadOptions {
  const CategorySchema* schema = nullptr;  // nullptr selects the default
  bool lenient_vertical = false;
};

// Reads and validates every row. Errors carry the row number and column.
// icpd and icpd_se are derived from (att, att_se, n_exposed, cost).
absl::StatusOr<std::vector<RctSummary>> ReadSummariesCsv(
    const std::string& path, const SummaryReadOptions& options = {});

}  // namespace pie

#endif  // PIE_SUMMARY_H_
