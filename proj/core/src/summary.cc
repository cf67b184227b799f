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
#include "pie/summary.h"

#include <cmath>
#include <fstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "pie/csv.h"

namespace pie {
namespace {

bool RelativelyEqual(double a, double b, double tol) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= tol * scale || std::abs(a - b) <= 1e-300;
}

absl::Status Violation(absl::string_view what) {
  return absl::InvalidArgumentError(what);
}

absl::Status CheckCharacteristics(const CampaignCharacteristics& c,
                                  const CategorySchema& schema) {
  if (!std::isfinite(c.budget) || c.budget <= 0.0) {
    return Violation("budget must be positive");
  }
  if (c.n_test_users < 1) return Violation("n_test_users must be at least 1");
  if (c.length_days < 1) return Violation("length_days must be positive");
  if (!std::isfinite(c.advertiser_experience) || c.advertiser_experience < 0.0) {
    return Violation("advertiser_experience must be nonnegative");
  }
  if (!(c.audience_retargeting_share >= 0.0 &&
        c.audience_retargeting_share <= 1.0)) {
    return Violation("audience_retargeting_share must be in [0, 1]");
  }
  for (auto [vocab, code, field] :
       {std::tuple{&schema.targeting_descriptor, &c.targeting_descriptor,
                   "targeting_descriptor"},
        std::tuple{&schema.bidding_strategy, &c.bidding_strategy,
                   "bidding_strategy"},
        std::tuple{&schema.optimization_setting, &c.optimization_setting,
                   "optimization_setting"},
        std::tuple{&schema.campaign_objective, &c.campaign_objective,
                   "campaign_objective"}}) {
    auto index = CategorySchema::CodeIndex(*vocab, *code, field);
    if (!index.ok()) return index.status();
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<RctSummary> ValidateSummary(RctSummary s,
                                           const CategorySchema& schema) {
  if (s.rct_id.empty()) return Violation("rct_id must be nonempty");
  if (!std::isfinite(s.cost) || s.cost <= 0.0) {
    return Violation("cost must be positive");
  }
  if (s.n_exposed < 0) return Violation("n_exposed must be nonnegative");
  if (!std::isfinite(s.att)) return Violation("att must be finite");
  if (!std::isfinite(s.att_se) || s.att_se < 0.0) {
    return Violation("att_se must be nonnegative");
  }
  if (!std::isfinite(s.icpd_se) || s.icpd_se < 0.0) {
    return Violation("icpd_se must be nonnegative");
  }
  const double scale = static_cast<double>(s.n_exposed) / s.cost;
  if (!RelativelyEqual(s.icpd, s.att * scale, kSummaryConsistencyTolerance)) {
    return Violation("icpd inconsistent with att * n_exposed / cost");
  }
  if (!RelativelyEqual(s.icpd_se, s.att_se * scale,
                       kSummaryConsistencyTolerance)) {
    return Violation("icpd_se inconsistent with att_se * n_exposed / cost");
  }
  for (double v : s.lcpd) {
    if (!std::isfinite(v) || v < 0.0) return Violation("lcpd must be nonnegative");
  }
  for (size_t i = 1; i < s.lcpd.size(); ++i) {
    if (s.lcpd[i] < s.lcpd[i - 1]) return Violation("lcpd not monotone in window");
  }
  if (!(s.randomization_p >= 0.0 && s.randomization_p <= 1.0)) {
    return Violation("randomization_p must be in [0, 1]");
  }
  if (auto status = CheckCharacteristics(s.characteristics, schema);
      !status.ok()) {
    return status;
  }
  return s;
}

const std::vector<std::string>& SummaryCsvColumns() {
  static const auto* const kColumns = new std::vector<std::string>{
      "rct_id",
      "experiment_id",
      "funnel",
      "vertical",
      "targeting_descriptor",
      "bidding_strategy",
      "optimization_setting",
      "advertiser_experience",
      "campaign_objective",
      "audience_retargeting_share",
      "n_test_users",
      "budget",
      "length_days",
      "cost",
      "n_exposed",
      "att",
      "att_se",
      "lcpd_1h",
      "lcpd_1d",
      "lcpd_7d",
      "lcpd_28d",
      "randomization_p"};
  return *kColumns;
}

absl::Status WriteSummariesCsv(const std::string& path,
                               const std::vector<RctSummary>& summaries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << CsvLine(SummaryCsvColumns()) << '\n';
  for (const RctSummary& s : summaries) {
    const CampaignCharacteristics& c = s.characteristics;
    out << CsvLine({s.rct_id,
                    s.experiment_id,
                    std::string(FunnelName(c.funnel)),
                    std::string(VerticalName(c.vertical)),
                    c.targeting_descriptor,
                    c.bidding_strategy,
                    c.optimization_setting,
                    FormatDouble(c.advertiser_experience),
                    c.campaign_objective,
                    FormatDouble(c.audience_retargeting_share),
                    absl::StrCat(c.n_test_users),
                    FormatDouble(c.budget),
                    absl::StrCat(c.length_days),
                    FormatDouble(s.cost),
                    absl::StrCat(s.n_exposed),
                    FormatDouble(s.att),
                    FormatDouble(s.att_se),
                    FormatDouble(s.lcpd[0]),
                    FormatDouble(s.lcpd[1]),
                    FormatDouble(s.lcpd[2]),
                    FormatDouble(s.lcpd[3]),
                    FormatDouble(s.randomization_p)})
        << '\n';
  }
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<RctSummary>> ReadSummariesCsv(
    const std::string& path, const SummaryReadOptions& options) {
  const CategorySchema& schema =
      options.schema != nullptr ? *options.schema : CategorySchema::Default();
  auto table = CsvTable::ReadFile(path);
  if (!table.ok()) return table.status();

  std::vector<size_t> col;
  for (const std::string& name : SummaryCsvColumns()) {
    auto index = table->RequireColumn(name);
    if (!index.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": ", index.status().message()));
    }
    col.push_back(*index);
  }
  // Ingested data may carry the per-dollar form as well; it is cross-checked.
  const auto icpd_col = table->ColumnIndex("icpd");
  const auto icpd_se_col = table->ColumnIndex("icpd_se");

  std::vector<RctSummary> out;
  out.reserve(table->num_rows());
  for (size_t r = 0; r < table->num_rows(); ++r) {
    auto fail = [&](const absl::Status& status) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": ", status.message()));
    };
    auto located = [&](size_t c, const absl::Status& status) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%s: row %d, column %s: %s", path, r + 1, table->header()[c],
          status.message()));
    };
    RctSummary s;
    CampaignCharacteristics& c = s.characteristics;
    s.rct_id = table->GetString(r, col[0]);
    s.experiment_id = table->GetString(r, col[1]);
    auto funnel = ParseFunnel(table->GetString(r, col[2]));
    if (!funnel.ok()) return located(col[2], funnel.status());
    c.funnel = *funnel;
    auto vertical =
        ParseVertical(table->GetString(r, col[3]), options.lenient_vertical);
    if (!vertical.ok()) return located(col[3], vertical.status());
    c.vertical = *vertical;
    c.targeting_descriptor = table->GetString(r, col[4]);
    c.bidding_strategy = table->GetString(r, col[5]);
    c.optimization_setting = table->GetString(r, col[6]);
    c.campaign_objective = table->GetString(r, col[8]);

    auto get_double = [&](size_t c_index, double& out_value) -> absl::Status {
      auto v = table->GetDouble(r, c_index);
      if (!v.ok()) return v.status();
      out_value = *v;
      return absl::OkStatus();
    };
    auto get_int = [&](size_t c_index, int64_t& out_value) -> absl::Status {
      auto v = table->GetInt(r, c_index);
      if (!v.ok()) return v.status();
      out_value = *v;
      return absl::OkStatus();
    };
    for (absl::Status st :
         {get_double(col[7], c.advertiser_experience),
          get_double(col[9], c.audience_retargeting_share),
          get_int(col[10], c.n_test_users), get_double(col[11], c.budget),
          get_int(col[12], c.length_days), get_double(col[13], s.cost),
          get_int(col[14], s.n_exposed), get_double(col[15], s.att),
          get_double(col[16], s.att_se), get_double(col[17], s.lcpd[0]),
          get_double(col[18], s.lcpd[1]), get_double(col[19], s.lcpd[2]),
          get_double(col[20], s.lcpd[3]),
          get_double(col[21], s.randomization_p)}) {
      if (!st.ok()) return fail(st);
    }
    if (s.cost > 0.0) {
      const auto n_exposed = static_cast<double>(s.n_exposed);
      s.icpd = s.att * n_exposed / s.cost;
      s.icpd_se = s.att_se * n_exposed / s.cost;
    }
    if (icpd_col) {
      if (auto st = get_double(*icpd_col, s.icpd); !st.ok()) return fail(st);
    }
    if (icpd_se_col) {
      if (auto st = get_double(*icpd_se_col, s.icpd_se); !st.ok()) {
        return fail(st);
      }
    }
    auto valid = ValidateSummary(std::move(s), schema);
    if (!valid.ok()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%s: row %d (%s): %s", path, r + 1, table->GetString(r, col[0]),
          valid.status().message()));
    }
    out.push_back(*std::move(valid));
  }
  return out;
}

}  // namespace pie
