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
#include "pie/features.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace pie {
namespace {

std::array<double, 5> NumericValues(const CampaignCharacteristics& c) {
  return {c.advertiser_experience, c.audience_retargeting_share,
          static_cast<double>(c.n_test_users), c.budget,
          static_cast<double>(c.length_days)};
}

constexpr std::array<const char*, 5> kNumericNames = {
    "advertiser_experience", "audience_retargeting_share", "n_test_users",
    "budget", "length_days"};

std::vector<std::string> FunnelNames() {
  std::vector<std::string> out;
  for (FunnelLevel f : kAllFunnels) out.emplace_back(FunnelName(f));
  return out;
}

std::vector<std::string> VerticalNames() {
  std::vector<std::string> out;
  for (Vertical v : kAllVerticals) out.emplace_back(VerticalName(v));
  return out;
}

}  // namespace

FeatureRecord ToFeatureRecord(const RctSummary& summary,
                              const CategorySchema& schema) {
  return FeatureRecord{.schema_version = schema.version,
                       .lcpd = summary.lcpd,
                       .characteristics = summary.characteristics};
}

absl::StatusOr<FeatureEncoder> FeatureEncoder::Fit(
    std::span<const FeatureRecord> training, const CategorySchema& schema,
    FeatureSet set, CategoricalEncoding encoding) {
  FeatureEncoder enc;
  enc.schema_ = schema;
  enc.set_ = set;
  enc.encoding_ = encoding;
  for (AttributionWindow w : kAllWindows) {
    enc.names_.push_back(absl::StrCat("lcpd_", WindowName(w)));
  }
  if (set == FeatureSet::kM1) return enc;

  const size_t skip = encoding == CategoricalEncoding::kDropReference ? 1 : 0;
  auto add_block = [&](absl::string_view factor,
                       const std::vector<std::string>& levels) {
    for (size_t i = skip; i < levels.size(); ++i) {
      enc.names_.push_back(absl::StrCat(factor, "=", levels[i]));
    }
  };
  add_block("funnel", FunnelNames());
  add_block("vertical", VerticalNames());
  add_block("targeting_descriptor", schema.targeting_descriptor);
  add_block("bidding_strategy", schema.bidding_strategy);
  add_block("optimization_setting", schema.optimization_setting);
  add_block("campaign_objective", schema.campaign_objective);
  for (const char* name : kNumericNames) enc.names_.emplace_back(name);

  if (!training.empty()) {
    const auto n = static_cast<double>(training.size());
    std::array<double, 5> sum = {}, sum_sq = {};
    for (const FeatureRecord& r : training) {
      const auto values = NumericValues(r.characteristics);
      for (size_t j = 0; j < 5; ++j) sum[j] += values[j];
    }
    for (size_t j = 0; j < 5; ++j) enc.numeric_mean_[j] = sum[j] / n;
    for (const FeatureRecord& r : training) {
      const auto values = NumericValues(r.characteristics);
      for (size_t j = 0; j < 5; ++j) {
        const double d = values[j] - enc.numeric_mean_[j];
        sum_sq[j] += d * d;
      }
    }
    for (size_t j = 0; j < 5; ++j) {
      const double sd = std::sqrt(sum_sq[j] / n);
      enc.numeric_scale_[j] = sd > 0.0 ? sd : 1.0;
    }
  }
  return enc;
}

absl::Status FeatureEncoder::Encode(const FeatureRecord& record,
                                    std::span<double> out) const {
  if (record.schema_version != schema_.version) {
    return absl::FailedPreconditionError(
        absl::StrCat("feature schema mismatch: model uses '", schema_.version,
                     "', record has '", record.schema_version, "'"));
  }
  if (out.size() != names_.size()) {
    return absl::InvalidArgumentError("feature buffer has the wrong size");
  }
  for (size_t k = 0; k < 4; ++k) out[k] = record.lcpd[k];
  if (set_ == FeatureSet::kM1) return absl::OkStatus();

  const CampaignCharacteristics& c = record.characteristics;
  const bool drop = encoding_ == CategoricalEncoding::kDropReference;
  size_t pos = 4;
  auto one_hot = [&](int level, size_t n_levels) {
    const size_t first = drop ? 1 : 0;
    for (size_t i = first; i < n_levels; ++i) {
      out[pos++] = static_cast<int>(i) == level ? 1.0 : 0.0;
    }
  };
  one_hot(static_cast<int>(c.funnel), kAllFunnels.size());
  one_hot(static_cast<int>(c.vertical), kAllVerticals.size());
  for (auto [vocab, code, field] :
       {std::tuple{&schema_.targeting_descriptor, &c.targeting_descriptor,
                   "targeting_descriptor"},
        std::tuple{&schema_.bidding_strategy, &c.bidding_strategy,
                   "bidding_strategy"},
        std::tuple{&schema_.optimization_setting, &c.optimization_setting,
                   "optimization_setting"},
        std::tuple{&schema_.campaign_objective, &c.campaign_objective,
                   "campaign_objective"}}) {
    auto level = CategorySchema::CodeIndex(*vocab, *code, field);
    if (!level.ok()) return level.status();
    one_hot(*level, vocab->size());
  }
  const auto values = NumericValues(c);
  for (size_t j = 0; j < 5; ++j) {
    out[pos++] = (values[j] - numeric_mean_[j]) / numeric_scale_[j];
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> FeatureEncoder::EncodeAll(
    std::span<const FeatureRecord> records) const {
  const size_t p = num_features();
  std::vector<double> matrix(records.size() * p);
  for (size_t i = 0; i < records.size(); ++i) {
    if (auto s = Encode(records[i], std::span<double>(matrix.data() + i * p, p));
        !s.ok()) {
      return s;
    }
  }
  return matrix;
}

nlohmann::json FeatureEncoder::ToJson() const {
  return {{"schema", nlohmann::json::parse(schema_.ToJson())},
          {"feature_set", set_ == FeatureSet::kM1 ? "m1" : "m2"},
          {"encoding", encoding_ == CategoricalEncoding::kFullOneHot
                           ? "full_one_hot"
                           : "drop_reference"},
          {"names", names_},
          {"numeric_mean", numeric_mean_},
          {"numeric_scale", numeric_scale_}};
}

absl::StatusOr<FeatureEncoder> FeatureEncoder::FromJson(const nlohmann::json& doc) {
  try {
    auto schema = CategorySchema::FromJson(doc.at("schema").dump());
    if (!schema.ok()) return schema.status();
    const std::string set = doc.at("feature_set").get<std::string>();
    const std::string encoding = doc.at("encoding").get<std::string>();
    auto enc = Fit({}, *schema, set == "m1" ? FeatureSet::kM1 : FeatureSet::kM2,
                   encoding == "full_one_hot" ? CategoricalEncoding::kFullOneHot
                                              : CategoricalEncoding::kDropReference);
    if (!enc.ok()) return enc.status();
    enc->numeric_mean_ = doc.at("numeric_mean").get<std::array<double, 5>>();
    enc->numeric_scale_ = doc.at("numeric_scale").get<std::array<double, 5>>();
    if (doc.at("names").get<std::vector<std::string>>() != enc->names_) {
      return absl::InvalidArgumentError("feature names do not match the schema");
    }
    return enc;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("feature encoder: ", e.what()));
  }
}

}  // namespace pie
