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
#include "pie/model.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "pie/folds.h"
#include "pie/random.h"

namespace pie {
namespace {

constexpr std::array<absl::string_view, 12> kSpecNames = {
    "raw-lc1h", "raw-lc1d", "raw-lc7d", "raw-lc28d", "cf-lc1h", "cf-lc1d",
    "cf-lc7d",  "cf-lc28d", "lm-m1",    "lm-m2",     "rf-m1",   "rf-m2"};

absl::Status CheckTrainingData(const TrainingData& data) {
  if (data.target.size() != data.size() || data.weight.size() != data.size()) {
    return absl::InvalidArgumentError("features, targets and weights differ in length");
  }
  if (data.size() == 0) return absl::InvalidArgumentError("no training records");
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data.target[i])) {
      return absl::InvalidArgumentError("training targets must be finite");
    }
    if (!(data.weight[i] >= 0.0) || !std::isfinite(data.weight[i])) {
      return absl::InvalidArgumentError("weights must be finite and nonnegative");
    }
    total += data.weight[i];
  }
  if (!(total > 0.0)) return absl::InvalidArgumentError("total weight is zero");
  return absl::OkStatus();
}

nlohmann::json CalibrationToJson(const CalibrationFit& fit) {
  return {{"theta", fit.theta}, {"se", fit.se}, {"n", fit.n}};
}

CalibrationFit CalibrationFromJson(const nlohmann::json& doc) {
  return CalibrationFit{.theta = doc.at("theta").get<double>(),
                        .se = doc.at("se").get<double>(),
                        .n = doc.at("n").get<size_t>()};
}

nlohmann::json TreeParamsToJson(const TreeParams& p) {
  return {{"features_per_split", p.features_per_split},
          {"min_leaf_fraction", p.min_leaf_fraction},
          {"max_depth", p.max_depth},
          {"bootstrap", p.bootstrap}};
}

TreeParams TreeParamsFromJson(const nlohmann::json& doc) {
  return TreeParams{.features_per_split = doc.at("features_per_split").get<int>(),
                    .min_leaf_fraction = doc.at("min_leaf_fraction").get<double>(),
                    .max_depth = doc.at("max_depth").get<int>(),
                    .bootstrap = doc.at("bootstrap").get<bool>()};
}

absl::StatusOr<CalibrationParams> FitCalibrationParams(ModelSpec spec,
                                                       const TrainingData& data,
                                                       const ModelOptions& options) {
  const int k = WindowIndex(*SpecWindow(spec));
  auto subset = [&](std::optional<FunnelLevel> funnel) {
    std::vector<double> x, y, w;
    for (size_t i = 0; i < data.size(); ++i) {
      if (funnel && data.features[i].characteristics.funnel != *funnel) continue;
      x.push_back(data.features[i].lcpd[static_cast<size_t>(k)]);
      y.push_back(data.target[i]);
      w.push_back(options.weighted_calibration ? data.weight[i] : 1.0);
    }
    return FitCalibration(x, y, w);
  };
  CalibrationParams params;
  auto pooled = subset(std::nullopt);
  if (!pooled.ok()) return pooled.status();
  params.pooled = *pooled;
  if (options.per_funnel_calibration) {
    for (FunnelLevel f : kAllFunnels) {
      auto fit = subset(f);
      if (fit.ok()) params.by_funnel[f] = *fit;
    }
  }
  return params;
}

}  // namespace

absl::string_view ModelSpecName(ModelSpec spec) {
  return kSpecNames[static_cast<size_t>(spec)];
}

absl::StatusOr<ModelSpec> ParseModelSpec(absl::string_view text) {
  for (ModelSpec spec : kAllModelSpecs) {
    if (ModelSpecName(spec) == text) return spec;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown model '", text, "'"));
}

ModelFamily Family(ModelSpec spec) {
  switch (spec) {
    case ModelSpec::kRawLc1h:
    case ModelSpec::kRawLc1d:
    case ModelSpec::kRawLc7d:
    case ModelSpec::kRawLc28d:
      return ModelFamily::kRaw;
    case ModelSpec::kCfLc1h:
    case ModelSpec::kCfLc1d:
    case ModelSpec::kCfLc7d:
    case ModelSpec::kCfLc28d:
      return ModelFamily::kCalibration;
    case ModelSpec::kLmM1:
    case ModelSpec::kLmM2:
      return ModelFamily::kLinear;
    case ModelSpec::kRfM1:
    case ModelSpec::kRfM2:
      return ModelFamily::kForest;
  }
  return ModelFamily::kRaw;
}

std::optional<AttributionWindow> SpecWindow(ModelSpec spec) {
  const auto index = static_cast<int>(spec);
  if (index < 8) return kAllWindows[static_cast<size_t>(index % 4)];
  return std::nullopt;
}

FeatureSet SpecFeatureSet(ModelSpec spec) {
  return spec == ModelSpec::kLmM2 || spec == ModelSpec::kRfM2 ? FeatureSet::kM2
                                                              : FeatureSet::kM1;
}

bool HasHyperparameters(ModelSpec spec) { return Family(spec) == ModelFamily::kForest; }

std::vector<int> InnerFolds(std::span<const int> strata, int k, uint64_t fit_seed) {
  return StratifiedFolds(strata, k, CvFoldSeed(DeriveSeed(fit_seed, {kStageFolds})));
}

std::vector<double> LinearDesignRow(std::span<const double> encoded,
                                    const FeatureEncoder& encoder) {
  std::vector<double> row(encoded.begin(), encoded.end());
  if (encoder.feature_set() == FeatureSet::kM2) {
    for (size_t k = 0; k < 4; ++k) {
      for (size_t j = encoder.pre_begin(); j < encoder.pre_end(); ++j) {
        row.push_back(encoded[k] * encoded[j]);
      }
    }
  }
  return row;
}

std::vector<std::string> LinearTermNames(const FeatureEncoder& encoder) {
  const auto& names = encoder.names();
  std::vector<std::string> terms = {"(intercept)"};
  terms.insert(terms.end(), names.begin(), names.end());
  if (encoder.feature_set() == FeatureSet::kM2) {
    for (size_t k = 0; k < 4; ++k) {
      for (size_t j = encoder.pre_begin(); j < encoder.pre_end(); ++j) {
        terms.push_back(absl::StrCat(names[k], ":", names[j]));
      }
    }
  }
  return terms;
}

absl::StatusOr<TrainedModel> FitModel(ModelSpec spec, const TrainingData& data,
                                      const CategorySchema& schema,
                                      const ModelOptions& options, uint64_t seed) {
  if (auto s = CheckTrainingData(data); !s.ok()) return s;
  for (const FeatureRecord& r : data.features) {
    if (r.schema_version != schema.version) {
      return absl::FailedPreconditionError(
          absl::StrCat("feature schema mismatch: expected '", schema.version,
                       "', record has '", r.schema_version, "'"));
    }
  }
  const ModelFamily family = Family(spec);
  const CategoricalEncoding encoding = family == ModelFamily::kLinear
                                           ? CategoricalEncoding::kDropReference
                                           : CategoricalEncoding::kFullOneHot;
  auto encoder = FeatureEncoder::Fit(data.features, schema, SpecFeatureSet(spec), encoding);
  if (!encoder.ok()) return encoder.status();

  TrainedModel model;
  model.spec_ = spec;
  model.encoder_ = *std::move(encoder);

  switch (family) {
    case ModelFamily::kRaw:
      model.params_ = RawParams{};
      return model;
    case ModelFamily::kCalibration: {
      auto params = FitCalibrationParams(spec, data, options);
      if (!params.ok()) return params.status();
      model.params_ = *std::move(params);
      return model;
    }
    case ModelFamily::kLinear: {
      auto encoded = model.encoder_.EncodeAll(data.features);
      if (!encoded.ok()) return encoded.status();
      const size_t p = model.encoder_.num_features();
      std::vector<double> design;
      size_t q = 0;
      for (size_t i = 0; i < data.size(); ++i) {
        const std::vector<double> row = LinearDesignRow(
            std::span<const double>(encoded->data() + i * p, p), model.encoder_);
        q = row.size();
        design.insert(design.end(), row.begin(), row.end());
      }
      if (data.size() < q + 2) {
        return absl::FailedPreconditionError(absl::StrCat(
            ModelSpecName(spec), " needs at least ", q + 2, " records, got ",
            data.size()));
      }
      auto beta = FitWeightedLeastSquares(design, q, data.target, data.weight, true);
      if (!beta.ok()) return beta.status();
      model.params_ = LinearParams{.terms = LinearTermNames(model.encoder_),
                                   .coefficients = *std::move(beta)};
      return model;
    }
    case ModelFamily::kForest: {
      const ForestOptions& fo = options.forest;
      if (fo.n_trees < 1) return absl::InvalidArgumentError("n_trees must be positive");
      auto encoded = model.encoder_.EncodeAll(data.features);
      if (!encoded.ok()) return encoded.status();
      const size_t p = model.encoder_.num_features();
      const ForestData forest_data(*std::move(encoded), p, data.target);
      ForestParams params;
      if (fo.tune) {
        if (data.size() < 20) {
          return absl::FailedPreconditionError(absl::StrCat(
              "forest tuning needs at least 20 records, got ", data.size()));
        }
        std::vector<int> strata;
        for (const FeatureRecord& r : data.features) {
          strata.push_back(static_cast<int>(r.characteristics.funnel));
        }
        auto tuned = TuneForest(forest_data, data.weight, strata, fo,
                                DeriveSeed(seed, {kStageFolds}));
        if (!tuned.ok()) return tuned.status();
        params.chosen = tuned->best;
        params.candidates = std::move(tuned->candidates);
      } else {
        const int k = fo.features_per_split > 0
                          ? fo.features_per_split
                          : static_cast<int>(std::ceil(static_cast<double>(p) / 3.0));
        params.chosen = TreeParams{.features_per_split = k,
                                   .min_leaf_fraction = fo.min_leaf_fraction,
                                   .max_depth = fo.max_depth,
                                   .bootstrap = fo.bootstrap};
      }
      params.forest =
          RandomForest::Fit(forest_data, data.weight, params.chosen, fo.n_trees, seed);
      model.params_ = std::move(params);
      return model;
    }
  }
  return absl::InternalError("unhandled model family");
}

absl::StatusOr<double> TrainedModel::Predict(const FeatureRecord& record) const {
  std::vector<double> x(encoder_.num_features());
  if (auto s = encoder_.Encode(record, x); !s.ok()) return s;
  if (std::holds_alternative<RawParams>(params_)) {
    return record.lcpd[static_cast<size_t>(WindowIndex(*SpecWindow(spec_)))];
  }
  if (const auto* cf = std::get_if<CalibrationParams>(&params_)) {
    auto it = cf->by_funnel.find(record.characteristics.funnel);
    const double theta = it == cf->by_funnel.end() ? cf->pooled.theta : it->second.theta;
    return theta * record.lcpd[static_cast<size_t>(WindowIndex(*SpecWindow(spec_)))];
  }
  if (const auto* lm = std::get_if<LinearParams>(&params_)) {
    const std::vector<double> row = LinearDesignRow(x, encoder_);
    if (row.size() + 1 != lm->coefficients.size()) {
      return absl::InternalError("coefficient count does not match the design");
    }
    double y = lm->coefficients[0];
    for (size_t j = 0; j < row.size(); ++j) y += lm->coefficients[j + 1] * row[j];
    return y;
  }
  return std::get<ForestParams>(params_).forest.Predict(x);
}

nlohmann::json TrainedModel::ToJson() const {
  nlohmann::json params;
  if (const auto* cf = std::get_if<CalibrationParams>(&params_)) {
    params["pooled"] = CalibrationToJson(cf->pooled);
    params["by_funnel"] = nlohmann::json::object();
    for (const auto& [funnel, fit] : cf->by_funnel) {
      params["by_funnel"][std::string(FunnelName(funnel))] = CalibrationToJson(fit);
    }
  } else if (const auto* lm = std::get_if<LinearParams>(&params_)) {
    params["terms"] = lm->terms;
    params["coefficients"] = lm->coefficients;
  } else if (const auto* rf = std::get_if<ForestParams>(&params_)) {
    params["chosen"] = TreeParamsToJson(rf->chosen);
    params["candidates"] = nlohmann::json::array();
    for (const CandidateScore& c : rf->candidates) {
      nlohmann::json entry = TreeParamsToJson(c.params);
      entry["cv_wrmse"] = c.cv_wrmse;
      params["candidates"].push_back(entry);
    }
    params["trees"] = rf->forest.ToJson();
  } else {
    params = nlohmann::json::object();
  }
  return {{"format", std::string(kModelFileFormat)},
          {"spec", std::string(ModelSpecName(spec_))},
          {"features", encoder_.ToJson()},
          {"params", params}};
}

absl::StatusOr<TrainedModel> TrainedModel::FromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kModelFileFormat) {
      return absl::InvalidArgumentError(
          absl::StrCat("unsupported model format '", doc.at("format").get<std::string>(),
                       "'"));
    }
    auto spec = ParseModelSpec(doc.at("spec").get<std::string>());
    if (!spec.ok()) return spec.status();
    auto encoder = FeatureEncoder::FromJson(doc.at("features"));
    if (!encoder.ok()) return encoder.status();
    TrainedModel model;
    model.spec_ = *spec;
    model.encoder_ = *std::move(encoder);
    const nlohmann::json& params = doc.at("params");
    switch (Family(*spec)) {
      case ModelFamily::kRaw:
        model.params_ = RawParams{};
        break;
      case ModelFamily::kCalibration: {
        CalibrationParams cf;
        cf.pooled = CalibrationFromJson(params.at("pooled"));
        for (const auto& [name, fit] : params.at("by_funnel").items()) {
          auto funnel = ParseFunnel(name);
          if (!funnel.ok()) return funnel.status();
          cf.by_funnel[*funnel] = CalibrationFromJson(fit);
        }
        model.params_ = std::move(cf);
        break;
      }
      case ModelFamily::kLinear: {
        LinearParams lm{.terms = params.at("terms").get<std::vector<std::string>>(),
                        .coefficients = params.at("coefficients").get<std::vector<double>>()};
        if (lm.terms != LinearTermNames(model.encoder_) ||
            lm.coefficients.size() != lm.terms.size()) {
          return absl::InvalidArgumentError("linear terms do not match the features");
        }
        model.params_ = std::move(lm);
        break;
      }
      case ModelFamily::kForest: {
        ForestParams rf;
        rf.chosen = TreeParamsFromJson(params.at("chosen"));
        for (const auto& c : params.at("candidates")) {
          rf.candidates.push_back({TreeParamsFromJson(c), c.at("cv_wrmse").get<double>()});
        }
        auto forest = RandomForest::FromJson(params.at("trees"));
        if (!forest.ok()) return forest.status();
        for (const RegressionTree& t : forest->trees()) {
          for (const RegressionTree::Node& nd : t.nodes()) {
            if (nd.feature >= static_cast<int32_t>(model.encoder_.num_features())) {
              return absl::InvalidArgumentError("tree splits on an unknown feature");
            }
          }
        }
        rf.forest = *std::move(forest);
        model.params_ = std::move(rf);
        break;
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("model file: ", e.what()));
  }
}

absl::Status TrainedModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << ToJson().dump() << '\n';
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<TrainedModel> TrainedModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": not valid JSON"));
  }
  return FromJson(doc);
}

}  // namespace pie
