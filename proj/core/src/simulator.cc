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
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "nlohmann/json.hpp"
#include "pie/random.h"

namespace pie {
namespace {

using nlohmann::json;

constexpr Seconds kDay = 86400;

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

double Logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double DrawLogNormal(const LogNormalSpec& spec, Rng& rng) {
  if (spec.log_sd == 0.0) return spec.median;
  std::normal_distribution<double> normal(0.0, spec.log_sd);
  return spec.median * std::exp(normal(rng));
}

double DrawBeta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  if (x + y == 0.0) return a / (a + b);
  return x / (x + y);
}

Seconds DrawExponentialSeconds(double mean, Rng& rng) {
  return static_cast<Seconds>(std::llround(-mean * std::log1p(-Uniform01(rng))));
}

template <size_t N>
size_t DrawIndex(const std::array<double, N>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = Uniform01(rng) * total;
  for (size_t i = 0; i < N; ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return N - 1;
}

// Multiplicative effects of campaign characteristics on the data-generating
// process. Indexed by vertical and by vocabulary position in the default
// schema.
struct Effects {
  double lift = 1.0;
  double organic = 1.0;
  double click = 1.0;
  double click_driven = 1.0;
  double harvest = 1.0;
};

constexpr std::array<double, 7> kVerticalWeights = {0.25, 0.17, 0.10, 0.10,
                                                     0.10, 0.13, 0.15};
constexpr std::array<double, 7> kVerticalLift = {1.25, 0.8, 1.1, 0.9,
                                                  1.15, 1.0, 0.95};
constexpr std::array<double, 7> kVerticalClickDriven = {1.08, 0.65, 0.92, 0.92,
                                                         1.0,  1.3,  0.92};
constexpr std::array<double, 4> kTargetingLift = {0.9, 1.1, 1.0, 1.0};
constexpr std::array<double, 4> kTargetingOrganic = {0.85, 1.0, 1.4, 0.95};
constexpr std::array<double, 4> kOptimizationWeights = {0.4, 0.2, 0.2, 0.2};
constexpr std::array<double, 4> kOptimizationLift = {1.35, 1.0, 0.9, 0.7};
constexpr std::array<double, 4> kOptimizationClick = {1.0, 1.6, 1.3, 0.6};
constexpr std::array<double, 4> kObjectiveWeights = {0.4, 0.2, 0.2, 0.2};
constexpr std::array<double, 4> kObjectiveLift = {1.15, 1.05, 0.95, 0.8};
constexpr std::array<double, 6> kLengthDays = {7, 14, 21, 28, 35, 42};
constexpr std::array<double, 6> kLengthWeights = {0.08, 0.14, 0.14, 0.34, 0.12,
                                                   0.18};

struct ExperimentDraw {
  CampaignCharacteristics characteristics;
  std::array<int, 4> codes = {0, 0, 0, 0};  // targeting, bidding, opt, objective
};

ExperimentDraw DrawExperiment(const SimulationConfig& cfg,
                              int64_t experiment_index) {
  Rng rng(DeriveSeed(cfg.seed, {kStageSimulation, 1,
                                static_cast<uint64_t>(experiment_index)}));
  const CategorySchema& schema = CategorySchema::Default();
  ExperimentDraw draw;
  CampaignCharacteristics& c = draw.characteristics;
  c.vertical = kAllVerticals[DrawIndex(kVerticalWeights, rng)];
  draw.codes[0] = static_cast<int>(Uniform01(rng) * 4);
  draw.codes[1] = static_cast<int>(Uniform01(rng) * 4);
  draw.codes[2] = static_cast<int>(DrawIndex(kOptimizationWeights, rng));
  draw.codes[3] = static_cast<int>(DrawIndex(kObjectiveWeights, rng));
  c.targeting_descriptor = schema.targeting_descriptor[draw.codes[0]];
  c.bidding_strategy = schema.bidding_strategy[draw.codes[1]];
  c.optimization_setting = schema.optimization_setting[draw.codes[2]];
  c.campaign_objective = schema.campaign_objective[draw.codes[3]];
  std::gamma_distribution<double> experience(2.0, 1.5);
  c.advertiser_experience = experience(rng);
  c.audience_retargeting_share = DrawBeta(1.2, 3.0, rng);
  c.length_days = static_cast<int64_t>(kLengthDays[DrawIndex(kLengthWeights, rng)]);
  return draw;
}

Effects ComputeEffects(const SimulationConfig& cfg, const ExperimentDraw& draw) {
  Effects e;
  if (!cfg.characteristic_effects) return e;
  const CampaignCharacteristics& c = draw.characteristics;
  const int v = static_cast<int>(c.vertical);
  const double retarget = c.audience_retargeting_share - 0.3;
  e.lift = kVerticalLift[v] * kTargetingLift[draw.codes[0]] *
           kOptimizationLift[draw.codes[2]] * kObjectiveLift[draw.codes[3]] *
           std::exp(std::clamp(0.08 * (c.advertiser_experience - 3.0), -0.5, 0.5));
  e.organic = kTargetingOrganic[draw.codes[0]] * std::exp(1.5 * retarget);
  e.click = kOptimizationClick[draw.codes[2]];
  e.click_driven = kVerticalClickDriven[v];
  e.harvest = std::exp(1.0 * retarget);
  return e;
}

// Intercept of the exposure logit that makes the mean exposure propensity
// over `standardized` equal `target`.
double CalibrateExposureIntercept(const std::vector<double>& standardized,
                                  double slope, double target) {
  double lo = -30.0, hi = 30.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    double mean = 0.0;
    for (double z : standardized) mean += Logistic(mid + slope * z);
    mean /= static_cast<double>(standardized.size());
    if (mean < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

template <typename T>
absl::Status ReadField(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return absl::OkStatus();
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config field '", key, "': ", e.what()));
  }
  return absl::OkStatus();
}

absl::Status ReadLogNormal(const json& doc, const char* key, LogNormalSpec& out) {
  if (!doc.contains(key)) return absl::OkStatus();
  const json& v = doc.at(key);
  if (v.is_number()) {
    out = LogNormalSpec{v.get<double>(), 0.0};
    return absl::OkStatus();
  }
  if (!v.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config field '", key, "' must be a number or object"));
  }
  if (auto s = ReadField(v, "median", out.median); !s.ok()) return s;
  return ReadField(v, "log_sd", out.log_sd);
}

json LogNormalJson(const LogNormalSpec& spec) {
  return {{"median", spec.median}, {"log_sd", spec.log_sd}};
}

template <typename T>
json FunnelJson(const PerFunnel<T>& values) {
  json out = json::object();
  for (FunnelLevel f : kAllFunnels) {
    if constexpr (std::is_same_v<T, LogNormalSpec>) {
      out[std::string(FunnelName(f))] = LogNormalJson(values[static_cast<int>(f)]);
    } else {
      out[std::string(FunnelName(f))] = values[static_cast<int>(f)];
    }
  }
  return out;
}

template <typename T>
absl::Status ReadFunnel(const json& doc, const char* key, PerFunnel<T>& out) {
  if (!doc.contains(key)) return absl::OkStatus();
  const json& v = doc.at(key);
  if (!v.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config field '", key, "' must map funnel names"));
  }
  for (auto it = v.begin(); it != v.end(); ++it) {
    auto funnel = ParseFunnel(it.key());
    if (!funnel.ok()) return funnel.status();
    if constexpr (std::is_same_v<T, LogNormalSpec>) {
      json wrapper = {{"x", it.value()}};
      if (auto s = ReadLogNormal(wrapper, "x", out[static_cast<int>(*funnel)]);
          !s.ok()) {
        return s;
      }
    } else {
      if (!it.value().is_number()) {
        return absl::InvalidArgumentError(
            absl::StrCat("config field '", key, "' values must be numbers"));
      }
      out[static_cast<int>(*funnel)] = it.value().get<double>();
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status SimulationConfig::Validate() const {
  auto bad = [](absl::string_view what) {
    return absl::InvalidArgumentError(absl::StrCat("invalid config: ", what));
  };
  if (n_rcts < 1) return bad("n_rcts must be positive");
  if (!(users_per_rct.median >= 1000.0) || users_per_rct.log_sd < 0.0) {
    return bad("users_per_rct must be at least 1000");
  }
  for (double p : {control_share, exposure_rate_mean, click_rate_given_exposure,
                   click_driven_share}) {
    if (!IsProbability(p)) return bad("probabilities must lie in [0, 1]");
  }
  if (control_share <= 0.0 || control_share >= 1.0) {
    return bad("control_share must lie strictly between 0 and 1");
  }
  if (exposure_rate_mean <= 0.0 || exposure_rate_mean >= 1.0) {
    return bad("exposure_rate_mean must lie strictly between 0 and 1");
  }
  if (users_per_rct.median * control_share < 10.0) {
    return bad("users_per_rct * control_share < 10 leaves a degenerate control arm");
  }
  double mix = 0.0;
  for (double p : funnel_mix) {
    if (!IsProbability(p)) return bad("funnel_mix entries must lie in [0, 1]");
    mix += p;
  }
  if (std::abs(mix - 1.0) > 1e-12) return bad("funnel_mix must sum to 1");
  for (double p : organic_rate_by_funnel) {
    if (!(p > 0.0 && p < 1.0)) return bad("organic rates must lie in (0, 1)");
  }
  for (double p : organic_click_harvest) {
    if (!IsProbability(p)) return bad("organic_click_harvest must lie in [0, 1]");
  }
  for (const LogNormalSpec& spec : treatment_lift) {
    if (spec.median < 0.0 || spec.log_sd < 0.0) {
      return bad("treatment_lift must have nonnegative median and log_sd");
    }
  }
  for (double m : conversion_delay_mean_seconds) {
    if (!(m >= 0.0)) return bad("conversion delays must be nonnegative");
  }
  if (!(view_through_delay_mean_seconds >= 0.0) ||
      !(harvest_delay_mean_seconds >= 0.0)) {
    return bad("delays must be nonnegative");
  }
  if (!(selection_bias_strength >= 0.0)) {
    return bad("selection_bias_strength must be nonnegative");
  }
  if (!(organic_concentration > 0.0) || !(exposure_rate_concentration > 0.0)) {
    return bad("concentrations must be positive");
  }
  if (!(organic_click_multiplier >= 0.0)) {
    return bad("organic_click_multiplier must be nonnegative");
  }
  if (!(cost_per_thousand_impressions.median > 0.0) ||
      cost_per_thousand_impressions.log_sd < 0.0) {
    return bad("cost_per_thousand_impressions must be positive");
  }
  if (!(impressions_per_exposed_user.median >= 1.0) ||
      impressions_per_exposed_user.log_sd < 0.0) {
    return bad("impressions_per_exposed_user must be at least 1");
  }
  if (rcts_per_experiment < 1) return bad("rcts_per_experiment must be positive");
  return absl::OkStatus();
}

std::string SimulationConfig::ToJson() const {
  json doc = {
      {"n_rcts", n_rcts},
      {"users_per_rct", LogNormalJson(users_per_rct)},
      {"control_share", control_share},
      {"exposure_rate_mean", exposure_rate_mean},
      {"exposure_rate_concentration", exposure_rate_concentration},
      {"funnel_mix", FunnelJson(funnel_mix)},
      {"organic_rate_by_funnel", FunnelJson(organic_rate_by_funnel)},
      {"organic_concentration", organic_concentration},
      {"treatment_lift", FunnelJson(treatment_lift)},
      {"selection_bias_strength", selection_bias_strength},
      {"click_rate_given_exposure", click_rate_given_exposure},
      {"organic_click_multiplier", organic_click_multiplier},
      {"click_driven_share", click_driven_share},
      {"conversion_delay_mean_seconds", FunnelJson(conversion_delay_mean_seconds)},
      {"view_through_delay_mean_seconds", view_through_delay_mean_seconds},
      {"organic_click_harvest", FunnelJson(organic_click_harvest)},
      {"harvest_delay_mean_seconds", harvest_delay_mean_seconds},
      {"cost_per_thousand_impressions", LogNormalJson(cost_per_thousand_impressions)},
      {"impressions_per_exposed_user", LogNormalJson(impressions_per_exposed_user)},
      {"rcts_per_experiment", rcts_per_experiment},
      {"min_test_conversions", min_test_conversions},
      {"characteristic_effects", characteristic_effects},
      {"seed", seed},
  };
  return doc.dump(2);
}

absl::StatusOr<SimulationConfig> SimulationConfig::FromJson(
    absl::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("simulation config: not a JSON object");
  }
  static const auto* const kKnown = new std::vector<std::string>{
      "n_rcts", "users_per_rct", "control_share", "exposure_rate_mean",
      "exposure_rate_concentration", "funnel_mix", "organic_rate_by_funnel",
      "organic_concentration", "treatment_lift", "selection_bias_strength",
      "click_rate_given_exposure", "organic_click_multiplier",
      "click_driven_share", "conversion_delay_mean_seconds",
      "view_through_delay_mean_seconds", "organic_click_harvest",
      "harvest_delay_mean_seconds", "cost_per_thousand_impressions",
      "impressions_per_exposed_user", "rcts_per_experiment",
      "min_test_conversions", "characteristic_effects", "seed"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (std::find(kKnown->begin(), kKnown->end(), it.key()) == kKnown->end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("simulation config: unknown field '", it.key(), "'"));
    }
  }
  SimulationConfig cfg;
  for (absl::Status s : {
           ReadField(doc, "n_rcts", cfg.n_rcts),
           ReadLogNormal(doc, "users_per_rct", cfg.users_per_rct),
           ReadField(doc, "control_share", cfg.control_share),
           ReadField(doc, "exposure_rate_mean", cfg.exposure_rate_mean),
           ReadField(doc, "exposure_rate_concentration",
                     cfg.exposure_rate_concentration),
           ReadFunnel(doc, "funnel_mix", cfg.funnel_mix),
           ReadFunnel(doc, "organic_rate_by_funnel", cfg.organic_rate_by_funnel),
           ReadField(doc, "organic_concentration", cfg.organic_concentration),
           ReadFunnel(doc, "treatment_lift", cfg.treatment_lift),
           ReadField(doc, "selection_bias_strength", cfg.selection_bias_strength),
           ReadField(doc, "click_rate_given_exposure",
                     cfg.click_rate_given_exposure),
           ReadField(doc, "organic_click_multiplier", cfg.organic_click_multiplier),
           ReadField(doc, "click_driven_share", cfg.click_driven_share),
           ReadFunnel(doc, "conversion_delay_mean_seconds",
                      cfg.conversion_delay_mean_seconds),
           ReadField(doc, "view_through_delay_mean_seconds",
                     cfg.view_through_delay_mean_seconds),
           ReadFunnel(doc, "organic_click_harvest", cfg.organic_click_harvest),
           ReadField(doc, "harvest_delay_mean_seconds",
                     cfg.harvest_delay_mean_seconds),
           ReadLogNormal(doc, "cost_per_thousand_impressions",
                         cfg.cost_per_thousand_impressions),
           ReadLogNormal(doc, "impressions_per_exposed_user",
                         cfg.impressions_per_exposed_user),
           ReadField(doc, "rcts_per_experiment", cfg.rcts_per_experiment),
           ReadField(doc, "min_test_conversions", cfg.min_test_conversions),
           ReadField(doc, "characteristic_effects", cfg.characteristic_effects),
           ReadField(doc, "seed", cfg.seed),
       }) {
    if (!s.ok()) return s;
  }
  if (auto s = cfg.Validate(); !s.ok()) return s;
  return cfg;
}

absl::StatusOr<SimulationConfig> SimulationConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return FromJson(buffer.str());
}

EventLogFile SimulatedRct::ToFile() const {
  return EventLogFile{.rct_id = rct_id,
                      .experiment_id = experiment_id,
                      .characteristics = characteristics,
                      .cost = cost,
                      .planned_test_share = planned_test_share,
                      .log = log};
}

absl::StatusOr<SimulatedRct> GenerateExperiment(const SimulationConfig& cfg,
                                                int64_t rct_index) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  if (rct_index < 0) return absl::InvalidArgumentError("rct_index must be >= 0");

  const int64_t experiment_index = rct_index / cfg.rcts_per_experiment;
  ExperimentDraw experiment = DrawExperiment(cfg, experiment_index);
  const Effects effects = ComputeEffects(cfg, experiment);

  Rng rng(DeriveSeed(cfg.seed, {kStageSimulation, 2, static_cast<uint64_t>(rct_index)}));
  SimulatedRct rct;
  rct.rct_id = absl::StrFormat("rct-%05d", rct_index);
  rct.experiment_id = absl::StrFormat("exp-%05d", experiment_index);
  rct.planned_test_share = 1.0 - cfg.control_share;
  rct.characteristics = experiment.characteristics;
  CampaignCharacteristics& c = rct.characteristics;

  c.funnel = kAllFunnels[DrawIndex(cfg.funnel_mix, rng)];
  const int f = static_cast<int>(c.funnel);
  const auto n_users = static_cast<int64_t>(
      std::max(1000.0, std::round(DrawLogNormal(cfg.users_per_rct, rng))));
  if (static_cast<double>(n_users) * cfg.control_share < 10.0) {
    return absl::InvalidArgumentError(
        "users_per_rct * control_share < 10 leaves a degenerate control arm");
  }

  const double organic_mean =
      std::clamp(cfg.organic_rate_by_funnel[f] * effects.organic, 1e-6, 0.5);
  const double beta_a = organic_mean * cfg.organic_concentration;
  const double beta_b = (1.0 - organic_mean) * cfg.organic_concentration;
  const double organic_sd = std::sqrt(organic_mean * (1.0 - organic_mean) /
                                      (cfg.organic_concentration + 1.0));
  LogNormalSpec lift_spec = cfg.treatment_lift[f];
  lift_spec.median *= effects.lift;
  const double lift = DrawLogNormal(lift_spec, rng);
  const double exposure_target = std::clamp(
      DrawBeta(cfg.exposure_rate_mean * cfg.exposure_rate_concentration,
               (1.0 - cfg.exposure_rate_mean) * cfg.exposure_rate_concentration,
               rng),
      0.02, 0.995);
  const double cpm = DrawLogNormal(cfg.cost_per_thousand_impressions, rng);
  const double impressions_mean =
      std::max(1.0, DrawLogNormal(cfg.impressions_per_exposed_user, rng));
  const double click_rate =
      std::min(1.0, cfg.click_rate_given_exposure * effects.click);
  const double click_driven =
      std::clamp(cfg.click_driven_share * effects.click_driven, 0.0, 1.0);
  const double harvest =
      std::clamp(cfg.organic_click_harvest[f] * effects.harvest, 0.0, 1.0);
  const Seconds campaign_seconds = c.length_days * kDay;

  double intercept = 0.0;
  {
    Rng calibration_rng(DeriveSeed(
        cfg.seed, {kStageSimulation, 3, static_cast<uint64_t>(rct_index)}));
    std::vector<double> standardized(4000);
    for (double& z : standardized) {
      z = (DrawBeta(beta_a, beta_b, calibration_rng) - organic_mean) / organic_sd;
    }
    intercept = CalibrateExposureIntercept(
        standardized, cfg.selection_bias_strength, exposure_target);
  }

  std::gamma_distribution<double> gamma_a(beta_a, 1.0);
  std::gamma_distribution<double> gamma_b(beta_b, 1.0);
  std::poisson_distribution<int64_t> extra_impressions(impressions_mean - 1.0);

  rct.log = EventLog(/*has_counterfactual=*/true);
  rct.log.Reserve(static_cast<size_t>(n_users));
  std::vector<Seconds> impressions, clicks, conversions;
  int64_t total_impressions = 0, n_test = 0, induced = 0;
  for (int64_t i = 0; i < n_users; ++i) {
    impressions.clear();
    clicks.clear();
    conversions.clear();
    const bool assigned_test = Uniform01(rng) < rct.planned_test_share;
    if (assigned_test) ++n_test;
    const double ga = gamma_a(rng), gb = gamma_b(rng);
    const double p0 = ga + gb > 0.0 ? ga / (ga + gb) : organic_mean;
    const bool organic = Uniform01(rng) < p0;
    bool exposed = false;
    if (assigned_test) {
      const double propensity = Logistic(
          intercept + cfg.selection_bias_strength * (p0 - organic_mean) / organic_sd);
      exposed = Uniform01(rng) < propensity;
    }
    if (exposed) {
      const int64_t k = 1 + extra_impressions(rng);
      for (int64_t j = 0; j < k; ++j) {
        impressions.push_back(static_cast<Seconds>(
            Uniform01(rng) * static_cast<double>(campaign_seconds)));
      }
      std::sort(impressions.begin(), impressions.end());
      total_impressions += k;
      const double q = std::min(
          1.0, click_rate * (organic ? cfg.organic_click_multiplier : 1.0));
      for (Seconds t : impressions) {
        if (Uniform01(rng) < q) {
          clicks.push_back(t + static_cast<Seconds>(Uniform01(rng) * 60.0));
        }
      }
      std::sort(clicks.begin(), clicks.end());
    }
    auto pick = [&rng](const std::vector<Seconds>& v) {
      return v[std::min(v.size() - 1,
                        static_cast<size_t>(Uniform01(rng) * v.size()))];
    };
    if (organic) {
      if (exposed && !clicks.empty() && Uniform01(rng) < harvest) {
        conversions.push_back(
            pick(clicks) + DrawExponentialSeconds(cfg.harvest_delay_mean_seconds, rng));
      } else {
        conversions.push_back(static_cast<Seconds>(
            Uniform01(rng) * static_cast<double>(campaign_seconds)));
      }
    } else if (exposed) {
      const double induce_prob = std::min(1.0, lift / (1.0 - p0));
      if (Uniform01(rng) < induce_prob) {
        ++induced;
        if (Uniform01(rng) < click_driven) {
          if (clicks.empty()) {
            clicks.push_back(pick(impressions) +
                             static_cast<Seconds>(Uniform01(rng) * 60.0));
          }
          conversions.push_back(
              pick(clicks) +
              DrawExponentialSeconds(cfg.conversion_delay_mean_seconds[f], rng));
        } else {
          conversions.push_back(
              pick(impressions) +
              DrawExponentialSeconds(cfg.view_through_delay_mean_seconds, rng));
        }
      }
    }
    rct.log.AddUser(i, assigned_test, exposed, impressions, clicks, conversions,
                    organic);
  }

  rct.cost = static_cast<double>(total_impressions) * cpm / 1000.0;
  c.n_test_users = std::max<int64_t>(1, n_test);
  c.budget = std::max(rct.cost, 1.0) * (1.0 + 0.3 * Uniform01(rng));

  auto decomposition = DecomposeConversions(rct.log);
  if (!decomposition.ok()) return decomposition.status();
  GroundTruth& truth = rct.truth;
  truth.decomposition = *decomposition;
  truth.true_ic = induced;
  for (size_t i = 0; i < rct.log.size(); ++i) {
    if (rct.log.user(i).exposed) ++truth.n_exposed;
  }
  truth.true_att = truth.n_exposed > 0 ? static_cast<double>(induced) /
                                             static_cast<double>(truth.n_exposed)
                                       : 0.0;
  truth.true_icpd = rct.cost > 0.0 ? static_cast<double>(induced) / rct.cost : 0.0;
  return rct;
}

absl::Status SimulateEach(const SimulationConfig& cfg,
                          const std::function<absl::Status(SimulatedRct)>& sink) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  const int64_t max_attempts = 100 * cfg.n_rcts;
  int64_t accepted = 0;
  for (int64_t index = 0; accepted < cfg.n_rcts; ++index) {
    if (index >= max_attempts) {
      return absl::ResourceExhaustedError(absl::StrFormat(
          "only %d of %d RCTs reached min_test_conversions=%d after %d draws",
          accepted, cfg.n_rcts, cfg.min_test_conversions, max_attempts));
    }
    auto rct = GenerateExperiment(cfg, index);
    if (!rct.ok()) return rct.status();
    if (cfg.min_test_conversions > 0) {
      int64_t test_conversions = 0;
      for (size_t i = 0; i < rct->log.size(); ++i) {
        const UserEvents u = rct->log.user(i);
        if (u.assigned_test && u.converted()) ++test_conversions;
      }
      if (test_conversions < cfg.min_test_conversions) continue;
    }
    ++accepted;
    if (auto s = sink(*std::move(rct)); !s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<SimulatedRct>> Simulate(const SimulationConfig& cfg) {
  std::vector<SimulatedRct> out;
  out.reserve(static_cast<size_t>(std::max<int64_t>(cfg.n_rcts, 0)));
  auto status = SimulateEach(cfg, [&](SimulatedRct rct) {
    out.push_back(std::move(rct));
    return absl::OkStatus();
  });
  if (!status.ok()) return status;
  return out;
}

absl::StatusOr<Decomposition> DecomposeConversions(const EventLog& log) {
  if (!log.has_counterfactual()) {
    return absl::FailedPreconditionError(
        "decomposition needs counterfactual conversions (simulator logs only)");
  }
  Decomposition d;
  for (size_t i = 0; i < log.size(); ++i) {
    const UserEvents u = log.user(i);
    if (!u.exposed) continue;
    if (*u.converted_counterfactual) ++d.conversions_organic;
    if (!u.converted()) continue;
    const std::optional<Seconds> delay = LastClickDelay(u);
    if (!delay) {
      ++d.conversions_no_click;
      continue;
    }
    for (AttributionWindow w : kAllWindows) {
      if (*delay <= WindowSeconds(w)) {
        ++d.lc_within[WindowIndex(w)];
      } else {
        ++d.lc_outside[WindowIndex(w)];
      }
    }
  }
  return d;
}

absl::StatusOr<bool> VerifyDecomposition(const EventLog& log,
                                         const GroundTruth& truth,
                                         AttributionWindow w) {
  auto d = DecomposeConversions(log);
  if (!d.ok()) return d.status();
  const int k = WindowIndex(w);
  const int64_t rhs = d->lc_within[k] + d->lc_outside[k] +
                      d->conversions_no_click - d->conversions_organic;
  return rhs == truth.true_ic && *d == truth.decomposition;
}

absl::StatusOr<double> NaiveObservationalAtt(const EventLog& log) {
  int64_t n_exposed = 0, n_unexposed = 0, y_exposed = 0, y_unexposed = 0;
  for (size_t i = 0; i < log.size(); ++i) {
    const UserEvents u = log.user(i);
    if (!u.assigned_test) continue;
    if (u.exposed) {
      ++n_exposed;
      y_exposed += u.converted() ? 1 : 0;
    } else {
      ++n_unexposed;
      y_unexposed += u.converted() ? 1 : 0;
    }
  }
  if (n_exposed == 0 || n_unexposed == 0) {
    return absl::FailedPreconditionError(
        "naive comparison needs exposed and unexposed test-group users");
  }
  return static_cast<double>(y_exposed) / static_cast<double>(n_exposed) -
         static_cast<double>(y_unexposed) / static_cast<double>(n_unexposed);
}

}  // namespace pie
