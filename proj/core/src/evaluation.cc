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
#include <map>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "pie/metrics.h"
#include "pie/random.h"

namespace pie {
namespace {

std::vector<std::vector<size_t>> FoldMembers(std::span<const RctSummary> data,
                                             bool group_by_experiment) {
  std::vector<std::vector<size_t>> folds;
  std::map<std::string, size_t> by_experiment;
  for (size_t i = 0; i < data.size(); ++i) {
    if (!group_by_experiment) {
      folds.push_back({i});
      continue;
    }
    auto [it, inserted] = by_experiment.emplace(data[i].experiment_id, folds.size());
    if (inserted) folds.emplace_back();
    folds[it->second].push_back(i);
  }
  return folds;
}

struct FoldResult {
  absl::Status status;
  std::vector<std::pair<size_t, PredictionRow>> rows;
};

FoldResult RunFold(std::span<const RctSummary> data, const std::vector<size_t>& held,
                   ModelSpec spec, const CategorySchema& schema,
                   const EvaluationOptions& options, uint64_t fold_seed) {
  FoldResult result;
  std::vector<RctSummary> training;
  training.reserve(data.size());
  size_t h = 0;
  std::vector<size_t> sorted_held = held;
  std::sort(sorted_held.begin(), sorted_held.end());
  for (size_t i = 0; i < data.size(); ++i) {
    if (h < sorted_held.size() && sorted_held[h] == i) {
      ++h;
      continue;
    }
    training.push_back(data[i]);
  }
  PooledWeights pool;
  auto train = MakeTrainingData(training, schema, options.grouping, &pool);
  if (!train.ok()) {
    result.status = train.status();
    return result;
  }
  auto model = FitModel(spec, *train, schema, options.model, fold_seed);
  if (!model.ok()) {
    result.status = absl::Status(
        model.status().code(),
        absl::StrCat("holding out ", data[held[0]].rct_id, ": ", model.status().message()));
    return result;
  }
  for (size_t i : held) {
    const RctSummary& s = data[i];
    auto predicted = model->Predict(ToFeatureRecord(s, schema));
    if (!predicted.ok()) {
      result.status = predicted.status();
      return result;
    }
    PredictionRow row{.rct_id = s.rct_id,
                      .experiment_id = s.experiment_id,
                      .funnel = s.characteristics.funnel,
                      .vertical = s.characteristics.vertical,
                      .actual = s.icpd,
                      .predicted = *predicted,
                      .raw_weight = RawWeightFor(s, pool)};
    result.rows.emplace_back(i, std::move(row));
  }
  return result;
}

SubsetMetrics MetricsFor(std::string type, std::string name,
                         std::span<const PredictionRow> rows,
                         const std::vector<size_t>& members, double total_weight) {
  std::vector<double> actual, predicted, weight;
  for (size_t i : members) {
    actual.push_back(rows[i].actual);
    predicted.push_back(rows[i].predicted);
    weight.push_back(rows[i].raw_weight);
  }
  SubsetMetrics m{.subset_type = std::move(type), .subset = std::move(name)};
  m.n = members.size();
  double subset_weight = 0.0;
  for (double w : weight) subset_weight += w;
  m.weight_share = subset_weight / total_weight;
  m.wrmse = *Wrmse(actual, predicted, weight);
  auto pct = PercentWrmse(m.wrmse, actual, weight);
  m.percent_wrmse = pct.ok() ? *pct : NAN;
  auto mape = Wmape(actual, predicted, weight);
  m.wmape = mape.ok() ? *mape : NAN;
  return m;
}

}  // namespace

absl::StatusOr<TrainingData> MakeTrainingData(std::span<const RctSummary> pool,
                                              const CategorySchema& schema,
                                              GammaGrouping grouping,
                                              PooledWeights* weights) {
  auto w = ComputePooledWeights(pool, grouping);
  if (!w.ok()) return w.status();
  TrainingData data;
  for (size_t i = 0; i < pool.size(); ++i) {
    data.features.push_back(ToFeatureRecord(pool[i], schema));
    data.target.push_back(pool[i].icpd);
  }
  data.weight = w->pooled;
  if (weights != nullptr) *weights = *std::move(w);
  return data;
}

std::vector<FoldPlan> PlanFolds(std::span<const RctSummary> data, ModelSpec spec,
                                const EvaluationOptions& options, uint64_t seed) {
  std::vector<FoldPlan> plans;
  const auto folds = FoldMembers(data, options.group_by_experiment);
  const bool inner_cv = HasHyperparameters(spec) && options.model.forest.tune;
  for (size_t k = 0; k < folds.size(); ++k) {
    FoldPlan plan;
    plan.seed = DeriveSeed(seed, {kStageEvaluation, static_cast<uint64_t>(k)});
    std::vector<char> held(data.size(), 0);
    for (size_t i : folds[k]) {
      held[i] = 1;
      plan.held_out.push_back(data[i].rct_id);
    }
    std::vector<int> strata;
    for (size_t i = 0; i < data.size(); ++i) {
      if (held[i]) continue;
      plan.training.push_back(data[i].rct_id);
      strata.push_back(static_cast<int>(data[i].characteristics.funnel));
    }
    if (inner_cv) {
      plan.inner_fold = InnerFolds(strata, options.model.forest.cv_folds, plan.seed);
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

absl::StatusOr<std::vector<SubsetMetrics>> ComputeSubsetMetrics(
    std::span<const PredictionRow> rows) {
  if (rows.empty()) return absl::InvalidArgumentError("no predictions");
  double total = 0.0;
  for (const PredictionRow& r : rows) {
    if (!(r.raw_weight >= 0.0) || !std::isfinite(r.raw_weight)) {
      return absl::InvalidArgumentError(absl::StrCat(r.rct_id, ": invalid weight"));
    }
    total += r.raw_weight;
  }
  if (!(total > 0.0)) return absl::InvalidArgumentError("weights sum to zero");

  std::vector<size_t> all(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) all[i] = i;
  std::vector<SubsetMetrics> out = {MetricsFor("all", "all", rows, all, total)};
  for (FunnelLevel f : kAllFunnels) {
    std::vector<size_t> members;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].funnel == f) members.push_back(i);
    }
    if (members.empty()) continue;
    out.push_back(MetricsFor("funnel", std::string(FunnelName(f)), rows, members, total));
  }
  for (Vertical v : kAllVerticals) {
    std::vector<size_t> members;
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].vertical == v) members.push_back(i);
    }
    if (members.empty()) continue;
    out.push_back(
        MetricsFor("vertical", std::string(VerticalName(v)), rows, members, total));
  }
  return out;
}

absl::StatusOr<EvaluationReport> LeaveOneOut(std::span<const RctSummary> data,
                                             ModelSpec spec,
                                             const CategorySchema& schema,
                                             const EvaluationOptions& options,
                                             uint64_t seed) {
  const bool inner_cv = HasHyperparameters(spec) && options.model.forest.tune;
  const size_t minimum = inner_cv ? kMinRctsForInnerCv : 3;
  if (data.size() < minimum) {
    return absl::FailedPreconditionError(absl::StrCat(
        "leave-one-out for ", ModelSpecName(spec), " needs at least ", minimum,
        " RCTs, got ", data.size()));
  }
  {
    std::map<std::string, int> seen;
    for (const RctSummary& s : data) {
      if (++seen[s.rct_id] > 1) {
        return absl::InvalidArgumentError(absl::StrCat("duplicate rct_id ", s.rct_id));
      }
    }
  }
  const auto folds = FoldMembers(data, options.group_by_experiment);
  if (folds.size() < 2) {
    return absl::FailedPreconditionError("need at least two folds");
  }

  std::vector<FoldResult> results(folds.size());
  auto work = [&](size_t k) {
    results[k] = RunFold(data, folds[k], spec, schema, options,
                         DeriveSeed(seed, {kStageEvaluation, static_cast<uint64_t>(k)}));
  };
  const size_t threads =
      std::clamp<size_t>(static_cast<size_t>(std::max(options.threads, 1)), 1, folds.size());
  if (threads == 1) {
    for (size_t k = 0; k < folds.size(); ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    for (size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (size_t k = t; k < folds.size(); k += threads) work(k);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  EvaluationReport report;
  report.spec = spec;
  report.rows.resize(data.size());
  for (FoldResult& r : results) {
    if (!r.status.ok()) return r.status;
    for (auto& [i, row] : r.rows) report.rows[i] = std::move(row);
  }
  double total = 0.0;
  for (const PredictionRow& r : report.rows) total += r.raw_weight;
  for (PredictionRow& r : report.rows) r.weight = r.raw_weight / total;
  auto subsets = ComputeSubsetMetrics(report.rows);
  if (!subsets.ok()) return subsets.status();
  report.subsets = *std::move(subsets);
  return report;
}

}  // namespace pie
