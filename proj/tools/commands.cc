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
#include "commands.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "output_dir.h"
#include "pie/csv.h"
#include "pie/decision.h"
#include "pie/estimators.h"
#include "pie/evaluation.h"
#include "pie/model.h"
#include "pie/regression.h"
#include "pie/schema.h"
#include "pie/simulator.h"
#include "pie/summary.h"
#include "status_macros.h"

namespace pie::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kLogSuffix[] = ".eventlog.gz";

std::string Csv(const std::vector<std::string>& fields) { return CsvLine(fields) + "\n"; }

// Undefined metrics are written as empty fields.
std::string Num(double v) { return std::isfinite(v) ? FormatDouble(v) : std::string(); }

absl::StatusOr<CategorySchema> LoadSchema(const std::string& path) {
  if (path.empty()) return CategorySchema::Default();
  return CategorySchema::Load(path);
}

// `path` itself when it is a file, else `path`/`name`.
std::string ResolveArtifact(const std::string& path, absl::string_view name) {
  if (fs::is_directory(path)) return (fs::path(path) / std::string(name)).string();
  return path;
}

absl::StatusOr<std::vector<ModelSpec>> ParseSpecs(const std::vector<std::string>& names) {
  std::vector<ModelSpec> specs;
  for (const std::string& name : names) {
    if (name == "all") {
      specs.insert(specs.end(), kAllModelSpecs.begin(), kAllModelSpecs.end());
      continue;
    }
    PIE_ASSIGN_OR_RETURN(ModelSpec spec, ParseModelSpec(name));
    specs.push_back(spec);
  }
  if (specs.empty()) return absl::InvalidArgumentError("no model specified");
  return specs;
}

json ForestJson(const ForestOptions& f) {
  return {{"n_trees", f.n_trees},       {"cv_n_trees", f.cv_n_trees},
          {"cv_folds", f.cv_folds},     {"tune", f.tune},
          {"bootstrap", f.bootstrap},   {"max_depth", f.max_depth},
          {"features_per_split", f.features_per_split},
          {"min_leaf_fraction", f.min_leaf_fraction}};
}

json FitConfigJson(const FitOptions& o) {
  return {{"summaries", o.summaries},
          {"schema", o.schema.empty() ? "(default)" : o.schema},
          {"lenient_vertical", o.lenient_vertical},
          {"models", o.models},
          {"threads", o.threads},
          {"weighted_calibration", !o.unweighted_cf},
          {"per_funnel_calibration", !o.pooled_cf},
          {"gamma_grouping", std::string(GammaGroupingName(o.gamma_grouping))},
          {"forest", ForestJson(o.forest)}};
}

ModelOptions ToModelOptions(const FitOptions& o) {
  return ModelOptions{.weighted_calibration = !o.unweighted_cf,
                      .per_funnel_calibration = !o.pooled_cf,
                      .forest = o.forest};
}

struct LoadedSummaries {
  CategorySchema schema;
  std::vector<RctSummary> rows;
  json input;
};

absl::StatusOr<LoadedSummaries> LoadSummaries(const std::string& path,
                                              const std::string& schema_path,
                                              bool lenient_vertical) {
  LoadedSummaries out;
  PIE_ASSIGN_OR_RETURN(out.schema, LoadSchema(schema_path));
  SummaryReadOptions read{.schema = &out.schema, .lenient_vertical = lenient_vertical};
  PIE_ASSIGN_OR_RETURN(out.rows, ReadSummariesCsv(path, read));
  if (out.rows.empty()) return absl::InvalidArgumentError(absl::StrCat(path, ": no rows"));
  PIE_ASSIGN_OR_RETURN(out.input, InputRecord(path));
  return out;
}

std::string GroundTruthHeader() {
  std::vector<std::string> cols = {"rct_id", "experiment_id", "funnel", "n_exposed",
                                   "true_att", "true_ic", "true_icpd"};
  for (AttributionWindow w : kAllWindows) cols.push_back(absl::StrCat("lc_within_", WindowName(w)));
  for (AttributionWindow w : kAllWindows) cols.push_back(absl::StrCat("lc_outside_", WindowName(w)));
  cols.push_back("conversions_no_click");
  cols.push_back("conversions_organic");
  return Csv(cols);
}

std::string GroundTruthRow(const SimulatedRct& r) {
  const GroundTruth& t = r.truth;
  std::vector<std::string> f = {r.rct_id,
                                r.experiment_id,
                                std::string(FunnelName(r.characteristics.funnel)),
                                absl::StrCat(t.n_exposed),
                                FormatDouble(t.true_att),
                                absl::StrCat(t.true_ic),
                                FormatDouble(t.true_icpd)};
  for (int64_t v : t.decomposition.lc_within) f.push_back(absl::StrCat(v));
  for (int64_t v : t.decomposition.lc_outside) f.push_back(absl::StrCat(v));
  f.push_back(absl::StrCat(t.decomposition.conversions_no_click));
  f.push_back(absl::StrCat(t.decomposition.conversions_organic));
  return Csv(f);
}

// Type-7 (linear interpolation) sample quantile of sorted values.
double Quantile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double UnweightedPercentile(const std::vector<double>& values, double q) {
  const std::vector<double> ones(values.size(), 1.0);
  return *WeightedPercentile(values, ones, q);
}

}  // namespace

absl::Status RunSimulate(const SimulateOptions& o) {
  SimulationConfig cfg;
  if (!o.config.empty()) {
    PIE_ASSIGN_OR_RETURN(cfg, SimulationConfig::Load(o.config));
  }
  if (o.n_rcts) cfg.n_rcts = *o.n_rcts;
  if (o.users_per_rct) cfg.users_per_rct.median = *o.users_per_rct;
  if (o.seed) cfg.seed = *o.seed;
  if (o.min_test_conversions) cfg.min_test_conversions = *o.min_test_conversions;
  if (o.selection_bias_strength) cfg.selection_bias_strength = *o.selection_bias_strength;
  PIE_RETURN_IF_ERROR(cfg.Validate());

  PIE_ASSIGN_OR_RETURN(auto out, OutputDir::Open(o.out));
  out->ReplaceDirectory("logs");
  std::string truth = GroundTruthHeader();
  PIE_RETURN_IF_ERROR(SimulateEach(cfg, [&](SimulatedRct rct) -> absl::Status {
    PIE_ASSIGN_OR_RETURN(const std::string path,
                         out->Stage(absl::StrCat("logs/", rct.rct_id, kLogSuffix)));
    PIE_RETURN_IF_ERROR(WriteEventLogFile(path, rct.ToFile()));
    truth += GroundTruthRow(rct);
    return absl::OkStatus();
  }));
  PIE_RETURN_IF_ERROR(out->WriteText("ground_truth.csv", truth));
  PIE_RETURN_IF_ERROR(out->WriteText("simulation_config.json", cfg.ToJson() + "\n"));

  json run = {{"seed", cfg.seed},
              {"config", json::parse(cfg.ToJson())},
              {"schema_version", CategorySchema::Default().version},
              {"inputs", json::array()}};
  if (!o.config.empty()) {
    PIE_ASSIGN_OR_RETURN(json input, InputRecord(o.config));
    run["inputs"].push_back(input);
  }
  return out->Commit("simulate", std::move(run));
}

absl::Status RunEstimate(const EstimateOptions& o) {
  PIE_ASSIGN_OR_RETURN(const CategorySchema schema, LoadSchema(o.schema));
  json inputs = json::array();
  std::vector<RctSummary> summaries;

  if (fs::is_directory(o.input)) {
    fs::path dir = o.input;
    if (fs::is_directory(dir / "logs")) dir /= "logs";
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.ends_with(kLogSuffix)) {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      return absl::NotFoundError(absl::StrCat("no *", kLogSuffix, " files in ", dir.string()));
    }
    // Summaries land in input order whatever the thread interleaving.
    std::vector<absl::StatusOr<RctSummary>> results(files.size(),
                                                    absl::UnknownError("not run"));
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t i = next++; i < files.size(); i = next++) {
        auto file = ReadEventLogFile(files[i]);
        if (!file.ok()) {
          results[i] = file.status();
          continue;
        }
        auto s = SummarizeRct(*file);
        results[i] = s.ok() ? s : absl::Status(s.status().code(),
                                                absl::StrCat(files[i], ": ", s.status().message()));
      }
    };
    const size_t threads = std::clamp<size_t>(static_cast<size_t>(std::max(o.threads, 1)), 1,
                                              files.size());
    std::vector<std::thread> pool;
    for (size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& th : pool) th.join();
    for (size_t i = 0; i < files.size(); ++i) {
      if (!results[i].ok()) return results[i].status();
      auto valid = ValidateSummary(*std::move(results[i]), schema);
      if (!valid.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(files[i], ": ", valid.status().message()));
      }
      summaries.push_back(*std::move(valid));
      PIE_ASSIGN_OR_RETURN(json input, InputRecord(files[i]));
      inputs.push_back(std::move(input));
    }
  } else {
    PIE_ASSIGN_OR_RETURN(LoadedSummaries loaded,
                         LoadSummaries(o.input, o.schema, o.lenient_vertical));
    summaries = std::move(loaded.rows);
    inputs.push_back(std::move(loaded.input));
  }

  PIE_ASSIGN_OR_RETURN(auto out, OutputDir::Open(o.out));
  PIE_ASSIGN_OR_RETURN(const std::string path, out->Stage("rct_summaries.csv"));
  PIE_RETURN_IF_ERROR(WriteSummariesCsv(path, summaries));
  json run = {{"config",
               {{"input", o.input},
                {"schema", o.schema.empty() ? "(default)" : o.schema},
                {"lenient_vertical", o.lenient_vertical},
                {"threads", o.threads}}},
              {"schema_version", schema.version},
              {"inputs", std::move(inputs)}};
  return out->Commit("estimate", std::move(run));
}

absl::Status RunTrain(const FitOptions& o) {
  PIE_ASSIGN_OR_RETURN(const std::vector<ModelSpec> specs, ParseSpecs(o.models));
  PIE_ASSIGN_OR_RETURN(LoadedSummaries data,
                       LoadSummaries(o.summaries, o.schema, o.lenient_vertical));
  PooledWeights pool;
  PIE_ASSIGN_OR_RETURN(const TrainingData training,
                       MakeTrainingData(data.rows, data.schema, o.gamma_grouping, &pool));

  PIE_ASSIGN_OR_RETURN(auto out, OutputDir::Open(o.out));
  std::string weights = Csv({"rct_id", "group", "weight", "gamma_sq"});
  for (size_t i = 0; i < data.rows.size(); ++i) {
    const std::string group = GroupKey(data.rows[i], o.gamma_grouping);
    weights += Csv({data.rows[i].rct_id, group, FormatDouble(pool.pooled[i]),
                    FormatDouble(pool.gamma_sq.at(group))});
  }
  PIE_RETURN_IF_ERROR(out->WriteText("weights.csv", weights));

  const ModelOptions model_options = ToModelOptions(o);
  for (ModelSpec spec : specs) {
    PIE_ASSIGN_OR_RETURN(const TrainedModel model,
                         FitModel(spec, training, data.schema, model_options, o.seed));
    PIE_ASSIGN_OR_RETURN(const std::string path,
                         out->Stage(absl::StrCat("models/", ModelSpecName(spec), ".json")));
    PIE_RETURN_IF_ERROR(model.Save(path));
  }
  json run = {{"seed", o.seed},
              {"config", FitConfigJson(o)},
              {"schema_version", data.schema.version},
              {"inputs", json::array({data.input})}};
  return out->Commit("train", std::move(run));
}

absl::Status RunEvaluate(const EvaluateOptions& o) {
  const FitOptions& f = o.fit;
  PIE_ASSIGN_OR_RETURN(const std::vector<ModelSpec> specs, ParseSpecs(f.models));
  PIE_ASSIGN_OR_RETURN(LoadedSummaries data,
                       LoadSummaries(f.summaries, f.schema, f.lenient_vertical));
  const EvaluationOptions options{.model = ToModelOptions(f),
                                  .grouping = f.gamma_grouping,
                                  .group_by_experiment = o.group_by_experiment,
                                  .threads = f.threads};

  std::string predictions = Csv({"model", "rct_id", "funnel", "vertical", "actual_icpd",
                                 "predicted_icpd", "weight"});
  std::string metrics =
      Csv({"model", "subset_type", "subset", "wrmse", "percent_wrmse", "wmape", "n"});
  for (ModelSpec spec : specs) {
    PIE_ASSIGN_OR_RETURN(const EvaluationReport report,
                         LeaveOneOut(data.rows, spec, data.schema, options, f.seed));
    const std::string name(ModelSpecName(spec));
    for (const PredictionRow& r : report.rows) {
      predictions += Csv({name, r.rct_id, std::string(FunnelName(r.funnel)),
                          std::string(VerticalName(r.vertical)), FormatDouble(r.actual),
                          FormatDouble(r.predicted), FormatDouble(r.weight)});
    }
    for (const SubsetMetrics& m : report.subsets) {
      metrics += Csv({name, m.subset_type, m.subset, Num(m.wrmse), Num(m.percent_wrmse),
                      Num(m.wmape), absl::StrCat(m.n)});
    }
  }

  PIE_ASSIGN_OR_RETURN(auto out, OutputDir::Open(f.out));
  PIE_RETURN_IF_ERROR(out->WriteText("predictions.csv", predictions));
  PIE_RETURN_IF_ERROR(out->WriteText("fit_metrics.csv", metrics));
  json config = FitConfigJson(f);
  config["group_by_experiment"] = o.group_by_experiment;
  json run = {{"seed", f.seed},
              {"config", std::move(config)},
              {"schema_version", data.schema.version},
              {"inputs", json::array({data.input})}};
  return out->Commit("evaluate", std::move(run));
}

absl::Status RunDecide(const DecideOptions& o) {
  const std::string path = ResolveArtifact(o.predictions, "predictions.csv");
  PIE_ASSIGN_OR_RETURN(const CsvTable table, CsvTable::ReadFile(path));
  size_t col[5];
  const char* const names[5] = {"model", "funnel", "actual_icpd", "predicted_icpd", "weight"};
  for (int c = 0; c < 5; ++c) {
    PIE_ASSIGN_OR_RETURN(col[c], table.RequireColumn(names[c]));
  }

  // model -> funnel -> rows, in first-appearance order of the models.
  struct Cell {
    std::vector<OutcomePair> pairs;
    std::vector<double> actual;
    std::vector<double> weight;
  };
  std::vector<std::string> model_order;
  std::map<std::string, std::map<FunnelLevel, Cell>> cells;
  for (size_t r = 0; r < table.num_rows(); ++r) {
    const std::string& model = table.GetString(r, col[0]);
    if (!o.models.empty() &&
        std::find(o.models.begin(), o.models.end(), model) == o.models.end()) {
      continue;
    }
    auto funnel = ParseFunnel(table.GetString(r, col[1]));
    if (!funnel.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ": row ", r + 1, ", column funnel: ",
                                                     funnel.status().message()));
    }
    PIE_ASSIGN_OR_RETURN(const double actual, table.GetDouble(r, col[2]));
    PIE_ASSIGN_OR_RETURN(const double predicted, table.GetDouble(r, col[3]));
    PIE_ASSIGN_OR_RETURN(const double weight, table.GetDouble(r, col[4]));
    if (!cells.contains(model)) model_order.push_back(model);
    Cell& cell = cells[model][*funnel];
    cell.pairs.push_back({actual, predicted});
    cell.actual.push_back(actual);
    cell.weight.push_back(weight);
  }
  for (const std::string& m : o.models) {
    if (!cells.contains(m)) {
      return absl::NotFoundError(absl::StrCat(path, ": no predictions for model ", m));
    }
  }
  if (cells.empty()) return absl::InvalidArgumentError(absl::StrCat(path, ": no predictions"));

  std::string curves = Csv({"model", "funnel", "threshold", "fp_rate", "fn_rate",
                            "disagreement_rate", "n"});
  json summary = {{"summary_version", 1}, {"grid_points", o.grid_points}, {"models", json::array()}};
  for (const std::string& model : model_order) {
    json funnels = json::array();
    for (const auto& [funnel, cell] : cells[model]) {
      PIE_ASSIGN_OR_RETURN(const std::vector<double> grid,
                           DefaultThresholdGrid(cell.actual, cell.weight, o.grid_points));
      PIE_ASSIGN_OR_RETURN(const DisagreementCurve curve,
                           ComputeDisagreementCurve(cell.pairs, funnel, grid));
      const std::string funnel_name(FunnelName(funnel));
      for (size_t i = 0; i < grid.size(); ++i) {
        const DisagreementRates& r = curve.rates[i];
        curves += Csv({model, funnel_name, FormatDouble(grid[i]), FormatDouble(r.fp_rate),
                       FormatDouble(r.fn_rate), FormatDouble(r.disagreement_rate),
                       absl::StrCat(curve.n)});
      }
      const double median = UnweightedPercentile(cell.actual, 0.5);
      PIE_ASSIGN_OR_RETURN(const DisagreementRates at, RatesAt(cell.pairs, median));
      funnels.push_back({{"funnel", funnel_name},
                         {"n", curve.n},
                         {"median_actual_icpd", median},
                         {"iqr", {UnweightedPercentile(cell.actual, 0.25),
                                  UnweightedPercentile(cell.actual, 0.75)}},
                         {"at_median",
                          {{"fp_rate", at.fp_rate},
                           {"fn_rate", at.fn_rate},
                           {"disagreement_rate", at.disagreement_rate}}}});
    }
    summary["models"].push_back({{"model", model}, {"funnels", std::move(funnels)}});
  }

  PIE_ASSIGN_OR_RETURN(auto out, OutputDir::Open(o.out));
  PIE_RETURN_IF_ERROR(out->WriteText("disagreement.csv", curves));
  PIE_RETURN_IF_ERROR(out->WriteText("disagreement_summary.json", summary.dump(2) + "\n"));
  PIE_ASSIGN_OR_RETURN(json input, InputRecord(path));
  json run = {{"config",
               {{"predictions", o.predictions}, {"models", o.models},
                {"grid_points", o.grid_points}}},
              {"inputs", json::array({std::move(input)})}};
  return out->Commit("decide", std::move(run));
}

absl::Status RunReport(const ReportOptions& o) {
  PIE_ASSIGN_OR_RETURN(LoadedSummaries data,
                       LoadSummaries(o.summaries, o.schema, o.lenient_vertical));
  json inputs = json::array({data.input});

  // icpd_by_funnel: box-plot quantiles, normalized by the lower-funnel median.
  std::map<FunnelLevel, std::vector<double>> icpd;
  for (const RctSummary& s : data.rows) icpd[s.characteristics.funnel].push_back(s.icpd);
  for (auto& [f, v] : icpd) std::sort(v.begin(), v.end());
  double lower_median = NAN;
  if (icpd.contains(FunnelLevel::kLower)) lower_median = Quantile(icpd[FunnelLevel::kLower], 0.5);
  const bool normalize = std::isfinite(lower_median) && lower_median > 0.0;
  std::string by_funnel =
      "# RCT-estimated ICPD by funnel level as box-plot statistics; normalized_icpd divides "
      "by the lower-funnel median\n";
  by_funnel += Csv({"funnel", "statistic", "icpd", "normalized_icpd", "n"});
  const std::pair<const char*, double> stats[] = {
      {"min", 0.0}, {"q1", 0.25}, {"median", 0.5}, {"q3", 0.75}, {"max", 1.0}};
  for (const auto& [f, v] : icpd) {
    for (const auto& [label, q] : stats) {
      const double value = Quantile(v, q);
      by_funnel += Csv({std::string(FunnelName(f)), label, FormatDouble(value),
                        normalize ? FormatDouble(value / lower_median) : std::string(),
                        absl::StrCat(v.size())});
    }
  }

  // calibration_factors: theta and robust SE overall, by funnel, by vertical.
  PIE_ASSIGN_OR_RETURN(const PooledWeights pool,
                       ComputePooledWeights(data.rows, o.gamma_grouping));
  std::string calibration =
      "# No-intercept calibration of ICPD on last-click conversions per dollar, with "
      "heteroskedasticity-robust standard errors\n";
  calibration += Csv({"funnel", "vertical", "window", "theta", "se", "n"});
  auto add_fit = [&](const std::string& funnel, const std::string& vertical,
                     const std::function<bool(const RctSummary&)>& member) {
    for (AttributionWindow w : kAllWindows) {
      std::vector<double> x, y, wt;
      for (size_t i = 0; i < data.rows.size(); ++i) {
        if (!member(data.rows[i])) continue;
        x.push_back(data.rows[i].Lcpd(w));
        y.push_back(data.rows[i].icpd);
        wt.push_back(o.unweighted_cf ? 1.0 : pool.pooled[i]);
      }
      if (x.empty()) continue;
      auto fit = FitCalibration(x, y, wt);
      if (!fit.ok()) {
        std::cerr << "warning: no calibration factor for funnel=" << funnel
                  << " vertical=" << vertical << " window=" << WindowName(w) << ": "
                  << fit.status().message() << "\n";
        continue;
      }
      calibration += Csv({funnel, vertical, std::string(WindowName(w)),
                          FormatDouble(fit->theta), FormatDouble(fit->se),
                          absl::StrCat(fit->n)});
    }
  };
  add_fit("all", "all", [](const RctSummary&) { return true; });
  for (FunnelLevel f : kAllFunnels) {
    add_fit(std::string(FunnelName(f)), "all",
            [f](const RctSummary& s) { return s.characteristics.funnel == f; });
  }
  for (Vertical v : kAllVerticals) {
    add_fit("all", std::string(VerticalName(v)),
            [v](const RctSummary& s) { return s.characteristics.vertical == v; });
  }

  // percent_wrmse_by_model from the evaluation artifact.
  const std::string metrics_path = ResolveArtifact(o.evaluation, "fit_metrics.csv");
  if (!fs::is_regular_file(metrics_path)) {
    return absl::NotFoundError(absl::StrCat("missing evaluation artifact ", metrics_path));
  }
  PIE_ASSIGN_OR_RETURN(const CsvTable metrics, CsvTable::ReadFile(metrics_path));
  std::string percent =
      "# Leave-one-RCT-out percent WRMSE by model and subset; 1.0 means the error equals "
      "the weighted mean ICPD\n";
  percent += Csv({"model", "subset_type", "subset", "percent_wrmse", "wrmse", "n"});
  {
    size_t col[6];
    const char* const names[6] = {"model", "subset_type", "subset", "percent_wrmse", "wrmse", "n"};
    for (int c = 0; c < 6; ++c) {
      PIE_ASSIGN_OR_RETURN(col[c], metrics.RequireColumn(names[c]));
    }
    for (size_t r = 0; r < metrics.num_rows(); ++r) {
      std::vector<std::string> row;
      for (size_t c : col) row.push_back(metrics.GetString(r, c));
      percent += Csv(row);
    }
  }
  PIE_ASSIGN_OR_RETURN(json metrics_input, InputRecord(metrics_path));
  inputs.push_back(std::move(metrics_input));

  // disagreement_curves from the optional decision artifact, with the
  // interquartile range of actual ICPD flagged.
  std::string curves;
  const std::string curve_path =
      o.decision.empty() ? std::string() : ResolveArtifact(o.decision, "disagreement.csv");
  const std::string summary_path =
      curve_path.empty()
          ? std::string()
          : (fs::path(curve_path).parent_path() / "disagreement_summary.json").string();
  absl::StatusOr<CsvTable> decision = absl::NotFoundError("no decision artifact given");
  if (!curve_path.empty() && fs::is_regular_file(curve_path)) {
    decision = CsvTable::ReadFile(curve_path);
  }
  if (decision.ok() && decision->num_rows() > 0) {
    std::map<std::pair<std::string, std::string>, std::pair<double, double>> iqr;
    if (std::ifstream in(summary_path); in) {
      const json summary = json::parse(in, nullptr, /*allow_exceptions=*/false);
      if (summary.is_object() && summary.contains("models")) {
        for (const json& m : summary["models"]) {
          for (const json& f : m.value("funnels", json::array())) {
            iqr[{m.value("model", ""), f.value("funnel", "")}] = {f["iqr"][0].get<double>(),
                                                                  f["iqr"][1].get<double>()};
          }
        }
      }
      PIE_ASSIGN_OR_RETURN(json summary_input, InputRecord(summary_path));
      inputs.push_back(std::move(summary_input));
    }
    curves =
        "# Disagreement between RCT and predicted ICPD verdicts across thresholds; in_iqr "
        "marks thresholds inside the interquartile range of RCT ICPD\n";
    curves += Csv({"model", "funnel", "threshold", "fp_rate", "fn_rate", "disagreement_rate",
                   "n", "in_iqr"});
    size_t col[7];
    const char* const names[7] = {"model", "funnel", "threshold", "fp_rate",
                                  "fn_rate", "disagreement_rate", "n"};
    for (int c = 0; c < 7; ++c) {
      PIE_ASSIGN_OR_RETURN(col[c], decision->RequireColumn(names[c]));
    }
    for (size_t r = 0; r < decision->num_rows(); ++r) {
      std::vector<std::string> row;
      for (size_t c : col) row.push_back(decision->GetString(r, c));
      PIE_ASSIGN_OR_RETURN(const double t, decision->GetDouble(r, col[2]));
      const auto it = iqr.find({row[0], row[1]});
      row.push_back(it == iqr.end()                                        ? ""
                    : t >= it->second.first && t <= it->second.second ? "1"
                                                                       : "0");
      curves += Csv(row);
    }
    PIE_ASSIGN_OR_RETURN(json curve_input, InputRecord(curve_path));
    inputs.push_back(std::move(curve_input));
  } else {
    std::cerr << "warning: "
              << (o.decision.empty() ? "no decision artifact given"
                                     : absl::StrCat("decision artifact ", curve_path,
                                                    decision.ok() ? " is empty" : " is missing"))
              << "; disagreement_curves.csv omitted\n";
  }

  PIE_ASSIGN_OR_RETURN(auto out, OutputDir::Open(o.out));
  PIE_RETURN_IF_ERROR(out->WriteText("icpd_by_funnel.csv", by_funnel));
  PIE_RETURN_IF_ERROR(out->WriteText("calibration_factors.csv", calibration));
  PIE_RETURN_IF_ERROR(out->WriteText("percent_wrmse_by_model.csv", percent));
  if (!curves.empty()) PIE_RETURN_IF_ERROR(out->WriteText("disagreement_curves.csv", curves));
  json run = {{"config",
               {{"summaries", o.summaries},
                {"evaluation", o.evaluation},
                {"decision", o.decision},
                {"schema", o.schema.empty() ? "(default)" : o.schema},
                {"weighted_calibration", !o.unweighted_cf},
                {"gamma_grouping", std::string(GammaGroupingName(o.gamma_grouping))}}},
              {"schema_version", data.schema.version},
              {"inputs", std::move(inputs)}};
  return out->Commit("report", std::move(run));
}

}  // namespace pie::cli
