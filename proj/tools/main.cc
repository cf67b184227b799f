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
// pie: simulate ad RCTs, summarize them, and evaluate proxy ICPD models.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "commands.h"
#include "pie/weighting.h"

namespace {

using pie::cli::DecideOptions;
using pie::cli::EstimateOptions;
using pie::cli::EvaluateOptions;
using pie::cli::FitOptions;
using pie::cli::ReportOptions;
using pie::cli::SimulateOptions;

// Flag, then environment, then `fallback`.
template <typename T>
T FromEnv(const char* name, T fallback) {
  const char* value = std::getenv(name);
  if (value == nullptr) return fallback;
  T parsed;
  if (!absl::SimpleAtoi(value, &parsed)) {
    std::cerr << "warning: ignoring unparsable " << name << "=" << value << "\n";
    return fallback;
  }
  return parsed;
}

struct SharedFlags {
  std::string schema;
  bool lenient_vertical = false;
};

void AddSchemaFlags(CLI::App* cmd, SharedFlags* flags) {
  cmd->add_option("--schema", flags->schema, "Category schema JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--lenient-vertical", flags->lenient_vertical,
                "Map unknown verticals to 'other' instead of failing");
}

void AddGammaFlag(CLI::App* cmd, std::string* grouping) {
  cmd->add_option("--gamma-grouping", *grouping,
                  "Cells for between-RCT variance: global, funnel, funnel_vertical")
      ->check(CLI::IsMember({"global", "funnel", "funnel_vertical"}))
      ->capture_default_str();
}

void AddFitFlags(CLI::App* cmd, FitOptions* o, SharedFlags* shared, std::string* grouping,
                 std::optional<uint64_t>* seed, std::optional<int>* threads) {
  AddSchemaFlags(cmd, shared);
  AddGammaFlag(cmd, grouping);
  cmd->add_option("--summaries", o->summaries, "rct_summaries.csv")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o->out, "Output directory")->required();
  cmd->add_option("--model", o->models, "Model spec, repeatable or comma separated; 'all'")
      ->required()
      ->delimiter(',');
  cmd->add_option("--seed", *seed, "Root seed (default: PIE_SEED, then 20230331)");
  cmd->add_option("--threads", *threads, "Worker threads (default: PIE_THREADS, then 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--unweighted-cf", o->unweighted_cf, "Unweighted calibration regressions");
  cmd->add_flag("--pooled-cf", o->pooled_cf, "One calibration factor across funnels");
  cmd->add_option("--trees", o->forest.n_trees, "Trees per forest")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--cv-trees", o->forest.cv_n_trees, "Trees per tuning fit (0: --trees)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--cv-folds", o->forest.cv_folds, "Tuning folds")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  cmd->add_flag("!--no-tune", o->forest.tune, "Skip forest hyperparameter tuning");
}

absl::Status ResolveFit(FitOptions* o, const SharedFlags& shared, const std::string& grouping,
                        const std::optional<uint64_t>& seed, const std::optional<int>& threads) {
  o->schema = shared.schema;
  o->lenient_vertical = shared.lenient_vertical;
  o->seed = seed.value_or(FromEnv<uint64_t>("PIE_SEED", pie::cli::kDefaultSeed));
  o->threads = threads.value_or(FromEnv<int>("PIE_THREADS", 1));
  auto parsed = pie::ParseGammaGrouping(grouping);
  if (!parsed.ok()) return parsed.status();
  o->gamma_grouping = *parsed;
  return absl::OkStatus();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ad RCT simulation, ICPD estimation and "
               "proxy-model evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pie 1.0.0");

  // simulate
  SimulateOptions sim;
  std::optional<uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic ad RCT event logs");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--config", sim.config, "SimulationConfig JSON")
      ->check(CLI::ExistingFile);
  simulate->add_option("--n-rcts", sim.n_rcts, "Number of RCTs");
  simulate->add_option("--users", sim.users_per_rct, "Median users per RCT");
  simulate->add_option("--seed", sim_seed, "Root seed (default: PIE_SEED, then config)");
  simulate->add_option("--min-test-conversions", sim.min_test_conversions,
                       "Drop RCTs with fewer test-group conversions");
  simulate->add_option("--selection-bias", sim.selection_bias_strength,
                       "Strength of exposure selection on conversion propensity");

  // estimate
  EstimateOptions est;
  SharedFlags est_shared;
  std::optional<int> est_threads;
  auto* estimate = app.add_subcommand("estimate", "Summarize event logs into rct_summaries.csv");
  AddSchemaFlags(estimate, &est_shared);
  estimate->add_option("--input", est.input, "Simulation directory, log directory or summaries CSV")
      ->required()
      ->check(CLI::ExistingPath);
  estimate->add_option("--out", est.out, "Output directory")->required();
  estimate->add_option("--threads", est_threads, "Worker threads (default: PIE_THREADS, then 1)")
      ->check(CLI::PositiveNumber);

  // train
  FitOptions train_opts;
  SharedFlags train_shared;
  std::string train_grouping = "funnel";
  std::optional<uint64_t> train_seed;
  std::optional<int> train_threads;
  auto* train = app.add_subcommand("train", "Fit models on all RCTs and save them");
  AddFitFlags(train, &train_opts, &train_shared, &train_grouping, &train_seed, &train_threads);

  // evaluate
  EvaluateOptions eval;
  SharedFlags eval_shared;
  std::string eval_grouping = "funnel";
  std::optional<uint64_t> eval_seed;
  std::optional<int> eval_threads;
  auto* evaluate = app.add_subcommand("evaluate", "Leave-one-RCT-out evaluation");
  AddFitFlags(evaluate, &eval.fit, &eval_shared, &eval_grouping, &eval_seed, &eval_threads);
  evaluate->add_flag("--group-by-experiment", eval.group_by_experiment,
                     "Hold out all RCTs of an experiment together");

  // decide
  DecideOptions dec;
  auto* decide = app.add_subcommand("decide", "Disagreement between RCT and model verdicts");
  decide->add_option("--predictions", dec.predictions, "Evaluation directory or predictions.csv")
      ->required()
      ->check(CLI::ExistingPath);
  decide->add_option("--out", dec.out, "Output directory")->required();
  decide->add_option("--model", dec.models, "Restrict to these models")->delimiter(',');
  decide->add_option("--grid-points", dec.grid_points, "Thresholds per curve")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();

  // report
  ReportOptions rep;
  SharedFlags rep_shared;
  std::string rep_grouping = "funnel";
  auto* report = app.add_subcommand("report", "Plot-ready data files");
  AddSchemaFlags(report, &rep_shared);
  AddGammaFlag(report, &rep_grouping);
  report->add_option("--summaries", rep.summaries, "rct_summaries.csv")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--evaluation", rep.evaluation, "Evaluation directory or fit_metrics.csv")
      ->required();
  report->add_option("--decision", rep.decision, "Decision directory or disagreement.csv");
  report->add_option("--out", rep.out, "Output directory")->required();
  report->add_flag("--unweighted-cf", rep.unweighted_cf, "Unweighted calibration regressions");

  CLI11_PARSE(app, argc, argv);

  absl::Status status;
  if (simulate->parsed()) {
    if (sim_seed) {
      sim.seed = sim_seed;
    } else if (std::getenv("PIE_SEED") != nullptr) {
      sim.seed = FromEnv<uint64_t>("PIE_SEED", pie::cli::kDefaultSeed);
    }
    status = pie::cli::RunSimulate(sim);
  } else if (estimate->parsed()) {
    est.schema = est_shared.schema;
    est.lenient_vertical = est_shared.lenient_vertical;
    est.threads = est_threads.value_or(FromEnv<int>("PIE_THREADS", 1));
    status = pie::cli::RunEstimate(est);
  } else if (train->parsed()) {
    status = ResolveFit(&train_opts, train_shared, train_grouping, train_seed, train_threads);
    if (status.ok()) status = pie::cli::RunTrain(train_opts);
  } else if (evaluate->parsed()) {
    status = ResolveFit(&eval.fit, eval_shared, eval_grouping, eval_seed, eval_threads);
    if (status.ok()) status = pie::cli::RunEvaluate(eval);
  } else if (decide->parsed()) {
    status = pie::cli::RunDecide(dec);
  } else if (report->parsed()) {
    rep.schema = rep_shared.schema;
    rep.lenient_vertical = rep_shared.lenient_vertical;
    auto grouping = pie::ParseGammaGrouping(rep_grouping);
    status = grouping.status();
    if (status.ok()) {
      rep.gamma_grouping = *grouping;
      status = pie::cli::RunReport(rep);
    }
  }
  if (!status.ok()) {
    std::cerr << "pie " << app.get_subcommands().front()->get_name()
              << ": error: " << status.message() << "\n";
    return 1;
  }
  return 0;
}
