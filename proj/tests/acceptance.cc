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
// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "commands.h"
#include "pie/decision.h"
#include "pie/estimators.h"
#include "pie/evaluation.h"
#include "pie/metrics.h"
#include "pie/model.h"
#include "pie/random_forest.h"
#include "pie/regression.h"
#include "pie/simulator.h"
#include "pie/summary.h"
#include "pie/weighting.h"

namespace pie {
namespace {

namespace fs = std::filesystem;

constexpr uint64_t kSeed = 20230331;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int Threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

// Default-configuration population shared by criteria 2, 3, 8 and 11.
struct Population {
  std::vector<RctSummary> summaries;
  std::vector<GroundTruth> truth;
  size_t decomposition_failures = 0;
  std::string error;
};

const Population& DefaultPopulation() {
  static const Population* pop = [] {
    auto* p = new Population;
    SimulationConfig cfg;
    cfg.n_rcts = 500;
    const absl::Status st = SimulateEach(cfg, [&](SimulatedRct rct) -> absl::Status {
      for (AttributionWindow w : kAllWindows) {
        auto ok = VerifyDecomposition(rct.log, rct.truth, w);
        if (!ok.ok()) return ok.status();
        p->decomposition_failures += !*ok;
      }
      auto s = SummarizeRct(rct.ToFile());
      if (!s.ok()) return s.status();
      p->summaries.push_back(*std::move(s));
      p->truth.push_back(rct.truth);
      return absl::OkStatus();
    });
    if (!st.ok()) p->error = std::string(st.message());
    return p;
  }();
  return *pop;
}

Outcome IcpdAndVerdict() {
  auto icpd = Icpd(50.0, 1000.0);
  const bool icpd_exact = icpd.ok() && *icpd == 0.05;
  const Verdict v = Classify(0.05, 0.2, 0.1);
  const std::vector<OutcomePair> pair = {{0.05, 0.2}};
  auto rates = RatesAt(pair, 0.1);
  const bool fp = v == Verdict::kFalsePositive && rates.ok() && rates->fp_rate == 1.0 &&
                  rates->fn_rate == 0.0;
  return {icpd_exact && fp,
          absl::StrFormat("ICPD(50, $1000) = %.17g, verdict(actual 0.05, predicted 0.2, t 0.1) = %s",
                          icpd.ok() ? *icpd : NAN, VerdictName(v))};
}

Outcome Coverage() {
  const Population& p = DefaultPopulation();
  if (!p.error.empty()) return {false, p.error};
  size_t covered = 0;
  for (size_t i = 0; i < p.summaries.size(); ++i) {
    const RctSummary& s = p.summaries[i];
    covered += std::abs(s.att - p.truth[i].true_att) <= 1.959963984540054 * s.att_se;
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(p.summaries.size());
  return {p.summaries.size() >= 500 && rate >= 0.93 && rate <= 0.97,
          absl::StrFormat("%zu RCTs, 95%% Wald coverage %.3f (target [0.93, 0.97])",
                          p.summaries.size(), rate)};
}

Outcome DecompositionIdentity() {
  const Population& p = DefaultPopulation();
  if (!p.error.empty()) return {false, p.error};
  return {p.decomposition_failures == 0 && !p.summaries.empty(),
          absl::StrFormat("%zu RCTs x 4 windows, %zu mismatches", p.summaries.size(),
                          p.decomposition_failures)};
}

Outcome DlWeighting() {
  std::vector<std::string> detail;
  bool pass = true;
  auto check = [&](bool ok, const std::string& what) {
    pass &= ok;
    if (!ok) detail.push_back(what);
  };
  const std::vector<EffectEstimate> two_point = {{0.0, 1.0}, {2.0, 1.0}};
  auto g1 = DlBetweenVariance(two_point);
  check(g1.ok() && std::abs(*g1 - 1.0) <= 1e-10, "two-point gamma^2 != 1");
  const std::vector<EffectEstimate> close = {{0.0, 1.0}, {0.1, 1.0}};
  auto g0 = DlBetweenVariance(close);
  check(g0.ok() && *g0 == 0.0, "truncation case not zero");
  const std::vector<std::string> ids2 = {"a", "b"};
  const std::vector<EffectEstimate> norm = {{0.0, 1.0}, {0.0, std::sqrt(3.0)}};
  auto w = ComputeWeights(norm, ids2, 1.0, "g");
  check(w.ok() && std::abs(w->weights[0] - 2.0 / 3.0) <= 1e-10 &&
            std::abs(w->weights[1] - 1.0 / 3.0) <= 1e-10,
        "{2/3, 1/3} normalization");
  const std::vector<std::string> ids3 = {"a", "b", "c"};
  const std::vector<EffectEstimate> iv = {{0.1, 0.5}, {0.4, 1.0}, {0.2, 2.0}};
  auto inv = ComputeWeights(iv, ids3, 0.0, "g");
  const double total = 4.0 + 1.0 + 0.25;
  check(inv.ok() && inv->weights[0] == 4.0 / total && inv->weights[1] == 1.0 / total &&
            inv->weights[2] == 0.25 / total,
        "gamma^2 = 0 is not exactly inverse-variance");
  return {pass, pass ? "two-point 1, truncation 0, {2/3, 1/3}, inverse-variance exact"
                     : absl::StrJoin(detail, "; ")};
}

Outcome CalibrationClosedForm() {
  std::mt19937_64 rng(501);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool ok = true;
  for (int t = 0; t < 100; ++t) {
    const size_t n = 5 + static_cast<size_t>(u(rng) * 200);
    std::vector<double> x(n), y(n), w(n);
    long double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
      x[i] = 0.01 + u(rng);
      y[i] = 1.7 * x[i] + (u(rng) - 0.5);
      w[i] = u(rng) + 1e-3;
      sxy += static_cast<long double>(w[i]) * x[i] * y[i];
      sxx += static_cast<long double>(w[i]) * x[i] * x[i];
    }
    auto fit = FitCalibration(x, y, w);
    if (!fit.ok()) {
      ok = false;
      continue;
    }
    worst = std::max(worst, std::abs(fit->theta - static_cast<double>(sxy / sxx)));
  }
  std::vector<double> x = {0.5, 1.0, 2.0, 4.0}, y, w = {1.0, 2.0, 0.5, 1.5};
  for (double v : x) y.push_back(2.5 * v);
  auto exact = FitCalibration(x, y, w);
  double residual = 0.0;
  if (exact.ok()) {
    for (size_t i = 0; i < x.size(); ++i) {
      residual = std::max(residual, std::abs(y[i] - exact->theta * x[i]));
    }
  }
  const bool pass = ok && worst <= 1e-10 && exact.ok() && exact->theta == 2.5 && residual == 0.0;
  return {pass, absl::StrFormat("max |theta - oracle| = %.3g over 100 instances; proportional "
                                "case theta = %.17g, max residual %.3g",
                                worst, exact.ok() ? exact->theta : NAN, residual)};
}

Outcome MetricOracles() {
  bool pass = true;
  const std::vector<double> y = {0.0, 2.0}, zero = {0.0, 0.0}, half = {0.5, 0.5};
  auto root2 = Wrmse(y, zero, half);
  pass &= root2.ok() && std::abs(*root2 - std::sqrt(2.0)) <= 1e-12;
  auto perfect = Wrmse(y, y, half);
  pass &= perfect.ok() && *perfect == 0.0;
  const std::vector<double> a = {1.0, 3.0};
  auto p50 = PercentWrmse(1.0, a, half);
  auto p100 = PercentWrmse(2.0, a, half);
  pass &= p50.ok() && std::abs(*p50 - 0.5) <= 1e-12 && p100.ok() && std::abs(*p100 - 1.0) <= 1e-12;

  // WRMSE_all^2 = sum_p W_p WRMSE_p^2 with W_p the subset's weight share.
  std::mt19937_64 rng(602);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const size_t n = 40;
    std::vector<PredictionRow> rows(n);
    for (size_t i = 0; i < n; ++i) {
      rows[i].rct_id = absl::StrCat("r", i);
      rows[i].funnel = kAllFunnels[i % 3];
      rows[i].vertical = kAllVerticals[i % kAllVerticals.size()];
      rows[i].actual = 0.1 + u(rng);
      rows[i].predicted = u(rng);
      rows[i].raw_weight = 0.05 + u(rng);
    }
    double total = 0;
    for (const auto& r : rows) total += r.raw_weight;
    for (auto& r : rows) r.weight = r.raw_weight / total;
    auto subsets = ComputeSubsetMetrics(rows);
    if (!subsets.ok()) return {false, std::string(subsets.status().message())};
    double all = 0, combined = 0;
    for (const SubsetMetrics& m : *subsets) {
      if (m.subset_type == "all") all = m.wrmse * m.wrmse;
      if (m.subset_type == "funnel") combined += m.weight_share * m.wrmse * m.wrmse;
    }
    worst = std::max(worst, std::abs(all - combined));
  }
  pass &= worst <= 1e-10;
  return {pass, absl::StrFormat("sqrt(2) %.17g, perfect %g, percent {%.3g, %.3g}, subset identity "
                                "max error %.3g",
                                root2.ok() ? *root2 : NAN, perfect.ok() ? *perfect : NAN,
                                p50.ok() ? *p50 : NAN, p100.ok() ? *p100 : NAN, worst)};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome LeaveOneOutHygiene() {
  const Population& p = DefaultPopulation();
  if (!p.error.empty()) return {false, p.error};
  const std::vector<RctSummary> data(p.summaries.begin(), p.summaries.begin() + 60);
  EvaluationOptions options;
  options.model.forest.n_trees = 40;
  options.model.forest.cv_n_trees = 10;
  options.model.forest.cv_folds = 5;
  options.threads = Threads();
  const CategorySchema& schema = CategorySchema::Default();

  size_t changed = 0, checked = 0;
  for (ModelSpec spec : {ModelSpec::kCfLc1d, ModelSpec::kLmM1, ModelSpec::kRfM2}) {
    auto base = LeaveOneOut(data, spec, schema, options, kSeed);
    if (!base.ok()) return {false, std::string(base.status().message())};
    for (size_t k : {0, 23, 59}) {
      std::vector<RctSummary> mutated = data;
      mutated[k].icpd *= 25.0;
      auto again = LeaveOneOut(mutated, spec, schema, options, kSeed);
      if (!again.ok()) return {false, std::string(again.status().message())};
      ++checked;
      changed += again->rows[k].predicted != base->rows[k].predicted;
    }
  }

  // Two CLI evaluations with the same seed write the same bytes.
  const fs::path dir = fs::temp_directory_path() / absl::StrCat("pie_acceptance_", ::getpid());
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string summaries = (dir / "rct_summaries.csv").string();
  if (auto st = WriteSummariesCsv(summaries, data); !st.ok()) {
    return {false, std::string(st.message())};
  }
  std::string bytes[2];
  for (int run = 0; run < 2; ++run) {
    cli::EvaluateOptions o;
    o.fit.summaries = summaries;
    o.fit.out = (dir / absl::StrCat("eval", run)).string();
    o.fit.models = {"cf-lc1d", "lm-m1", "rf-m2"};
    o.fit.seed = kSeed;
    o.fit.threads = run == 0 ? 1 : Threads() + 1;
    o.fit.forest = options.model.forest;
    if (auto st = cli::RunEvaluate(o); !st.ok()) return {false, std::string(st.message())};
    bytes[run] = Slurp(fs::path(o.fit.out) / "predictions.csv");
  }
  fs::remove_all(dir);
  const bool identical = !bytes[0].empty() && bytes[0] == bytes[1];
  return {changed == 0 && identical,
          absl::StrFormat("%zu/%zu held-out predictions moved after mutating their target; "
                          "predictions.csv %s across two runs",
                          changed, checked, identical ? "bit-identical" : "DIFFERS")};
}

struct ModelResult {
  std::map<FunnelLevel, double> percent_wrmse;
  std::map<FunnelLevel, double> disagreement_at_median;
};

absl::StatusOr<ModelResult> EvaluateSpec(std::span<const RctSummary> data, ModelSpec spec) {
  EvaluationOptions options;
  options.model.forest.n_trees = 200;
  options.model.forest.cv_n_trees = 30;
  options.threads = Threads();
  auto report = LeaveOneOut(data, spec, CategorySchema::Default(), options, kSeed);
  if (!report.ok()) return report.status();
  ModelResult out;
  for (const SubsetMetrics& m : report->subsets) {
    if (m.subset_type != "funnel") continue;
    auto f = ParseFunnel(m.subset);
    if (f.ok()) out.percent_wrmse[*f] = m.percent_wrmse;
  }
  for (FunnelLevel f : kAllFunnels) {
    std::vector<OutcomePair> pairs;
    std::vector<double> actual;
    for (const PredictionRow& r : report->rows) {
      if (r.funnel != f) continue;
      pairs.push_back({r.actual, r.predicted});
      actual.push_back(r.actual);
    }
    if (pairs.empty()) continue;
    const std::vector<double> ones(actual.size(), 1.0);
    auto median = WeightedPercentile(actual, ones, 0.5);
    auto rates = RatesAt(pairs, *median);
    if (!rates.ok()) return rates.status();
    out.disagreement_at_median[f] = rates->disagreement_rate;
  }
  return out;
}

Outcome QualitativeOrdering() {
  const Population& p = DefaultPopulation();
  if (!p.error.empty()) return {false, p.error};
  const std::vector<RctSummary> data(p.summaries.begin(), p.summaries.begin() + 300);
  std::map<ModelSpec, ModelResult> results;
  const ModelSpec specs[] = {ModelSpec::kRawLc1h, ModelSpec::kRawLc1d, ModelSpec::kRawLc7d,
                             ModelSpec::kRawLc28d, ModelSpec::kCfLc1h,  ModelSpec::kCfLc1d,
                             ModelSpec::kCfLc7d,  ModelSpec::kCfLc28d, ModelSpec::kRfM2};
  for (ModelSpec spec : specs) {
    const auto start = std::chrono::steady_clock::now();
    auto r = EvaluateSpec(data, spec);
    if (!r.ok()) return {false, absl::StrCat(ModelSpecName(spec), ": ", r.status().message())};
    results[spec] = *r;
    std::printf("      %-9s %6.1fs  percent WRMSE", std::string(ModelSpecName(spec)).c_str(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    for (FunnelLevel f : kAllFunnels) {
      std::printf(" %s %.3f", std::string(FunnelName(f)).c_str(), r->percent_wrmse[f]);
    }
    std::printf("  disagreement@median");
    for (FunnelLevel f : kAllFunnels) std::printf(" %.3f", r->disagreement_at_median[f]);
    std::printf("\n");
    std::fflush(stdout);
  }

  std::vector<std::string> violations;
  const ModelResult& rf = results[ModelSpec::kRfM2];
  const ModelResult& raw28 = results[ModelSpec::kRawLc28d];
  const std::pair<ModelSpec, ModelSpec> cf_raw[] = {{ModelSpec::kCfLc1h, ModelSpec::kRawLc1h},
                                                   {ModelSpec::kCfLc1d, ModelSpec::kRawLc1d},
                                                   {ModelSpec::kCfLc7d, ModelSpec::kRawLc7d},
                                                   {ModelSpec::kCfLc28d, ModelSpec::kRawLc28d}};
  for (FunnelLevel f : kAllFunnels) {
    const std::string fn(FunnelName(f));
    if (!(rf.percent_wrmse.at(f) < raw28.percent_wrmse.at(f))) {
      violations.push_back(absl::StrCat("rf-m2 >= raw-lc28d WRMSE in ", fn));
    }
    for (const auto& [cf, raw] : cf_raw) {
      if (!(results[cf].percent_wrmse.at(f) <= results[raw].percent_wrmse.at(f))) {
        violations.push_back(absl::StrCat(ModelSpecName(cf), " > ", ModelSpecName(raw), " in ", fn));
      }
    }
    if (!(rf.disagreement_at_median.at(f) <= raw28.disagreement_at_median.at(f))) {
      violations.push_back(absl::StrCat("rf-m2 disagreement > raw-lc28d in ", fn));
    }
  }
  return {violations.empty(),
          violations.empty()
              ? "300 RCTs: rf-m2 < raw-lc28d and cf <= raw in every funnel; rf-m2 "
                "disagreement <= raw-lc28d at every funnel median"
              : absl::StrJoin(violations, "; ")};
}

Outcome RandomizationDistribution() {
  SimulationConfig cfg;
  cfg.n_rcts = 1000;
  cfg.rcts_per_experiment = 1;
  cfg.users_per_rct = {5000.0, 0.0};
  cfg.seed = kSeed + 9;
  size_t n = 0, significant = 0;
  const absl::Status st = SimulateEach(cfg, [&](SimulatedRct rct) -> absl::Status {
    const ArmCounts c = CountArms(rct.log);
    auto pvalue = RandomizationCheck(c.n_test, c.n_control, rct.planned_test_share);
    if (!pvalue.ok()) return pvalue.status();
    ++n;
    significant += *pvalue < 0.05;
    return absl::OkStatus();
  });
  if (!st.ok()) return {false, std::string(st.message())};
  const double rate = static_cast<double>(significant) / static_cast<double>(n);
  return {n == 1000 && rate >= 0.03 && rate <= 0.08,
          absl::StrFormat("%zu experiments, fraction p < 0.05 = %.3f (target [0.03, 0.08])", n,
                          rate)};
}

Outcome SelectionBias() {
  std::vector<double> naive, wald_error;
  for (uint64_t s = 1; s <= 100; ++s) {
    SimulationConfig cfg;
    cfg.n_rcts = 1;
    cfg.seed = s;
    cfg.selection_bias_strength = kHighSelectionBias;
    for (LogNormalSpec& lift : cfg.treatment_lift) lift = {0.0, 0.0};
    auto rct = GenerateExperiment(cfg, 0);
    if (!rct.ok()) return {false, std::string(rct.status().message())};
    auto n = NaiveObservationalAtt(rct->log);
    auto att = EstimateAtt(CountArms(rct->log));
    if (!n.ok() || !att.ok()) return {false, "estimation failed"};
    naive.push_back(std::abs(*n));
    wald_error.push_back(std::abs(att->tau - rct->truth.true_att));
  }
  const double mn = Median(naive), mw = Median(wald_error);
  return {mn > 5.0 * mw, absl::StrFormat("100 seeds, zero lift: median |naive| %.3g, median "
                                         "|Wald error| %.3g, ratio %.1f (needs > 5)",
                                         mn, mw, mn / mw)};
}

Outcome SimulatorCalibration() {
  const Population& p = DefaultPopulation();
  if (!p.error.empty()) return {false, p.error};
  std::map<FunnelLevel, std::vector<double>> est, truth;
  for (size_t i = 0; i < p.summaries.size(); ++i) {
    const FunnelLevel f = p.summaries[i].characteristics.funnel;
    est[f].push_back(p.summaries[i].icpd);
    truth[f].push_back(p.truth[i].true_icpd);
  }
  const std::map<FunnelLevel, double> target = {
      {FunnelLevel::kLower, 1.0}, {FunnelLevel::kMid, 2.6}, {FunnelLevel::kUpper, 11.69}};
  bool pass = p.summaries.size() >= 300;
  std::string detail = absl::StrCat(p.summaries.size(), " RCTs, normalized medians (RCT / true):");
  for (FunnelLevel f : kAllFunnels) {
    const double e = Median(est[f]) / Median(est[FunnelLevel::kLower]);
    const double t = Median(truth[f]) / Median(truth[FunnelLevel::kLower]);
    const double want = target.at(f);
    pass &= std::abs(e - want) <= 0.25 * want && std::abs(t - want) <= 0.25 * want;
    absl::StrAppendFormat(&detail, " %s %.2f/%.2f", FunnelName(f), e, t);
  }
  absl::StrAppend(&detail, " (targets 1, 2.6, 11.69 +/-25%)");
  return {pass, detail};
}

Outcome ForestProperties() {
  std::mt19937_64 rng(1201);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const size_t n = 200, p = 5;
  std::vector<double> x(n * p), y(n), w(n);
  for (double& v : x) v = u(rng);
  for (size_t i = 0; i < n; ++i) {
    y[i] = 2.0 * x[i * p] + std::sin(6.0 * x[i * p + 1]) + 0.1 * u(rng);
    w[i] = 0.01 + u(rng);
  }
  const ForestData data(x, p, y);

  double sw = 0, swy = 0;
  for (size_t i = 0; i < n; ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  const RegressionTree stump =
      RegressionTree::Fit(data, w, TreeParams{.max_depth = 0, .bootstrap = false}, 3);
  const double depth0 = std::abs(stump.Predict(data.row(0)) - swy / sw);

  const TreeParams params{.features_per_split = 2};
  const RandomForest forest = RandomForest::Fit(data, w, params, 30, 7);
  double mean_gap = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const std::vector<double> per_tree = forest.TreePredictions(data.row(i));
    double mean = 0.0;
    for (double v : per_tree) mean += v;
    mean /= static_cast<double>(per_tree.size());
    mean_gap = std::max(mean_gap, std::abs(forest.Predict(data.row(i)) - mean));
  }

  double scale_gap = 0.0;
  for (double scale : {1e-3, 7.0, 4096.0}) {
    std::vector<double> scaled = w;
    for (double& v : scaled) v *= scale;
    for (bool bootstrap : {false, true}) {
      const TreeParams tp{.features_per_split = 2, .bootstrap = bootstrap};
      const RandomForest a = RandomForest::Fit(data, w, tp, 15, 11);
      const RandomForest b = RandomForest::Fit(data, scaled, tp, 15, 11);
      for (size_t i = 0; i < n; ++i) {
        scale_gap = std::max(scale_gap, std::abs(a.Predict(data.row(i)) - b.Predict(data.row(i))));
      }
    }
  }
  return {depth0 <= 1e-10 && mean_gap <= 1e-10 && scale_gap <= 1e-10,
          absl::StrFormat("depth-0 gap %.3g, ensemble-vs-mean gap %.3g, weight-scaling gap %.3g",
                          depth0, mean_gap, scale_gap)};
}

}  // namespace
}  // namespace pie

int main() {
  using pie::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"ICPD arithmetic and false-positive verdict", pie::IcpdAndVerdict},
      {"Wald interval coverage", pie::Coverage},
      {"Incremental-conversion decomposition", pie::DecompositionIdentity},
      {"DerSimonian-Laird weighting", pie::DlWeighting},
      {"Calibration closed form", pie::CalibrationClosedForm},
      {"WRMSE and percent WRMSE", pie::MetricOracles},
      {"Leave-one-out hygiene", pie::LeaveOneOutHygiene},
      {"Qualitative model ordering", pie::QualitativeOrdering},
      {"Randomization-check distribution", pie::RandomizationDistribution},
      {"Selection bias", pie::SelectionBias},
      {"Simulator calibration", pie::SimulatorCalibration},
      {"Forest properties", pie::ForestProperties},
  };
  int failures = 0;
  int id = 0;
  for (const auto& [name, run] : criteria) {
    ++id;
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
