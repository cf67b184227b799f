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
#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "pie/estimators.h"
#include "pie/random_forest.h"
#include "pie/simulator.h"

namespace pie {
namespace {

struct Design {
  std::vector<double> x, y, w;
  size_t p = 0;
};

Design RandomDesign(size_t n, size_t p) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Design d;
  d.p = p;
  d.x.resize(n * p);
  for (double& v : d.x) v = u(rng);
  for (size_t i = 0; i < n; ++i) {
    d.y.push_back(d.x[i * p] + 0.5 * d.x[i * p + 1] * d.x[i * p + 1] + 0.1 * u(rng));
    d.w.push_back(0.1 + u(rng));
  }
  return d;
}

// One bootstrap tree on an RCT-pool-sized design (rows x features).
void BM_TreeFit(benchmark::State& state) {
  const Design d = RandomDesign(static_cast<size_t>(state.range(0)),
                                static_cast<size_t>(state.range(1)));
  const ForestData data(d.x, d.p, d.y);
  const TreeParams params{.features_per_split = static_cast<int>((d.p + 2) / 3)};
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RegressionTree::Fit(data, d.w, params, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TreeFit)->Args({300, 4})->Args({300, 35})->Args({2000, 35});

void BM_ForestPredict(benchmark::State& state) {
  const Design d = RandomDesign(300, 35);
  const ForestData data(d.x, d.p, d.y);
  const RandomForest forest =
      RandomForest::Fit(data, d.w, TreeParams{.features_per_split = 12}, 200, 3);
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest.Predict(data.row(i++ % data.rows())));
  }
}
BENCHMARK(BM_ForestPredict);

void BM_GenerateExperiment(benchmark::State& state) {
  SimulationConfig cfg;
  cfg.users_per_rct = {static_cast<double>(state.range(0)), 0.0};
  int64_t index = 0;
  for (auto _ : state) {
    auto rct = GenerateExperiment(cfg, index++);
    benchmark::DoNotOptimize(rct);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateExperiment)->Arg(5000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_SummarizeRct(benchmark::State& state) {
  SimulationConfig cfg;
  auto rct = GenerateExperiment(cfg, 0);
  const EventLogFile file = rct->ToFile();
  for (auto _ : state) {
    benchmark::DoNotOptimize(SummarizeRct(file));
  }
}
BENCHMARK(BM_SummarizeRct)->Unit(benchmark::kMicrosecond);

void BM_RandomizationCheck(benchmark::State& state) {
  const int64_t n = state.range(0);
  const int64_t n_test = n * 9 / 10 + 37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RandomizationCheck(n_test, n - n_test, 0.9));
  }
}
BENCHMARK(BM_RandomizationCheck)->Arg(1000)->Arg(50000)->Arg(1000000);

}  // namespace
}  // namespace pie

BENCHMARK_MAIN();
