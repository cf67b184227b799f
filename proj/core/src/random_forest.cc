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
#include "pie/random_forest.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "pie/folds.h"
#include "pie/random.h"

namespace pie {
namespace {

struct NodeStats {
  double w = 0.0;
  double s = 0.0;
  double y_min = INFINITY;
  double y_max = -INFINITY;

  void Add(double weight, double y) {
    w += weight;
    s += weight * y;
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
};

// A node awaiting a split decision; its rows occupy [begin, end) of every
// row list.
struct PendingNode {
  int32_t node = 0;
  size_t begin = 0;
  size_t end = 0;
  int depth = 0;
  NodeStats stats;
};

struct SplitChoice {
  double gain = 0.0;
  int32_t feature = -1;
  double threshold = 0.0;

  // Strictly better only, so earlier (lower) features and thresholds win ties.
  void Offer(double candidate_gain, size_t f, double t) {
    if (candidate_gain > gain) {
      gain = candidate_gain;
      feature = static_cast<int32_t>(f);
      threshold = t;
    }
  }
};

// Marks k distinct features drawn by a partial Fisher-Yates shuffle; k <= 0
// or k >= p selects all. `perm` is scratch space.
void SampleFeatures(size_t p, int k, Rng& rng, std::vector<size_t>& perm,
                    std::vector<char>& use) {
  use.assign(p, 0);
  if (k <= 0 || static_cast<size_t>(k) >= p) {
    std::fill(use.begin(), use.end(), 1);
    return;
  }
  perm.resize(p);
  std::iota(perm.begin(), perm.end(), size_t{0});
  for (size_t i = 0; i < static_cast<size_t>(k); ++i) {
    const size_t remaining = p - i;
    const size_t j =
        i + std::min(remaining - 1,
                     static_cast<size_t>(Uniform01(rng) * static_cast<double>(remaining)));
    std::swap(perm[i], perm[j]);
    use[perm[i]] = 1;
  }
}

}  // namespace

ForestData::ForestData(std::vector<double> x, size_t p, std::vector<double> y)
    : x_(std::move(x)), p_(p), y_(std::move(y)) {
  const size_t n = y_.size();
  x_col_.resize(n * p_);
  binary_.assign(p_, 1);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < p_; ++j) {
      const double v = x_[i * p_ + j];
      x_col_[j * n + i] = v;
      if (v != 0.0 && v != 1.0) binary_[j] = 0;
    }
  }
  order_.resize(n * p_);
  for (size_t j = 0; j < p_; ++j) {
    uint32_t* column = order_.data() + j * n;
    std::iota(column, column + n, 0u);
    std::stable_sort(column, column + n, [&](uint32_t a, uint32_t b) {
      return x_[a * p_ + j] < x_[b * p_ + j];
    });
  }
}

RegressionTree RegressionTree::Fit(const ForestData& data,
                                   std::span<const double> weight,
                                   const TreeParams& params, uint64_t seed) {
  const size_t n = data.rows();
  const size_t p = data.cols();
  Rng rng(seed);

  std::vector<double> sw(n, 0.0);
  if (params.bootstrap) {
    std::vector<double> cumulative(n);
    double running = 0.0;
    for (size_t i = 0; i < n; ++i) {
      running += weight[i];
      cumulative[i] = running;
    }
    for (size_t draw = 0; draw < n && running > 0.0; ++draw) {
      const double u = Uniform01(rng) * running;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      sw[std::min(static_cast<size_t>(it - cumulative.begin()), n - 1)] += 1.0;
    }
  } else {
    for (size_t i = 0; i < n; ++i) sw[i] = weight[i] > 0.0 ? weight[i] : 0.0;
  }

  RegressionTree tree;
  // Row lists: rows in index order (binary scans and routing) and, per
  // continuous feature, rows sorted by that feature.
  std::vector<uint32_t> rows;
  NodeStats root;
  for (size_t i = 0; i < n; ++i) {
    if (sw[i] > 0.0) {
      rows.push_back(static_cast<uint32_t>(i));
      root.Add(sw[i], data.y(i));
    }
  }
  tree.nodes_.push_back(Node{.value = root.w > 0.0 ? root.s / root.w : 0.0});
  if (rows.empty()) return tree;
  const double min_leaf = params.min_leaf_fraction * root.w;

  std::vector<size_t> continuous;
  std::vector<int32_t> sorted_slot(p, -1);
  for (size_t f = 0; f < p; ++f) {
    if (!data.is_binary(f)) {
      sorted_slot[f] = static_cast<int32_t>(continuous.size());
      continuous.push_back(f);
    }
  }
  const size_t m = rows.size();
  std::vector<uint32_t> sorted(continuous.size() * m);
  for (size_t c = 0; c < continuous.size(); ++c) {
    size_t k = 0;
    for (uint32_t r : data.order(continuous[c])) {
      if (sw[r] > 0.0) sorted[c * m + k++] = r;
    }
  }
  std::vector<char> goes_left(n, 0);
  std::vector<uint32_t> scratch(m);
  auto partition = [&](uint32_t* list, size_t begin, size_t end) {
    size_t left = begin, right = 0;
    for (size_t i = begin; i < end; ++i) {
      const uint32_t r = list[i];
      if (goes_left[r]) {
        list[left++] = r;
      } else {
        scratch[right++] = r;
      }
    }
    std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(right),
              list + left);
    return left;
  };

  std::vector<char> use;
  std::vector<size_t> perm;
  std::deque<PendingNode> queue = {PendingNode{0, 0, m, 0, root}};
  while (!queue.empty()) {
    const PendingNode nd = queue.front();
    queue.pop_front();
    const NodeStats& st = nd.stats;
    if ((params.max_depth >= 0 && nd.depth >= params.max_depth) ||
        st.w < 2.0 * min_leaf || !(st.y_max > st.y_min)) {
      continue;
    }
    SampleFeatures(p, params.features_per_split, rng, perm, use);

    SplitChoice best;
    auto offer = [&](double wl, double sl, size_t f, double threshold) {
      const double wr = st.w - wl;
      if (wl < min_leaf || wr < min_leaf || !(wl > 0.0) || !(wr > 0.0)) return;
      const double sr = st.s - sl;
      best.Offer(sl * sl / wl + sr * sr / wr - st.s * st.s / st.w, f, threshold);
    };
    for (size_t f = 0; f < p; ++f) {
      if (!use[f]) continue;
      if (sorted_slot[f] < 0) {
        // Binary column: the only split is 0 | 1.
        double w1 = 0.0, s1 = 0.0;
        for (size_t i = nd.begin; i < nd.end; ++i) {
          const uint32_t r = rows[i];
          if (data.column_value(f, r) != 0.0) {
            w1 += sw[r];
            s1 += sw[r] * data.y(r);
          }
        }
        if (w1 > 0.0) offer(st.w - w1, st.s - s1, f, 0.5);
        continue;
      }
      const uint32_t* list = sorted.data() + static_cast<size_t>(sorted_slot[f]) * m;
      double wl = 0.0, sl = 0.0;
      double last_x = data.column_value(f, list[nd.begin]);
      for (size_t i = nd.begin; i < nd.end; ++i) {
        const uint32_t r = list[i];
        const double x = data.column_value(f, r);
        if (x > last_x) {
          double threshold = 0.5 * (last_x + x);
          if (!(threshold < x)) threshold = last_x;
          offer(wl, sl, f, threshold);
        }
        wl += sw[r];
        sl += sw[r] * data.y(r);
        last_x = x;
      }
    }
    if (best.feature < 0) continue;

    const auto f = static_cast<size_t>(best.feature);
    NodeStats left_stats, right_stats;
    for (size_t i = nd.begin; i < nd.end; ++i) {
      const uint32_t r = rows[i];
      const bool left = data.column_value(f, r) <= best.threshold;
      goes_left[r] = left ? 1 : 0;
      (left ? left_stats : right_stats).Add(sw[r], data.y(r));
    }
    const size_t mid = partition(rows.data(), nd.begin, nd.end);
    for (size_t c = 0; c < continuous.size(); ++c) {
      partition(sorted.data() + c * m, nd.begin, nd.end);
    }

    const auto left_id = static_cast<int32_t>(tree.nodes_.size());
    Node& parent = tree.nodes_[static_cast<size_t>(nd.node)];
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.left = left_id;
    parent.right = left_id + 1;
    tree.nodes_.push_back(Node{.value = left_stats.s / left_stats.w});
    tree.nodes_.push_back(Node{.value = right_stats.s / right_stats.w});
    queue.push_back(PendingNode{left_id, nd.begin, mid, nd.depth + 1, left_stats});
    queue.push_back(PendingNode{left_id + 1, mid, nd.end, nd.depth + 1, right_stats});
  }
  return tree;
}

double RegressionTree::Predict(std::span<const double> x) const {
  size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const Node& nd = nodes_[i];
    i = static_cast<size_t>(x[static_cast<size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                               : nd.right);
  }
  return nodes_[i].value;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[static_cast<size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

nlohmann::json RegressionTree::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const Node& nd : nodes_) {
    if (nd.feature < 0) {
      rows.push_back({nd.value});
    } else {
      rows.push_back({nd.value, nd.feature, nd.threshold, nd.left, nd.right});
    }
  }
  return rows;
}

absl::StatusOr<RegressionTree> RegressionTree::FromJson(const nlohmann::json& doc) {
  RegressionTree tree;
  try {
    for (const auto& row : doc) {
      Node nd;
      nd.value = row.at(0).get<double>();
      if (row.size() == 5) {
        nd.feature = row.at(1).get<int32_t>();
        nd.threshold = row.at(2).get<double>();
        nd.left = row.at(3).get<int32_t>();
        nd.right = row.at(4).get<int32_t>();
      } else if (row.size() != 1) {
        return absl::InvalidArgumentError("tree node must have 1 or 5 entries");
      }
      tree.nodes_.push_back(nd);
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("tree: ", e.what()));
  }
  const auto count = static_cast<int32_t>(tree.nodes_.size());
  if (count == 0) return absl::InvalidArgumentError("tree has no nodes");
  for (int32_t i = 0; i < count; ++i) {
    const Node& nd = tree.nodes_[static_cast<size_t>(i)];
    if (nd.feature >= 0 &&
        (nd.left <= i || nd.right <= i || nd.left >= count || nd.right >= count)) {
      return absl::InvalidArgumentError("tree child index out of range");
    }
  }
  return tree;
}

RandomForest RandomForest::Fit(const ForestData& data, std::span<const double> weight,
                               const TreeParams& params, int n_trees, uint64_t seed) {
  RandomForest forest;
  forest.trees_.reserve(static_cast<size_t>(std::max(n_trees, 0)));
  for (int t = 0; t < n_trees; ++t) {
    forest.trees_.push_back(RegressionTree::Fit(
        data, weight, params,
        DeriveSeed(seed, {kStageForest, static_cast<uint64_t>(t)})));
  }
  return forest;
}

double RandomForest::Predict(std::span<const double> x) const {
  if (trees_.empty()) return 0.0;
  double sum = 0.0;
  for (const RegressionTree& t : trees_) sum += t.Predict(x);
  return sum / static_cast<double>(trees_.size());
}

std::vector<double> RandomForest::TreePredictions(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(trees_.size());
  for (const RegressionTree& t : trees_) out.push_back(t.Predict(x));
  return out;
}

nlohmann::json RandomForest::ToJson() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const RegressionTree& t : trees_) trees.push_back(t.ToJson());
  return trees;
}

absl::StatusOr<RandomForest> RandomForest::FromJson(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.empty()) {
    return absl::InvalidArgumentError("forest must be a nonempty array of trees");
  }
  RandomForest forest;
  for (const auto& t : doc) {
    auto tree = RegressionTree::FromJson(t);
    if (!tree.ok()) return tree.status();
    forest.trees_.push_back(*std::move(tree));
  }
  return forest;
}

std::vector<TreeParams> TuningGrid(size_t p, const ForestOptions& options) {
  const auto dp = static_cast<double>(p);
  std::vector<int> features;
  for (double v : {std::ceil(dp / 3.0), std::ceil(std::sqrt(dp)), dp}) {
    const int k = std::max(1, static_cast<int>(v));
    if (std::find(features.begin(), features.end(), k) == features.end()) {
      features.push_back(k);
    }
  }
  std::vector<TreeParams> grid;
  for (int k : features) {
    for (double leaf : {0.01, 0.025, 0.05}) {
      grid.push_back(TreeParams{.features_per_split = k,
                                .min_leaf_fraction = leaf,
                                .max_depth = options.max_depth,
                                .bootstrap = options.bootstrap});
    }
  }
  return grid;
}

uint64_t CvFoldSeed(uint64_t tuning_seed) {
  return DeriveSeed(tuning_seed, {kStageFolds});
}

absl::StatusOr<TuningResult> TuneForest(const ForestData& data,
                                        std::span<const double> weight,
                                        std::span<const int> strata,
                                        const ForestOptions& options, uint64_t seed) {
  const size_t n = data.rows();
  if (weight.size() != n || strata.size() != n) {
    return absl::InvalidArgumentError("weights and strata must match the data");
  }
  if (options.cv_folds < 2 || n < static_cast<size_t>(options.cv_folds)) {
    return absl::InvalidArgumentError(
        absl::StrCat("cross-validation needs at least ", options.cv_folds, " records"));
  }
  const int trees = options.cv_n_trees > 0 ? options.cv_n_trees : options.n_trees;
  const std::vector<int> fold =
      StratifiedFolds(strata, options.cv_folds, CvFoldSeed(seed));

  TuningResult result;
  double best = INFINITY;
  std::vector<double> train_weight(n);
  for (const TreeParams& params : TuningGrid(data.cols(), options)) {
    double sum_sq = 0.0, sum_w = 0.0;
    for (int k = 0; k < options.cv_folds; ++k) {
      double train_total = 0.0;
      for (size_t i = 0; i < n; ++i) {
        train_weight[i] = fold[i] == k ? 0.0 : weight[i];
        train_total += train_weight[i];
      }
      if (!(train_total > 0.0)) continue;
      const RandomForest forest = RandomForest::Fit(
          data, train_weight, params, trees,
          DeriveSeed(seed, {kStageFolds, static_cast<uint64_t>(k)}));
      for (size_t i = 0; i < n; ++i) {
        if (fold[i] != k) continue;
        const double e = data.y(i) - forest.Predict(data.row(i));
        sum_sq += weight[i] * e * e;
        sum_w += weight[i];
      }
    }
    const double score = sum_w > 0.0 ? std::sqrt(sum_sq / sum_w) : INFINITY;
    result.candidates.push_back({params, score});
    if (score < best) {
      best = score;
      result.best = params;
    }
  }
  if (!std::isfinite(best)) return absl::InternalError("no finite CV score");
  return result;
}

}  // namespace pie
