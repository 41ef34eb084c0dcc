#pragma once

// CART regression trees, Random Forest and Gradient Boosting.
//
// Training schedule (fixes every random draw, so results depend only on the
// multiset of training rows and the seed):
//   1. Rows are sorted lexicographically by (l, p, s, f, y) before anything else.
//   2. One std::mt19937_64 seeded with params.seed drives all draws, in order.
//   3. Random Forest, per tree: if bootstrap, n draws of rng() % n pick rows of
//      the sorted table. Then the tree is grown depth first, left child first.
//   4. At each node with max_features < 4, candidate features are chosen by a
//      partial Fisher-Yates shuffle of {0,1,2,3} using rng() % remaining.
//   5. Gradient Boosting draws nothing: every stage sees all rows and features.
// Split choice: largest reduction in squared error; ties keep the lowest feature
// index, then the lowest threshold. Thresholds are midpoints between adjacent
// distinct values and a row goes left when x[feature] <= threshold.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "fuse/errors.hpp"
#include "fuse/features.hpp"

namespace fuse {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Nodes in preorder; node 0 is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(const FeatureVector& x) const {
    size_t i = 0;
    while (nodes[i].feature >= 0) {
      i = static_cast<size_t>(x[static_cast<size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                                              : nodes[i].right);
    }
    return nodes[i].value;
  }

  size_t depth() const {
    std::vector<size_t> d(nodes.size(), 0);
    size_t best = 0;
    for (size_t i = 0; i < nodes.size(); ++i) {
      best = std::max(best, d[i]);
      if (nodes[i].feature >= 0) d[static_cast<size_t>(nodes[i].left)] = d[static_cast<size_t>(nodes[i].right)] = d[i] + 1;
    }
    return best;
  }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

enum class EnsembleKind { kRandomForest, kGradientBoosting };

inline const char* to_string(EnsembleKind k) {
  return k == EnsembleKind::kRandomForest ? "random_forest" : "gradient_boosting";
}

inline EnsembleKind parse_ensemble_kind(const std::string& s) {
  if (s == "random_forest") return EnsembleKind::kRandomForest;
  if (s == "gradient_boosting") return EnsembleKind::kGradientBoosting;
  throw DataError("unknown ensemble kind: " + s);
}

struct TreeParams {
  size_t n_trees = 100;
  size_t max_depth = 6;  // 0 means unlimited
  size_t min_leaf = 2;
  double learning_rate = 0.1;  // gradient boosting only
  bool bootstrap = true;       // random forest only
  size_t max_features = kNumFeatures;  // random forest only
  uint64_t seed = 42;

  static TreeParams random_forest() { return {}; }
  static TreeParams gradient_boosting() {
    TreeParams p;
    p.max_depth = 3;
    p.min_leaf = 1;
    p.bootstrap = false;
    return p;
  }

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct TreeEnsemble {
  EnsembleKind kind = EnsembleKind::kRandomForest;
  TreeParams params;
  double base_prediction = 0.0;  // gradient boosting only
  std::vector<RegressionTree> trees;

  double predict(const FeatureVector& x) const {
    if (kind == EnsembleKind::kRandomForest) {
      if (trees.empty()) return base_prediction;
      double sum = 0.0;
      for (const auto& t : trees) sum += t.predict(x);
      return sum / static_cast<double>(trees.size());
    }
    double y = base_prediction;
    for (const auto& t : trees) y += params.learning_rate * t.predict(x);
    return y;
  }

  friend bool operator==(const TreeEnsemble&, const TreeEnsemble&) = default;
};

namespace detail {

struct TrainingRow {
  FeatureVector x;
  double y;
};

inline std::vector<TrainingRow> canonical_rows(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                                               size_t min_rows, const char* what) {
  if (X.size() != y.size()) throw DataError(std::string(what) + ": feature and target counts differ");
  if (X.size() < min_rows) {
    throw NumericError(std::string(what) + " needs at least " + std::to_string(min_rows) + " rows, got " +
                       std::to_string(X.size()));
  }
  std::vector<TrainingRow> rows;
  rows.reserve(X.size());
  for (size_t i = 0; i < X.size(); ++i) {
    for (size_t j = 0; j < kNumFeatures; ++j) {
      if (!std::isfinite(X[i][j])) throw NumericError(std::string(what) + ": non-finite feature in row " + std::to_string(i));
    }
    if (!std::isfinite(y[i])) throw NumericError(std::string(what) + ": non-finite target in row " + std::to_string(i));
    rows.push_back({X[i], y[i]});
  }
  std::sort(rows.begin(), rows.end(), [](const TrainingRow& a, const TrainingRow& b) {
    return std::tie(a.x.l, a.x.p, a.x.s, a.x.f, a.y) < std::tie(b.x.l, b.x.p, b.x.s, b.x.f, b.y);
  });
  return rows;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<TrainingRow>& rows, const std::vector<double>& targets, const TreeParams& params,
              std::mt19937_64& rng)
      : rows_(rows), targets_(targets), params_(params), rng_(rng) {}

  RegressionTree build(std::vector<size_t> sample) {
    tree_.nodes.clear();
    grow(sample, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<size_t>& idx, size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({});
    double sum = 0.0;
    for (size_t i : idx) sum += targets_[i];
    tree_.nodes[static_cast<size_t>(id)].value = sum / static_cast<double>(idx.size());

    const bool depth_left = params_.max_depth == 0 || depth < params_.max_depth;
    const bool pure = std::all_of(idx.begin(), idx.end(), [&](size_t i) { return targets_[i] == targets_[idx[0]]; });
    if (!depth_left || pure || idx.size() < 2 * std::max<size_t>(params_.min_leaf, 1)) return id;

    const auto features = candidate_features();
    int best_feature = -1;
    double best_threshold = 0.0, best_score = -1.0;
    std::vector<size_t> order(idx);
    for (size_t f : features) {
      std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return rows_[a].x[f] < rows_[b].x[f]; });
      // Maximizing SL^2/nL + SR^2/nR is the same as minimizing child squared error.
      double left_sum = 0.0;
      const size_t min_leaf = std::max<size_t>(params_.min_leaf, 1);
      for (size_t k = 1; k < order.size(); ++k) {
        left_sum += targets_[order[k - 1]];
        const double lo = rows_[order[k - 1]].x[f], hi = rows_[order[k]].x[f];
        if (lo == hi || k < min_leaf || order.size() - k < min_leaf) continue;
        const double nl = static_cast<double>(k), nr = static_cast<double>(order.size() - k);
        const double right_sum = sum - left_sum;
        const double score = left_sum * left_sum / nl + right_sum * right_sum / nr;
        const double threshold = lo + (hi - lo) / 2.0;
        const bool better = score > best_score ||
                            (score == best_score && (static_cast<int>(f) < best_feature ||
                                                     (static_cast<int>(f) == best_feature && threshold < best_threshold)));
        if (better) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = threshold;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<size_t> left, right;
    for (size_t i : idx) {
      (rows_[i].x[static_cast<size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    tree_.nodes[static_cast<size_t>(id)].feature = best_feature;
    tree_.nodes[static_cast<size_t>(id)].threshold = best_threshold;
    const int l = grow(left, depth + 1);
    tree_.nodes[static_cast<size_t>(id)].left = l;
    const int r = grow(right, depth + 1);
    tree_.nodes[static_cast<size_t>(id)].right = r;
    return id;
  }

  std::vector<size_t> candidate_features() {
    std::vector<size_t> all(kNumFeatures);
    std::iota(all.begin(), all.end(), size_t{0});
    const size_t k = std::clamp<size_t>(params_.max_features, 1, kNumFeatures);
    if (k == kNumFeatures) return all;
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + static_cast<size_t>(rng_() % (kNumFeatures - i));
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
  }

  const std::vector<TrainingRow>& rows_;
  const std::vector<double>& targets_;
  const TreeParams& params_;
  std::mt19937_64& rng_;
  RegressionTree tree_;
};

}  // namespace detail

inline TreeEnsemble rf_fit(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                           const TreeParams& params = TreeParams::random_forest()) {
  const auto rows = detail::canonical_rows(X, y, 10, "rf_fit");
  std::vector<double> targets;
  for (const auto& r : rows) targets.push_back(r.y);
  TreeEnsemble model;
  model.kind = EnsembleKind::kRandomForest;
  model.params = params;
  model.base_prediction = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(targets.size());
  std::mt19937_64 rng(params.seed);
  detail::TreeBuilder builder(rows, targets, model.params, rng);
  const size_t n = rows.size();
  for (size_t t = 0; t < params.n_trees; ++t) {
    std::vector<size_t> sample(n);
    if (params.bootstrap) {
      for (auto& s : sample) s = static_cast<size_t>(rng() % n);
    } else {
      std::iota(sample.begin(), sample.end(), size_t{0});
    }
    model.trees.push_back(builder.build(std::move(sample)));
  }
  return model;
}

// Training MSE after each stage is written to stage_mse when given (entry 0 is
// the constant base model).
inline TreeEnsemble gbr_fit(const std::vector<FeatureVector>& X, const std::vector<double>& y,
                            const TreeParams& params = TreeParams::gradient_boosting(),
                            std::vector<double>* stage_mse = nullptr) {
  const auto rows = detail::canonical_rows(X, y, 10, "gbr_fit");
  if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
    throw UsageError("gbr_fit: learning_rate must be in (0, 1]");
  }
  const size_t n = rows.size();
  TreeEnsemble model;
  model.kind = EnsembleKind::kGradientBoosting;
  model.params = params;
  double mean = 0.0;
  for (const auto& r : rows) mean += r.y;
  model.base_prediction = mean / static_cast<double>(n);

  std::vector<double> prediction(n, model.base_prediction), residual(n);
  auto record_mse = [&] {
    if (!stage_mse) return;
    double sse = 0.0;
    for (size_t i = 0; i < n; ++i) sse += (rows[i].y - prediction[i]) * (rows[i].y - prediction[i]);
    stage_mse->push_back(sse / static_cast<double>(n));
  };
  if (stage_mse) stage_mse->clear();
  record_mse();

  std::mt19937_64 rng(params.seed);
  std::vector<size_t> all(n);
  std::iota(all.begin(), all.end(), size_t{0});
  for (size_t t = 0; t < params.n_trees; ++t) {
    for (size_t i = 0; i < n; ++i) residual[i] = rows[i].y - prediction[i];
    detail::TreeBuilder builder(rows, residual, model.params, rng);
    model.trees.push_back(builder.build(all));
    for (size_t i = 0; i < n; ++i) prediction[i] += params.learning_rate * model.trees.back().predict(rows[i].x);
    record_mse();
  }
  return model;
}

}  // namespace fuse
