#include "posture/ensemble.hpp"

#include <algorithm>
#include <numeric>

#include "posture/parallel.hpp"
#include "posture/rng.hpp"

namespace posture {

namespace {

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / n;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct SplitChoice {
  int feature = 0;
  double threshold = 0.0;
  double child_impurity = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<FeatureVector48>& X, const std::vector<std::size_t>& y, std::size_t n_classes,
              const std::vector<int>& subset, const TreeParams& params)
      : X_(X), y_(y), n_classes_(n_classes), subset_(subset), params_(params) {}

  std::vector<TreeNode> build() {
    std::vector<std::size_t> rows(X_.size());
    std::iota(rows.begin(), rows.end(), 0);
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::vector<std::size_t> counts(n_classes_, 0);
    for (std::size_t r : rows) counts[y_[r]]++;
    const double impurity = gini(counts, rows.size());

    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    std::optional<SplitChoice> split;
    if (!pure && depth < params_.max_depth && rows.size() >= 2 * params_.min_leaf) {
      split = best_split(rows);
    }
    if (!split) {
      nodes_[static_cast<std::size_t>(id)].class_counts = std::move(counts);
      return id;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) {
      (X_[r][static_cast<std::size_t>(split->feature - 1)] <= split->threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    node.impurity_decrease = std::max(0.0, impurity - split->child_impurity);
    return id;
  }

  std::optional<SplitChoice> best_split(const std::vector<std::size_t>& rows) const {
    const std::size_t n = rows.size();
    std::optional<SplitChoice> best;
    std::vector<std::pair<double, std::size_t>> sorted(n);
    std::vector<std::size_t> left_counts(n_classes_), right_counts(n_classes_);

    for (int feature : subset_) {
      const auto col = static_cast<std::size_t>(feature - 1);
      for (std::size_t i = 0; i < n; ++i) sorted[i] = {X_[rows[i]][col], y_[rows[i]]};
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;

      std::fill(left_counts.begin(), left_counts.end(), 0);
      std::fill(right_counts.begin(), right_counts.end(), 0);
      for (const auto& [v, c] : sorted) right_counts[c]++;

      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_counts[sorted[i].second]++;
        right_counts[sorted[i].second]--;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
        const double score = (static_cast<double>(nl) * gini(left_counts, nl) +
                              static_cast<double>(nr) * gini(right_counts, nr)) /
                             static_cast<double>(n);
        if (!best || score < best->child_impurity) {
          const double lo = sorted[i].first, hi = sorted[i + 1].first;
          double mid = lo + 0.5 * (hi - lo);
          if (!(mid < hi)) mid = lo;
          best = SplitChoice{feature, mid, score};
        }
      }
    }
    return best;
  }

  const std::vector<FeatureVector48>& X_;
  const std::vector<std::size_t>& y_;
  std::size_t n_classes_;
  const std::vector<int>& subset_;
  TreeParams params_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t n_classes)
    : nodes_(std::move(nodes)), n_classes_(n_classes) {}

const TreeNode& DecisionTree::leaf_for(const FeatureVector48& x) const {
  if (nodes_.empty()) throw Error(Errc::UnfittedModel, "empty decision tree");
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature - 1)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i];
}

std::size_t DecisionTree::predict(const FeatureVector48& x) const {
  const auto& counts = leaf_for(x).class_counts;
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::size_t DecisionTree::branch_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes_[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes_[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes_[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

FeatureVector48 DecisionTree::importance() const {
  FeatureVector48 imp{};
  const std::size_t branches = branch_count();
  if (branches == 0) return imp;
  for (const auto& n : nodes_) {
    if (!n.is_leaf()) imp[static_cast<std::size_t>(n.feature - 1)] += n.impurity_decrease;
  }
  for (auto& v : imp) v /= static_cast<double>(branches);
  return imp;
}

DecisionTree fit_decision_tree(const std::vector<FeatureVector48>& X, const std::vector<std::size_t>& y,
                               std::size_t n_classes, const std::vector<int>& feature_subset,
                               const TreeParams& params) {
  if (X.size() != y.size()) {
    throw Error(Errc::DimensionMismatch, std::to_string(X.size()) + " rows vs " + std::to_string(y.size()) + " labels");
  }
  if (X.empty()) throw Error(Errc::EmptyTrainingSet, "no training rows");
  if (feature_subset.empty()) throw Error(Errc::InvalidArgument, "empty feature subset");
  for (int f : feature_subset) {
    if (f < 1 || f > static_cast<int>(kFeatureCount)) {
      throw Error(Errc::UnknownFeature, "feature number " + std::to_string(f));
    }
  }
  for (std::size_t c : y) {
    if (c >= n_classes) throw Error(Errc::UnknownLabel, "class index " + std::to_string(c));
  }
  if (params.min_leaf < 1) throw Error(Errc::InvalidArgument, "min_leaf must be positive");
  std::vector<int> subset = feature_subset;
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  return DecisionTree(TreeBuilder(X, y, n_classes, subset, params).build(), n_classes);
}

BaggedEnsemble fit_bagged_ensemble(const std::vector<FeatureVector48>& X, const std::vector<PostureLabel>& y,
                                   const LabelSet& label_set, std::uint64_t seed, const EnsembleParams& params) {
  if (X.size() != y.size()) {
    throw Error(Errc::DimensionMismatch, std::to_string(X.size()) + " rows vs " + std::to_string(y.size()) + " labels");
  }
  if (X.empty()) throw Error(Errc::EmptyTrainingSet, "no training rows");
  if (params.n_trees == 0) throw Error(Errc::InvalidArgument, "ensemble needs at least one tree");
  std::vector<std::size_t> classes;
  classes.reserve(y.size());
  for (PostureLabel l : y) classes.push_back(label_index(label_set, l));

  BaggedEnsemble m;
  m.label_set = label_set;
  m.params = params;
  m.seed = seed;
  m.trees.resize(params.n_trees);
  m.feature_subsets.resize(params.n_trees);

  const std::size_t subset_size = std::clamp<std::size_t>(params.subset_size, 1, kFeatureCount);
  parallel_for(params.n_trees, params.threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<FeatureVector48> bx;
    std::vector<std::size_t> by;
    if (params.bootstrap) {
      bx.reserve(X.size());
      by.reserve(X.size());
      for (std::size_t i = 0; i < X.size(); ++i) {
        const auto r = static_cast<std::size_t>(rng.below(X.size()));
        bx.push_back(X[r]);
        by.push_back(classes[r]);
      }
    } else {
      bx = X;
      by = classes;
    }
    std::vector<int> all(kFeatureCount);
    std::iota(all.begin(), all.end(), 1);
    std::vector<int> subset;
    if (subset_size < kFeatureCount) {
      // Partial Fisher-Yates draw without replacement.
      for (std::size_t k = 0; k < subset_size; ++k) {
        const auto j = k + static_cast<std::size_t>(rng.below(kFeatureCount - k));
        std::swap(all[k], all[j]);
      }
      subset.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(subset_size));
      std::sort(subset.begin(), subset.end());
    } else {
      subset = all;
    }
    m.trees[t] = fit_decision_tree(bx, by, label_set.size(), subset, params.tree);
    m.feature_subsets[t] = std::move(subset);
  });

  for (const auto& tree : m.trees) {
    const auto imp = tree.importance();
    for (std::size_t k = 0; k < kFeatureCount; ++k) m.importance[k] += imp[k];
  }
  for (auto& v : m.importance) v /= static_cast<double>(m.trees.size());
  return m;
}

std::vector<std::size_t> vote_counts(const BaggedEnsemble& m, const FeatureVector48& x) {
  if (!m.fitted()) throw Error(Errc::UnfittedModel, "ensemble has no trees");
  std::vector<std::size_t> votes(m.label_set.size(), 0);
  for (const auto& tree : m.trees) votes[tree.predict(x)]++;
  return votes;
}

PostureLabel predict_majority(const BaggedEnsemble& m, const FeatureVector48& x) {
  const auto votes = vote_counts(m, x);
  const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
  return m.label_set[static_cast<std::size_t>(best)];
}

FeatureVector48 feature_importance(const BaggedEnsemble& m) {
  if (!m.fitted()) throw Error(Errc::UnfittedModel, "ensemble has no trees");
  return m.importance;
}

}  // namespace posture
