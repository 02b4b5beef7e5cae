#pragma once

#include <cstdint>
#include <vector>

#include "posture/features.hpp"
#include "posture/types.hpp"

namespace posture {

struct TreeParams {
  int max_depth = 12;
  std::size_t min_leaf = 1;
};

/// Flat node storage. Internal nodes have feature >= 1 (feature number) and two
/// children; leaves have feature == 0 and per-class training counts.
struct TreeNode {
  int feature = 0;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::size_t> class_counts;
  double impurity_decrease = 0.0;  // parent Gini minus weighted child Gini

  bool is_leaf() const { return feature == 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(std::vector<TreeNode> nodes, std::size_t n_classes);

  /// Class index of the leaf reached by `x` (rows go left when value <= threshold).
  std::size_t predict(const FeatureVector48& x) const;
  const TreeNode& leaf_for(const FeatureVector48& x) const;

  std::size_t branch_count() const;
  std::size_t depth() const;
  /// Per-feature summed impurity decrease divided by the branch count.
  FeatureVector48 importance() const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t n_classes() const { return n_classes_; }
  bool empty() const { return nodes_.empty(); }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t n_classes_ = 0;
};

/// Greedy Gini CART restricted to `feature_subset` (feature numbers 1..48).
/// `y` holds class indices in [0, n_classes). Ties go to the lower feature
/// number, then the lower threshold; leaf ties go to the lower class index.
DecisionTree fit_decision_tree(const std::vector<FeatureVector48>& X, const std::vector<std::size_t>& y,
                               std::size_t n_classes, const std::vector<int>& feature_subset,
                               const TreeParams& params = {});

struct EnsembleParams {
  std::size_t n_trees = 100;
  std::size_t subset_size = 7;  // ceil(sqrt(48)), drawn once per tree
  bool bootstrap = true;
  TreeParams tree;
  unsigned threads = 1;
};

struct BaggedEnsemble {
  std::vector<DecisionTree> trees;
  std::vector<std::vector<int>> feature_subsets;
  LabelSet label_set;
  FeatureVector48 importance{};
  EnsembleParams params;
  std::uint64_t seed = 0;

  bool fitted() const { return !trees.empty(); }
};

BaggedEnsemble fit_bagged_ensemble(const std::vector<FeatureVector48>& X, const std::vector<PostureLabel>& y,
                                   const LabelSet& label_set, std::uint64_t seed, const EnsembleParams& params = {});

/// Votes per label (label_set order); sums to the tree count.
std::vector<std::size_t> vote_counts(const BaggedEnsemble& m, const FeatureVector48& x);

/// Modal tree vote; ties go to the label earlier in label_set. Throws UnfittedModel.
PostureLabel predict_majority(const BaggedEnsemble& m, const FeatureVector48& x);

/// Mean over trees of each tree's per-branch impurity decrease. Throws UnfittedModel.
FeatureVector48 feature_importance(const BaggedEnsemble& m);

}  // namespace posture
