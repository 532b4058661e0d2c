/*
 * Copyright 2026 The satexpl Authors.
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
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "satexpl/errors.hpp"
#include "satexpl/instance.hpp"
#include "satexpl/parallel.hpp"

namespace satexpl {

/// Binary decision tree over binary features. An internal node tests one
/// feature: value 0 goes left, value 1 goes right. Every root-to-leaf path
/// tests each feature at most once.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    int left = -1;
    int right = -1;
    int label = -1;

    bool is_leaf() const { return feature < 0; }
  };

  static DecisionTree single_leaf(int label) {
    DecisionTree t;
    t.add_leaf(label);
    return t;
  }

  int add_leaf(int label) {
    nodes_.push_back(Node{-1, -1, -1, label});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_split(int feature, int left, int right) {
    nodes_.push_back(Node{feature, left, right, -1});
    return static_cast<int>(nodes_.size()) - 1;
  }

  /// The root is the last node added (trees are built bottom-up).
  int root() const { return static_cast<int>(nodes_.size()) - 1; }
  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

  int predict(std::span<const std::uint8_t> values) const {
    int at = root();
    while (!nodes_[static_cast<std::size_t>(at)].is_leaf()) {
      const Node& n = nodes_[static_cast<std::size_t>(at)];
      if (n.feature >= static_cast<int>(values.size())) {
        throw ArityMismatch("tree tests feature " + std::to_string(n.feature + 1) +
                            " beyond instance arity " + std::to_string(values.size()));
      }
      at = values[static_cast<std::size_t>(n.feature)] ? n.right : n.left;
    }
    return nodes_[static_cast<std::size_t>(at)].label;
  }

  int depth() const { return depth_below(root()); }

  /// Checks the structural invariants: leaf labels in {0,1}, children in
  /// range, features in [0, num_features), no feature retested along a path.
  void validate(int num_features) const {
    if (nodes_.empty()) throw ConfigError("empty decision tree");
    std::vector<bool> used(static_cast<std::size_t>(num_features), false);
    validate_node(root(), num_features, used);
  }

 private:
  int depth_below(int at) const {
    const Node& n = nodes_[static_cast<std::size_t>(at)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_below(n.left), depth_below(n.right));
  }

  void validate_node(int at, int num_features, std::vector<bool>& used) const {
    if (at < 0 || at >= static_cast<int>(nodes_.size())) {
      throw ConfigError("tree node index out of range");
    }
    const Node& n = nodes_[static_cast<std::size_t>(at)];
    if (n.is_leaf()) {
      if (n.label != 0 && n.label != 1) throw ConfigError("leaf label must be 0 or 1");
      return;
    }
    if (n.feature < 0 || n.feature >= num_features) {
      throw ConfigError("tree tests feature " + std::to_string(n.feature) + " out of range");
    }
    if (used[static_cast<std::size_t>(n.feature)]) {
      throw ConfigError("feature " + std::to_string(n.feature) + " tested twice on one path");
    }
    used[static_cast<std::size_t>(n.feature)] = true;
    validate_node(n.left, num_features, used);
    validate_node(n.right, num_features, used);
    used[static_cast<std::size_t>(n.feature)] = false;
  }

  std::vector<Node> nodes_;
};

/// Majority-vote ensemble: predicts 1 iff at least `threshold` trees vote 1.
struct RandomForest {
  std::vector<DecisionTree> trees;
  int threshold = 1;
  int num_features = 0;

  int votes(std::span<const std::uint8_t> values) const {
    int count = 0;
    for (const DecisionTree& t : trees) count += t.predict(values);
    return count;
  }

  int predict(const Instance& x) const {
    if (x.arity() != num_features) {
      throw ArityMismatch("instance arity " + std::to_string(x.arity()) +
                          " does not match forest features " + std::to_string(num_features));
    }
    return votes(x.values) >= threshold ? 1 : 0;
  }

  void validate() const {
    if (trees.empty()) throw ConfigError("forest has no trees");
    if (threshold < 1 || threshold > static_cast<int>(trees.size())) {
      throw ConfigError("vote threshold out of range");
    }
    for (const DecisionTree& t : trees) t.validate(num_features);
  }
};

namespace detail {

inline double gini_weighted(int zeros_left, int ones_left, int zeros_right, int ones_right) {
  auto impurity = [](int zeros, int ones) {
    const double total = zeros + ones;
    if (total == 0) return 0.0;
    const double p0 = zeros / total;
    const double p1 = ones / total;
    return 1.0 - p0 * p0 - p1 * p1;
  };
  const double total = zeros_left + ones_left + zeros_right + ones_right;
  return ((zeros_left + ones_left) * impurity(zeros_left, ones_left) +
          (zeros_right + ones_right) * impurity(zeros_right, ones_right)) /
         total;
}

inline int majority_label(std::span<const Instance> rows, const std::vector<int>& indices) {
  int ones = 0;
  for (int i : indices) ones += *rows[static_cast<std::size_t>(i)].label;
  const int zeros = static_cast<int>(indices.size()) - ones;
  return ones > zeros ? 1 : 0;  // ties break to the negative class
}

inline int grow_node(DecisionTree& tree, std::span<const Instance> rows,
                     const std::vector<int>& indices, std::vector<bool>& used, int depth_left,
                     int min_leaf, int mtry, std::mt19937_64& rng) {
  int ones = 0;
  for (int i : indices) ones += *rows[static_cast<std::size_t>(i)].label;
  const int zeros = static_cast<int>(indices.size()) - ones;
  if (depth_left == 0 || ones == 0 || zeros == 0 ||
      static_cast<int>(indices.size()) < min_leaf) {
    return tree.add_leaf(ones > zeros ? 1 : 0);
  }

  // Candidates: features not yet tested on this path and not constant in the
  // node rows.
  std::vector<int> candidates;
  const int n = static_cast<int>(used.size());
  for (int f = 0; f < n; ++f) {
    if (used[static_cast<std::size_t>(f)]) continue;
    const std::uint8_t head =
        rows[static_cast<std::size_t>(indices.front())].values[static_cast<std::size_t>(f)];
    for (int i : indices) {
      if (rows[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(f)] != head) {
        candidates.push_back(f);
        break;
      }
    }
  }
  if (candidates.empty()) return tree.add_leaf(ones > zeros ? 1 : 0);

  // Uniform subset of size mtry (partial Fisher-Yates keeps determinism).
  const int take = std::min<int>(mtry, static_cast<int>(candidates.size()));
  for (int i = 0; i < take; ++i) {
    std::uniform_int_distribution<int> rest(i, static_cast<int>(candidates.size()) - 1);
    std::swap(candidates[static_cast<std::size_t>(i)],
              candidates[static_cast<std::size_t>(rest(rng))]);
  }

  int best_feature = -1;
  double best_score = 0.0;
  for (int c = 0; c < take; ++c) {
    const int f = candidates[static_cast<std::size_t>(c)];
    int zeros_left = 0, ones_left = 0, zeros_right = 0, ones_right = 0;
    for (int i : indices) {
      const Instance& row = rows[static_cast<std::size_t>(i)];
      if (row.values[static_cast<std::size_t>(f)]) {
        ones_right += *row.label;
        zeros_right += 1 - *row.label;
      } else {
        ones_left += *row.label;
        zeros_left += 1 - *row.label;
      }
    }
    const double score = gini_weighted(zeros_left, ones_left, zeros_right, ones_right);
    if (best_feature < 0 || score < best_score) {
      best_feature = f;
      best_score = score;
    }
  }

  std::vector<int> left, right;
  for (int i : indices) {
    if (rows[static_cast<std::size_t>(i)].values[static_cast<std::size_t>(best_feature)]) {
      right.push_back(i);
    } else {
      left.push_back(i);
    }
  }
  used[static_cast<std::size_t>(best_feature)] = true;
  const int left_child =
      grow_node(tree, rows, left, used, depth_left - 1, min_leaf, mtry, rng);
  const int right_child =
      grow_node(tree, rows, right, used, depth_left - 1, min_leaf, mtry, rng);
  used[static_cast<std::size_t>(best_feature)] = false;
  return tree.add_split(best_feature, left_child, right_child);
}

inline std::mt19937_64 tree_rng(std::uint64_t seed, int tree_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tree_index)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Greedy top-down CART induction: Gini impurity split selection over a
/// random feature subset of size ceil(sqrt(n)), leaf label by majority with
/// ties to 0, stopping at max_depth, pure nodes, or fewer than min_leaf rows.
inline DecisionTree train_tree(std::span<const Instance> rows, int max_depth, int min_leaf,
                               std::mt19937_64& rng) {
  if (rows.empty()) throw EmptyData("train_tree: no rows");
  for (const Instance& r : rows) {
    if (!r.label) throw EmptyData("train_tree: unlabeled row");
  }
  const int n = rows.front().arity();
  const int mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<int> indices(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) indices[i] = static_cast<int>(i);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  DecisionTree tree;
  detail::grow_node(tree, rows, indices, used, max_depth, min_leaf < 1 ? 1 : min_leaf, mtry,
                    rng);
  return tree;
}

/// Trains `nb_trees` trees, each on a bootstrap resample (|rows| draws with
/// replacement) with an independent RNG stream derived from (seed, index),
/// which makes training embarrassingly parallel across trees with results
/// independent of scheduling. The vote threshold is the strict majority
/// floor(m/2)+1.
inline RandomForest train_forest(std::span<const Instance> rows, int nb_trees, int max_depth,
                                 std::uint64_t seed, int min_leaf = 1, int jobs = 1) {
  if (rows.empty()) throw EmptyData("train_forest: no rows");
  if (nb_trees < 1) throw ConfigError("nb_trees must be >= 1");
  RandomForest forest;
  forest.num_features = rows.front().arity();
  forest.threshold = nb_trees / 2 + 1;
  forest.trees.resize(static_cast<std::size_t>(nb_trees));
  parallel_for(jobs, nb_trees, [&](int t) {
    auto rng = detail::tree_rng(seed, t);
    std::vector<Instance> sample(rows.size());
    std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
    for (std::size_t i = 0; i < rows.size(); ++i) sample[i] = rows[pick(rng)];
    forest.trees[static_cast<std::size_t>(t)] = train_tree(sample, max_depth, min_leaf, rng);
  });
  return forest;
}

/// Fraction of neighborhood members where the surrogate agrees with the
/// oracle label.
inline double fidelity(const RandomForest& forest, const NeighborhoodSet& ns) {
  if (ns.members.empty()) throw EmptyData("fidelity: empty neighborhood");
  int agree = 0;
  for (const Instance& m : ns.members) {
    if (!m.label) throw EmptyData("fidelity: unlabeled neighborhood member");
    agree += forest.predict(m) == *m.label;
  }
  return static_cast<double>(agree) / static_cast<double>(ns.members.size());
}

}  // namespace satexpl
