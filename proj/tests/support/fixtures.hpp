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

// The congressional-vote walkthrough: a fixed 3-tree forest over 16 binary
// features with strict-majority threshold 2, and the instance it explains.
// Tree formulas (as conjunctions of negated 0-paths):
//   y1 <=> (X5) and (!X5 or !X15 or X4)
//   y2 <=> (X4) and (!X4 or !X11 or X16)
//   y3 <=> (X9 or X14) and (X9 or !X14 or X5) and (!X9 or X12)
//          and (!X9 or !X12 or !X11)

#include <cstdint>
#include <string>
#include <vector>

#include "satexpl/forest.hpp"
#include "satexpl/instance.hpp"

namespace fixtures {

inline std::vector<std::string> vote_names() {
  std::vector<std::string> names;
  for (int i = 1; i <= 16; ++i) names.push_back("X" + std::to_string(i));
  return names;
}

inline satexpl::DecisionTree vote_tree1() {
  satexpl::DecisionTree t;
  const int leaf0_root = t.add_leaf(0);
  const int leaf1_x15 = t.add_leaf(1);
  const int leaf0_x4 = t.add_leaf(0);
  const int leaf1_x4 = t.add_leaf(1);
  const int n_x4 = t.add_split(3, leaf0_x4, leaf1_x4);
  const int n_x15 = t.add_split(14, leaf1_x15, n_x4);
  t.add_split(4, leaf0_root, n_x15);
  return t;
}

inline satexpl::DecisionTree vote_tree2() {
  satexpl::DecisionTree t;
  const int leaf0_root = t.add_leaf(0);
  const int leaf1_x11 = t.add_leaf(1);
  const int leaf0_x16 = t.add_leaf(0);
  const int leaf1_x16 = t.add_leaf(1);
  const int n_x16 = t.add_split(15, leaf0_x16, leaf1_x16);
  const int n_x11 = t.add_split(10, leaf1_x11, n_x16);
  t.add_split(3, leaf0_root, n_x11);
  return t;
}

inline satexpl::DecisionTree vote_tree3() {
  satexpl::DecisionTree t;
  const int leaf0_x14 = t.add_leaf(0);
  const int leaf0_x5 = t.add_leaf(0);
  const int leaf1_x5 = t.add_leaf(1);
  const int n_x5 = t.add_split(4, leaf0_x5, leaf1_x5);
  const int n_x14 = t.add_split(13, leaf0_x14, n_x5);
  const int leaf0_x12 = t.add_leaf(0);
  const int leaf1_x11 = t.add_leaf(1);
  const int leaf0_x11 = t.add_leaf(0);
  const int n_x11 = t.add_split(10, leaf1_x11, leaf0_x11);
  const int n_x12 = t.add_split(11, leaf0_x12, n_x11);
  t.add_split(8, n_x14, n_x12);
  return t;
}

inline satexpl::RandomForest vote_forest() {
  satexpl::RandomForest forest;
  forest.trees = {vote_tree1(), vote_tree2(), vote_tree3()};
  forest.threshold = 2;
  forest.num_features = 16;
  return forest;
}

inline satexpl::Instance vote_instance() {
  satexpl::Instance x;
  x.values = {1, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 1, 0, 1};
  return x;
}

// 0-based feature indices of the known explanations.
inline std::vector<std::vector<int>> vote_sr_features() {
  return {{3, 4}, {4, 11}, {3, 8, 11}};
}

inline std::vector<std::vector<int>> vote_cf_features() {
  return {{3, 11}, {4, 11}, {4, 8}, {3, 4}};
}

}  // namespace fixtures
