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

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "satexpl/errors.hpp"
#include "satexpl/forest.hpp"

// JSON forest format:
//   {"num_features": 16, "threshold": 2,
//    "feature_names": ["X1", ...],            (optional)
//    "trees": [<node>, ...]}
// where <node> is {"leaf": 0|1} or
// {"feature": <0-based index>, "left": <node>, "right": <node>}.

namespace satexpl {

namespace detail {

inline nlohmann::json tree_node_to_json(const DecisionTree& tree, int at) {
  const DecisionTree::Node& n = tree.nodes()[static_cast<std::size_t>(at)];
  if (n.is_leaf()) return nlohmann::json{{"leaf", n.label}};
  return nlohmann::json{{"feature", n.feature},
                        {"left", tree_node_to_json(tree, n.left)},
                        {"right", tree_node_to_json(tree, n.right)}};
}

inline int tree_node_from_json(const nlohmann::json& j, DecisionTree& tree) {
  if (!j.is_object()) throw ConfigError("forest json: tree node must be an object");
  if (j.contains("leaf")) {
    if (!j["leaf"].is_number_integer()) throw ConfigError("forest json: leaf must be 0 or 1");
    return tree.add_leaf(j["leaf"].get<int>());
  }
  if (!j.contains("feature") || !j.contains("left") || !j.contains("right")) {
    throw ConfigError("forest json: split node needs feature, left, right");
  }
  const int left = tree_node_from_json(j["left"], tree);
  const int right = tree_node_from_json(j["right"], tree);
  return tree.add_split(j["feature"].get<int>(), left, right);
}

}  // namespace detail

inline nlohmann::json forest_to_json(const RandomForest& forest,
                                     const std::vector<std::string>& feature_names = {}) {
  nlohmann::json j;
  j["num_features"] = forest.num_features;
  j["threshold"] = forest.threshold;
  if (!feature_names.empty()) j["feature_names"] = feature_names;
  j["trees"] = nlohmann::json::array();
  for (const DecisionTree& t : forest.trees) {
    j["trees"].push_back(detail::tree_node_to_json(t, t.root()));
  }
  return j;
}

/// Parses and validates a forest. Throws ConfigError on structural problems.
inline RandomForest forest_from_json(const nlohmann::json& j,
                                     std::vector<std::string>* feature_names = nullptr) {
  if (!j.is_object() || !j.contains("num_features") || !j.contains("trees")) {
    throw ConfigError("forest json: expected num_features and trees");
  }
  RandomForest forest;
  forest.num_features = j["num_features"].get<int>();
  if (forest.num_features < 1) throw ConfigError("forest json: num_features must be >= 1");
  if (!j["trees"].is_array() || j["trees"].empty()) {
    throw ConfigError("forest json: trees must be a non-empty array");
  }
  for (const auto& tj : j["trees"]) {
    DecisionTree tree;
    detail::tree_node_from_json(tj, tree);
    forest.trees.push_back(std::move(tree));
  }
  const int default_threshold = static_cast<int>(forest.trees.size()) / 2 + 1;
  forest.threshold = j.value("threshold", default_threshold);
  if (feature_names) {
    feature_names->clear();
    if (j.contains("feature_names")) {
      *feature_names = j["feature_names"].get<std::vector<std::string>>();
      if (static_cast<int>(feature_names->size()) != forest.num_features) {
        throw ConfigError("forest json: feature_names length differs from num_features");
      }
    }
  }
  forest.validate();
  return forest;
}

inline RandomForest load_forest_file(const std::string& path,
                                     std::vector<std::string>* feature_names = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("forest file \"" + path + "\": " + e.what());
  }
  return forest_from_json(j, feature_names);
}

inline void save_forest_file(const std::string& path, const RandomForest& forest,
                             const std::vector<std::string>& feature_names = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out << forest_to_json(forest, feature_names).dump(2) << "\n";
}

}  // namespace satexpl
