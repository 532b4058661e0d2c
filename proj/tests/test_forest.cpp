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
#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "satexpl/forest.hpp"
#include "satexpl/forest_json.hpp"
#include "satexpl/oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_gen.hpp"

using namespace satexpl;

namespace {

Instance labeled(std::vector<std::uint8_t> values, int label) {
  Instance x;
  x.values = std::move(values);
  x.label = label;
  return x;
}

}  // namespace

TEST_CASE("pure data trains to a single leaf", "[forest]") {
  std::vector<Instance> rows{labeled({0, 1}, 1), labeled({1, 1}, 1), labeled({0, 0}, 1)};
  std::mt19937_64 rng(1);
  const DecisionTree tree = train_tree(rows, 5, 1, rng);
  CHECK(tree.depth() == 0);
  CHECK(tree.predict(rows[0].values) == 1);
}

TEST_CASE("XOR data fits exactly at depth two", "[forest]") {
  std::vector<Instance> rows{labeled({0, 0}, 0), labeled({0, 1}, 1), labeled({1, 0}, 1),
                             labeled({1, 1}, 0)};
  std::mt19937_64 rng(7);
  const DecisionTree tree = train_tree(rows, 2, 1, rng);
  for (const Instance& r : rows) {
    REQUIRE(tree.predict(r.values) == *r.label);
  }
  CHECK(tree.depth() == 2);
}

TEST_CASE("depth zero yields a majority stump with ties to zero", "[forest]") {
  const std::vector<std::uint8_t> probe{0};
  std::vector<Instance> majority1{labeled({0}, 1), labeled({1}, 1), labeled({0}, 0)};
  std::mt19937_64 rng(3);
  CHECK(train_tree(majority1, 0, 1, rng).predict(probe) == 1);

  std::vector<Instance> tie{labeled({0}, 1), labeled({1}, 0)};
  CHECK(train_tree(tie, 0, 1, rng).predict(probe) == 0);
}

TEST_CASE("training rejects empty or unlabeled data", "[forest]") {
  std::mt19937_64 rng(1);
  std::vector<Instance> none;
  CHECK_THROWS_AS(train_tree(none, 3, 1, rng), EmptyData);
  CHECK_THROWS_AS(train_forest(none, 3, 3, 1), EmptyData);
  Instance unlabeled;
  unlabeled.values = {0, 1};
  std::vector<Instance> bad{unlabeled};
  CHECK_THROWS_AS(train_tree(bad, 3, 1, rng), EmptyData);
}

TEST_CASE("single-tree forests predict like their tree", "[forest]") {
  testgen::Rng rng(21);
  std::vector<Instance> rows;
  for (int i = 0; i < 30; ++i) {
    Instance r;
    for (int f = 0; f < 5; ++f) r.values.push_back(static_cast<std::uint8_t>(testgen::pick(rng, 0, 1)));
    r.label = r.values[0] & r.values[3];
    rows.push_back(std::move(r));
  }
  const RandomForest forest = train_forest(rows, 1, 6, 42);
  REQUIRE(forest.trees.size() == 1);
  CHECK(forest.threshold == 1);
  for (const Instance& r : rows) {
    REQUIRE(forest.predict(r) == forest.trees[0].predict(r.values));
  }
}

TEST_CASE("three trees vote with strict-majority threshold two", "[forest]") {
  std::vector<Instance> rows{labeled({0, 0}, 0), labeled({1, 1}, 1)};
  const RandomForest forest = train_forest(rows, 3, 2, 5);
  CHECK(forest.threshold == 2);
  const RandomForest ten = train_forest(rows, 10, 2, 5);
  CHECK(ten.threshold == 6);
}

TEST_CASE("forest prediction is monotone in the votes", "[forest]") {
  // Forests of constant trees: k trees voting 1 out of m. Raising k can never
  // flip a positive prediction back to negative.
  for (int m = 1; m <= 5; ++m) {
    for (int t = 1; t <= m; ++t) {
      int previous = 0;
      for (int k = 0; k <= m; ++k) {
        RandomForest forest;
        forest.num_features = 1;
        forest.threshold = t;
        for (int i = 0; i < m; ++i) {
          forest.trees.push_back(DecisionTree::single_leaf(i < k ? 1 : 0));
        }
        Instance x;
        x.values = {0};
        const int prediction = forest.predict(x);
        REQUIRE(prediction >= previous);
        REQUIRE(prediction == (k >= t ? 1 : 0));
        previous = prediction;
      }
    }
  }
}

TEST_CASE("training is deterministic for a fixed seed", "[forest]") {
  testgen::Rng rng(67);
  std::vector<Instance> rows;
  for (int i = 0; i < 60; ++i) {
    Instance r;
    for (int f = 0; f < 8; ++f) r.values.push_back(static_cast<std::uint8_t>(testgen::pick(rng, 0, 1)));
    r.label = (r.values[1] | r.values[6]) & r.values[2];
    rows.push_back(std::move(r));
  }
  const RandomForest a = train_forest(rows, 7, 10, 2026);
  const RandomForest b = train_forest(rows, 7, 10, 2026);
  CHECK(forest_to_json(a) == forest_to_json(b));
  const RandomForest c = train_forest(rows, 7, 10, 2027);
  CHECK(forest_to_json(a) != forest_to_json(c));

  // parallel training gives the same forest as sequential
  const RandomForest d = train_forest(rows, 7, 10, 2026, 1, 4);
  CHECK(forest_to_json(a) == forest_to_json(d));
}

TEST_CASE("predict rejects arity mismatches", "[forest]") {
  const RandomForest forest = fixtures::vote_forest();
  Instance wrong;
  wrong.values = {1, 0};
  CHECK_THROWS_AS(forest.predict(wrong), ArityMismatch);
}

TEST_CASE("vote fixture predicts the walkthrough outcomes", "[forest]") {
  const RandomForest forest = fixtures::vote_forest();
  forest.validate();
  const Instance x = fixtures::vote_instance();
  CHECK(forest.predict(x) == 0);

  // flipping X4 and X12 to 1 turns the second and third trees positive
  Instance flipped = x;
  flipped.values[3] = 1;
  flipped.values[11] = 1;
  CHECK(forest.predict(flipped) == 1);

  // an input on which all trees agree positively
  Instance all_one;
  all_one.values.assign(16, 1);
  CHECK(forest.trees[0].predict(all_one.values) == 1);
  CHECK(forest.trees[1].predict(all_one.values) == 1);
  CHECK(forest.predict(all_one) == 1);
}

TEST_CASE("fidelity equals an explicit recount", "[forest]") {
  testgen::Rng rng(4);
  std::vector<Instance> rows;
  for (int i = 0; i < 40; ++i) {
    Instance r;
    for (int f = 0; f < 6; ++f) r.values.push_back(static_cast<std::uint8_t>(testgen::pick(rng, 0, 1)));
    r.label = r.values[0] ^ r.values[5];
    rows.push_back(std::move(r));
  }
  const RandomForest forest = train_forest(rows, 5, 4, 11);
  NeighborhoodSet ns;
  ns.center = rows.front();
  ns.members = rows;
  const double reported = fidelity(forest, ns);
  int agree = 0;
  for (const Instance& r : rows) agree += forest.predict(r) == *r.label;
  CHECK(reported == Catch::Approx(static_cast<double>(agree) / rows.size()));

  // a tree fitted to purity on a tiny set is fully faithful
  std::vector<Instance> tiny{labeled({0, 0}, 0), labeled({1, 1}, 1)};
  std::mt19937_64 tree_rng(9);
  RandomForest pure;
  pure.num_features = 2;
  pure.threshold = 1;
  pure.trees.push_back(train_tree(tiny, 3, 1, tree_rng));
  NeighborhoodSet tiny_ns;
  tiny_ns.center = tiny.front();
  tiny_ns.members = tiny;
  REQUIRE(fidelity(pure, tiny_ns) == 1.0);
}

TEST_CASE("forest json round trip and the committed fixture", "[forest][json]") {
  const RandomForest forest = fixtures::vote_forest();
  const nlohmann::json j = forest_to_json(forest, fixtures::vote_names());
  const RandomForest back = forest_from_json(j);
  CHECK(forest_to_json(back, fixtures::vote_names()) == j);

  std::vector<std::string> names;
  const RandomForest from_file =
      load_forest_file(std::string(TEST_FIXTURE_DIR) + "/vote_forest.json", &names);
  CHECK(names == fixtures::vote_names());
  CHECK(forest_to_json(from_file) == forest_to_json(forest));
}

TEST_CASE("forest json validation rejects malformed trees", "[forest][json]") {
  // feature tested twice on one path
  const auto twice = nlohmann::json::parse(R"({
    "num_features": 2, "threshold": 1,
    "trees": [{"feature": 0, "left": {"leaf": 0},
               "right": {"feature": 0, "left": {"leaf": 0}, "right": {"leaf": 1}}}]})");
  CHECK_THROWS_AS(forest_from_json(twice), ConfigError);

  const auto bad_label = nlohmann::json::parse(
      R"({"num_features": 1, "threshold": 1, "trees": [{"leaf": 2}]})");
  CHECK_THROWS_AS(forest_from_json(bad_label), ConfigError);

  const auto bad_threshold = nlohmann::json::parse(
      R"({"num_features": 1, "threshold": 5, "trees": [{"leaf": 1}]})");
  CHECK_THROWS_AS(forest_from_json(bad_threshold), ConfigError);

  const auto no_trees =
      nlohmann::json::parse(R"({"num_features": 1, "threshold": 1, "trees": []})");
  CHECK_THROWS_AS(forest_from_json(no_trees), ConfigError);
}
