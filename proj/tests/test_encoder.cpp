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

#include <set>

#include "satexpl/encoder.hpp"
#include "satexpl/enumerate.hpp"
#include "support/fixtures.hpp"
#include "support/random_gen.hpp"

using namespace satexpl;

namespace {

Assignment feature_assignment(int num_features, std::uint32_t mask) {
  Assignment a = make_assignment(num_features);
  for (int i = 0; i < num_features; ++i) {
    a[static_cast<std::size_t>(i) + 1] = static_cast<std::int8_t>((mask >> i) & 1u);
  }
  return a;
}

Instance mask_instance(int num_features, std::uint32_t mask) {
  Instance x;
  for (int i = 0; i < num_features; ++i) {
    x.values.push_back(static_cast<std::uint8_t>((mask >> i) & 1u));
  }
  return x;
}

std::vector<Literal> feature_literals(const CnfModel& model, const Instance& x) {
  std::vector<Literal> lits;
  for (int i = 0; i < x.arity(); ++i) {
    const Var v = model.pool.feature_var(i);
    lits.push_back(x.values[static_cast<std::size_t>(i)] ? pos(v) : neg(v));
  }
  return lits;
}

}  // namespace

TEST_CASE("tree formulas match the walkthrough clause lists", "[encoder]") {
  const VarPool pool(fixtures::vote_names());
  const Var x4{4}, x5{5}, x9{9}, x11{11}, x12{12}, x14{14}, x15{15};

  const Formula f1 = tree_to_formula(fixtures::vote_tree1(), pool);
  REQUIRE(f1.kind() == Formula::Kind::And);
  REQUIRE(f1.children().size() == 2);
  CHECK(f1.children()[0].kind() == Formula::Kind::Leaf);
  CHECK(f1.children()[0].literal() == pos(x5));
  const Formula& c2 = f1.children()[1];
  REQUIRE(c2.kind() == Formula::Kind::Or);
  REQUIRE(c2.children().size() == 3);
  CHECK(c2.children()[0].literal() == neg(x5));
  CHECK(c2.children()[1].literal() == neg(x15));
  CHECK(c2.children()[2].literal() == pos(x4));

  const Formula f3 = tree_to_formula(fixtures::vote_tree3(), pool);
  REQUIRE(f3.kind() == Formula::Kind::And);
  REQUIRE(f3.children().size() == 4);
  auto or_literals = [](const Formula& f) {
    std::vector<Literal> lits;
    if (f.kind() == Formula::Kind::Leaf) {
      lits.push_back(f.literal());
    } else {
      for (const Formula& c : f.children()) lits.push_back(c.literal());
    }
    return lits;
  };
  CHECK(or_literals(f3.children()[0]) == std::vector<Literal>{pos(x9), pos(x14)});
  CHECK(or_literals(f3.children()[1]) == std::vector<Literal>{pos(x9), neg(x14), pos(x5)});
  CHECK(or_literals(f3.children()[2]) == std::vector<Literal>{neg(x9), pos(x12)});
  CHECK(or_literals(f3.children()[3]) == std::vector<Literal>{neg(x9), neg(x12), neg(x11)});
}

TEST_CASE("tree formulas evaluate exactly like the trees", "[encoder]") {
  const VarPool pool(fixtures::vote_names());
  const RandomForest forest = fixtures::vote_forest();
  for (const DecisionTree& tree : forest.trees) {
    const Formula f = tree_to_formula(tree, pool);
    for (std::uint32_t mask = 0; mask < (1u << 16); mask += 37) {  // stride keeps it quick
      const Instance x = mask_instance(16, mask);
      REQUIRE(evaluate(f, feature_assignment(16, mask)) == (tree.predict(x.values) == 1));
    }
  }
}

TEST_CASE("leaf-only trees become constants", "[encoder]") {
  const VarPool pool({"a", "b"});
  CHECK(tree_to_formula(DecisionTree::single_leaf(1), pool).kind() == Formula::Kind::True);
  CHECK(tree_to_formula(DecisionTree::single_leaf(0), pool).kind() == Formula::Kind::False);
}

TEST_CASE("encode_instance emits one unit per feature in order", "[encoder]") {
  RandomForest forest;
  forest.num_features = 2;
  forest.threshold = 1;
  forest.trees.push_back(DecisionTree::single_leaf(1));
  const CnfModel model = encode_forest(forest, Polarity::kExplainNegative, {"a", "b"});

  Instance x = mask_instance(2, 0b01);  // a=1, b=0
  const auto soft = encode_instance(x, model);
  REQUIRE(soft.size() == 2);
  CHECK(soft[0].clause.literals() == std::vector<Literal>{pos(Var{1})});
  CHECK(soft[0].feature == 0);
  CHECK(soft[0].value == 1);
  CHECK(soft[1].clause.literals() == std::vector<Literal>{neg(Var{2})});
  CHECK(soft[1].value == 0);

  Instance wrong;
  wrong.values = {1};
  CHECK_THROWS_AS(encode_instance(wrong, model), ArityMismatch);
  Instance empty;
  CHECK_THROWS_AS(encode_instance(empty, model), ArityMismatch);
}

TEST_CASE("the walkthrough instance encodes to sixteen units", "[encoder]") {
  const CnfModel model =
      encode_forest(fixtures::vote_forest(), Polarity::kExplainNegative, fixtures::vote_names());
  const auto soft = encode_instance(fixtures::vote_instance(), model);
  REQUIRE(soft.size() == 16);
  CHECK(soft[3].clause.literals() == std::vector<Literal>{neg(Var{4})});   // X4 = 0
  CHECK(soft[13].clause.literals() == std::vector<Literal>{pos(Var{14})});  // X14 = 1
}

TEST_CASE("variable layout: features, tree outputs, forest output, auxiliaries", "[encoder]") {
  const CnfModel model =
      encode_forest(fixtures::vote_forest(), Polarity::kExplainNegative, fixtures::vote_names());
  CHECK(model.num_features() == 16);
  REQUIRE(model.tree_outputs.size() == 3);
  CHECK(model.tree_outputs[0].index == 17);
  CHECK(model.tree_outputs[1].index == 18);
  CHECK(model.tree_outputs[2].index == 19);
  CHECK(model.forest_output.index == 20);
  CHECK(model.cnf.num_vars() == model.pool.num_vars());

  const auto map = var_map_to_json(model);
  CHECK(map["features"]["X5"] == 5);
  CHECK(map["forest_output"] == 20);
  CHECK(map["polarity"] == "neg");
}

TEST_CASE("walkthrough instance is unsat against the negative encoding", "[encoder]") {
  const CnfModel model =
      encode_forest(fixtures::vote_forest(), Polarity::kExplainNegative, fixtures::vote_names());
  const auto p = build_pmaxsat(model, encode_instance(fixtures::vote_instance(), model));

  Solver solver;
  solver.add_cnf(p.hard);
  REQUIRE(solver.solve().status == SolveStatus::kSat);  // hard part alone is fine
  std::vector<Literal> units;
  for (const auto& s : p.soft) units.push_back(s.clause.literals().front());
  REQUIRE(solver.solve(units).status == SolveStatus::kUnsat);
}

TEST_CASE("encoding equivalence on random small forests, both polarities", "[encoder][equiv]") {
  testgen::Rng rng(0xA11CE);
  for (int round = 0; round < 40; ++round) {
    const int n = testgen::pick(rng, 2, 8);
    const RandomForest forest = testgen::random_forest_gen(rng, n, 3, 3);
    for (const Polarity polarity : {Polarity::kExplainNegative, Polarity::kExplainPositive}) {
      const CnfModel model = encode_forest(forest, polarity);
      Solver solver;
      solver.add_cnf(model.cnf);
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const Instance x = mask_instance(n, mask);
        const bool sat =
            solver.solve(feature_literals(model, x)).status == SolveStatus::kSat;
        const bool positive = forest.predict(x) == 1;
        REQUIRE(sat == (polarity == Polarity::kExplainNegative ? positive : !positive));
      }
    }
  }
}

TEST_CASE("single-tree forests encode to the asserted tree function", "[encoder]") {
  testgen::Rng rng(0xDEC0DE);
  for (int round = 0; round < 10; ++round) {
    const int n = testgen::pick(rng, 2, 6);
    RandomForest forest = testgen::random_forest_gen(rng, n, 1, 3);
    forest.threshold = 1;
    const VarPool name_pool = VarPool(std::vector<std::string>());
    const CnfModel model = encode_forest(forest, Polarity::kExplainNegative);
    const Formula f = tree_to_formula(forest.trees[0], model.pool);
    Solver solver;
    solver.add_cnf(model.cnf);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      const bool sat =
          solver.solve(feature_literals(model, mask_instance(n, mask))).status ==
          SolveStatus::kSat;
      bool truth;
      switch (f.kind()) {
        case Formula::Kind::True:
          truth = true;
          break;
        case Formula::Kind::False:
          truth = false;
          break;
        default:
          truth = evaluate(f, feature_assignment(n, mask));
      }
      REQUIRE(sat == truth);
    }
  }
}

TEST_CASE("degenerate classifiers: constant predictions", "[encoder]") {
  RandomForest always_zero;
  always_zero.num_features = 2;
  always_zero.threshold = 1;
  always_zero.trees.push_back(DecisionTree::single_leaf(0));

  // explain-negative asserts the output, which is unachievable
  const CnfModel neg_model = encode_forest(always_zero, Polarity::kExplainNegative);
  CHECK_THROWS_AS(build_pmaxsat(neg_model, encode_instance(mask_instance(2, 0), neg_model)),
                  HardUnsat);

  // a trivially-true classifier makes every instance satisfiable: no SR/CF
  RandomForest always_one;
  always_one.num_features = 2;
  always_one.threshold = 1;
  always_one.trees.push_back(DecisionTree::single_leaf(1));
  const CnfModel pos_model = encode_forest(always_one, Polarity::kExplainNegative);
  const auto p = build_pmaxsat(pos_model, encode_instance(mask_instance(2, 0b11), pos_model));
  CHECK(enumerate_mcs(p).subsets.empty());
  CHECK(enumerate_mus(p).subsets.empty());
}
