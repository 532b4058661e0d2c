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

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "satexpl/cnf.hpp"
#include "satexpl/errors.hpp"
#include "satexpl/forest.hpp"
#include "satexpl/formula.hpp"
#include "satexpl/instance.hpp"
#include "satexpl/pmaxsat.hpp"
#include "satexpl/solver.hpp"

namespace satexpl {

/// Which prediction the Partial Max-SAT instance explains. With
/// kExplainNegative the clauses assert the forest output, so instances
/// predicted 0 yield an unsatisfiable conjunction with their unit clauses;
/// kExplainPositive asserts the negated output and explains predictions of 1.
enum class Polarity { kExplainNegative, kExplainPositive };

inline std::string to_string(Polarity p) {
  return p == Polarity::kExplainNegative ? "neg" : "pos";
}

/// A forest compiled to clauses. Variable layout: features 1..n, tree
/// outputs y_1..y_m next, the forest output y after them, auxiliaries last.
/// The models of `cnf` restricted to the feature variables are exactly the
/// instances the forest predicts as the asserted polarity's positive class.
struct CnfModel {
  Cnf cnf;
  VarPool pool;
  std::vector<Var> tree_outputs;
  Var forest_output;
  Polarity polarity = Polarity::kExplainNegative;

  int num_features() const { return pool.num_features(); }
};

/// The Boolean function of a decision tree as the conjunction, over leaves
/// labelled 0, of the negated root-to-leaf path conjunction. A tree without
/// 0-leaves is the constant True; a bare 0-leaf is the constant False.
inline Formula tree_to_formula(const DecisionTree& tree, const VarPool& pool) {
  std::vector<Formula> negated_paths;
  std::vector<Literal> path;
  auto walk = [&](auto&& self, int at) -> void {
    const DecisionTree::Node& n = tree.nodes()[static_cast<std::size_t>(at)];
    if (n.is_leaf()) {
      if (n.label == 0) {
        std::vector<Formula> lits;
        lits.reserve(path.size());
        for (const Literal& l : path) lits.push_back(Formula::leaf(neg(l)));
        negated_paths.push_back(Formula::disj(std::move(lits)));
      }
      return;
    }
    path.push_back(neg(pool.feature_var(n.feature)));
    self(self, n.left);
    path.back() = pos(pool.feature_var(n.feature));
    self(self, n.right);
    path.pop_back();
  };
  walk(walk, tree.root());
  return Formula::conj(std::move(negated_paths));
}

/// Compiles the forest: (a) y_i tied by biconditional to the Tseitin output
/// of each tree formula, (b) the majority vote y <=> (sum y_i >= t) as a
/// cardinality constraint, (c) the polarity asserted as a hard unit clause.
inline CnfModel encode_forest(const RandomForest& forest, Polarity polarity,
                              std::vector<std::string> feature_names = {}) {
  forest.validate();
  if (feature_names.empty()) {
    for (int i = 1; i <= forest.num_features; ++i) {
      feature_names.push_back("X" + std::to_string(i));
    }
  }
  if (static_cast<int>(feature_names.size()) != forest.num_features) {
    throw ConfigError("feature name count does not match forest arity");
  }
  CnfModel model;
  model.polarity = polarity;
  model.pool = VarPool(feature_names);
  for (std::size_t i = 0; i < forest.trees.size(); ++i) {
    model.tree_outputs.push_back(model.pool.fresh());
  }
  model.forest_output = model.pool.fresh();

  for (std::size_t i = 0; i < forest.trees.size(); ++i) {
    const Var yi = model.tree_outputs[i];
    const Formula f = tree_to_formula(forest.trees[i], model.pool);
    if (f.kind() == Formula::Kind::True) {
      model.cnf.add_clause({pos(yi)});
      continue;
    }
    if (f.kind() == Formula::Kind::False) {
      model.cnf.add_clause({neg(yi)});
      continue;
    }
    auto [clauses, out] = tseitin(f, model.pool);
    model.cnf.add(clauses);
    model.cnf.add_clause({neg(yi), out});
    model.cnf.add_clause({pos(yi), neg(out)});
  }

  std::vector<Literal> votes;
  votes.reserve(model.tree_outputs.size());
  for (Var yi : model.tree_outputs) votes.push_back(pos(yi));
  model.cnf.add(
      encode_card_geq(votes, forest.threshold, pos(model.forest_output), model.pool));

  model.cnf.add_clause({polarity == Polarity::kExplainNegative ? pos(model.forest_output)
                                                               : neg(model.forest_output)});
  model.cnf.ensure_num_vars(model.pool.num_vars());
  return model;
}

/// One soft unit clause per feature: {X_i} when x_i = 1, {not X_i} otherwise,
/// in feature order.
inline std::vector<SoftClause> encode_instance(const Instance& x, const CnfModel& model) {
  if (x.arity() != model.num_features()) {
    throw ArityMismatch("instance arity " + std::to_string(x.arity()) +
                        " does not match encoding features " +
                        std::to_string(model.num_features()));
  }
  if (x.arity() == 0) throw ArityMismatch("empty instance");
  std::vector<SoftClause> soft;
  soft.reserve(x.values.size());
  for (int i = 0; i < x.arity(); ++i) {
    const Var v = model.pool.feature_var(i);
    const int value = x.values[static_cast<std::size_t>(i)];
    auto clause = Clause::normalized({value ? pos(v) : neg(v)});
    soft.push_back(SoftClause{std::move(*clause), i, value});
  }
  return soft;
}

/// Assembles hard and soft clauses and verifies with one SAT call that the
/// hard part alone is satisfiable — otherwise the classifier never predicts
/// the asserted class and explanations are undefined.
inline PartialMaxSatInstance build_pmaxsat(const CnfModel& model,
                                           std::vector<SoftClause> soft) {
  PartialMaxSatInstance p;
  p.hard = model.cnf;
  p.soft = std::move(soft);
  Solver solver;
  solver.add_cnf(p.hard);
  if (solver.solve().status != SolveStatus::kSat) {
    throw HardUnsat("classifier never predicts the asserted class (polarity " +
                    to_string(model.polarity) + ")");
  }
  return p;
}

/// Sidecar map for external tooling: feature-name <-> variable index plus the
/// y_i / y indices.
inline nlohmann::json var_map_to_json(const CnfModel& model) {
  nlohmann::json features = nlohmann::json::object();
  for (int i = 0; i < model.num_features(); ++i) {
    features[model.pool.feature_names()[static_cast<std::size_t>(i)]] =
        model.pool.feature_var(i).index;
  }
  nlohmann::json j;
  j["features"] = std::move(features);
  nlohmann::json tree_outputs = nlohmann::json::array();
  for (Var v : model.tree_outputs) tree_outputs.push_back(v.index);
  j["tree_outputs"] = std::move(tree_outputs);
  j["forest_output"] = model.forest_output.index;
  j["num_vars"] = model.cnf.num_vars();
  j["polarity"] = to_string(model.polarity);
  return j;
}

}  // namespace satexpl
