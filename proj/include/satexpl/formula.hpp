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

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satexpl/cnf.hpp"
#include "satexpl/errors.hpp"

namespace satexpl {

/// Immutable propositional formula tree. Shared-subtree value type: copying a
/// Formula copies a pointer, so formulas are cheap to pass around and safe to
/// share across threads.
class Formula {
 public:
  enum class Kind { True, False, Leaf, Not, And, Or };

  static Formula constant(bool value) {
    return Formula(std::make_shared<Node>(Node{value ? Kind::True : Kind::False, {}, {}}));
  }

  static Formula leaf(Literal l) {
    return Formula(std::make_shared<Node>(Node{Kind::Leaf, l, {}}));
  }

  static Formula negate(Formula f) {
    return Formula(std::make_shared<Node>(Node{Kind::Not, {}, {std::move(f)}}));
  }

  /// Conjunction. An empty child list collapses to the True constant so that
  /// And nodes always have at least one child.
  static Formula conj(std::vector<Formula> children) {
    if (children.empty()) return constant(true);
    if (children.size() == 1) return std::move(children.front());
    return Formula(std::make_shared<Node>(Node{Kind::And, {}, std::move(children)}));
  }

  /// Disjunction; an empty child list collapses to False.
  static Formula disj(std::vector<Formula> children) {
    if (children.empty()) return constant(false);
    if (children.size() == 1) return std::move(children.front());
    return Formula(std::make_shared<Node>(Node{Kind::Or, {}, std::move(children)}));
  }

  Kind kind() const { return node_->kind; }
  Literal literal() const { return node_->lit; }
  const std::vector<Formula>& children() const { return node_->children; }

 private:
  struct Node {
    Kind kind;
    Literal lit;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Truth value of `f` under the total assignment `a`.
/// Throws MissingAssignment if a variable of `f` is unassigned.
inline bool evaluate(const Formula& f, const Assignment& a) {
  switch (f.kind()) {
    case Formula::Kind::True:
      return true;
    case Formula::Kind::False:
      return false;
    case Formula::Kind::Leaf: {
      const Literal l = f.literal();
      const std::size_t idx = static_cast<std::size_t>(l.var.index);
      if (idx >= a.size() || a[idx] < 0) {
        throw MissingAssignment("unassigned variable " + std::to_string(l.var.index));
      }
      return (a[idx] == 1) == l.positive;
    }
    case Formula::Kind::Not:
      return !evaluate(f.children().front(), a);
    case Formula::Kind::And:
      for (const Formula& c : f.children()) {
        if (!evaluate(c, a)) return false;
      }
      return true;
    case Formula::Kind::Or:
      for (const Formula& c : f.children()) {
        if (evaluate(c, a)) return true;
      }
      return false;
  }
  return false;  // unreachable
}

namespace detail {

inline Literal tseitin_node(const Formula& f, VarPool& pool, Cnf& out) {
  switch (f.kind()) {
    case Formula::Kind::True: {
      const Var a = pool.fresh();
      out.add_clause({pos(a)});
      return pos(a);
    }
    case Formula::Kind::False: {
      const Var a = pool.fresh();
      out.add_clause({neg(a)});
      return pos(a);
    }
    case Formula::Kind::Leaf:
      return f.literal();
    case Formula::Kind::Not:
      // Negation folds into the polarity of the child's output literal.
      return neg(tseitin_node(f.children().front(), pool, out));
    case Formula::Kind::And: {
      std::vector<Literal> child_outs;
      child_outs.reserve(f.children().size());
      for (const Formula& c : f.children()) {
        child_outs.push_back(tseitin_node(c, pool, out));
      }
      if (child_outs.size() == 1) return child_outs.front();
      const Literal gate = pos(pool.fresh());
      std::vector<Literal> back{gate};
      for (const Literal& l : child_outs) {
        out.add_clause({neg(gate), l});
        back.push_back(neg(l));
      }
      out.add_clause(std::move(back));
      return gate;
    }
    case Formula::Kind::Or: {
      std::vector<Literal> child_outs;
      child_outs.reserve(f.children().size());
      for (const Formula& c : f.children()) {
        child_outs.push_back(tseitin_node(c, pool, out));
      }
      if (child_outs.size() == 1) return child_outs.front();
      const Literal gate = pos(pool.fresh());
      std::vector<Literal> fwd{neg(gate)};
      for (const Literal& l : child_outs) {
        out.add_clause({gate, neg(l)});
        fwd.push_back(l);
      }
      out.add_clause(std::move(fwd));
      return gate;
    }
  }
  return Literal{};  // unreachable
}

}  // namespace detail

/// Tseitin transformation. Emits full biconditional gate clauses (both
/// implication directions) defining one fresh auxiliary per And/Or gate, and
/// returns the literal representing `f`. The clauses conjoined with the unit
/// clause {out} are equisatisfiable with `f`, and every model of `f` over the
/// original variables extends to exactly one model of the emitted clauses.
inline std::pair<Cnf, Literal> tseitin(const Formula& f, VarPool& pool) {
  Cnf out;
  const Literal root = detail::tseitin_node(f, pool, out);
  out.ensure_num_vars(pool.num_vars());
  return {std::move(out), root};
}

/// Clauses enforcing out <=> (sum of lits >= threshold) under every total
/// assignment, via a sequential counter with register variables
/// s(i,j) <=> "at least j of the first i literals are true", encoded in both
/// implication directions so `out` is fully determined by the literals.
///
/// Throws InvalidThreshold unless 1 <= threshold <= lits.size().
inline Cnf encode_card_geq(std::span<const Literal> lits, int threshold, Literal out,
                           VarPool& pool) {
  const int m = static_cast<int>(lits.size());
  if (threshold < 1 || threshold > m) {
    throw InvalidThreshold("threshold " + std::to_string(threshold) +
                           " out of range 1.." + std::to_string(m));
  }
  Cnf cnf;
  // reg[i][j] for 1 <= i <= m, 1 <= j <= min(i, threshold); s(i,0) is the
  // constant true and s(i,j) for j > i the constant false, both inlined.
  std::vector<std::vector<Var>> reg(static_cast<std::size_t>(m) + 1);
  for (int i = 1; i <= m; ++i) {
    const int top = std::min(i, threshold);
    reg[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(top) + 1);
    for (int j = 1; j <= top; ++j) {
      reg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = pool.fresh();
    }
  }
  auto s = [&](int i, int j) { return pos(reg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]); };

  cnf.add_clause({neg(s(1, 1)), lits[0]});
  cnf.add_clause({s(1, 1), neg(lits[0])});
  for (int i = 2; i <= m; ++i) {
    const Literal li = lits[static_cast<std::size_t>(i - 1)];
    const int top = std::min(i, threshold);
    for (int j = 1; j <= top; ++j) {
      if (j == i) {
        // s(i,i) <=> l_i and s(i-1,i-1)
        cnf.add_clause({neg(s(i, i)), li});
        cnf.add_clause({neg(s(i, i)), s(i - 1, i - 1)});
        cnf.add_clause({s(i, i), neg(li), neg(s(i - 1, i - 1))});
      } else if (j == 1) {
        // s(i,1) <=> s(i-1,1) or l_i
        cnf.add_clause({neg(s(i - 1, 1)), s(i, 1)});
        cnf.add_clause({neg(li), s(i, 1)});
        cnf.add_clause({neg(s(i, 1)), s(i - 1, 1), li});
      } else {
        // s(i,j) <=> s(i-1,j) or (l_i and s(i-1,j-1))
        cnf.add_clause({neg(s(i - 1, j)), s(i, j)});
        cnf.add_clause({neg(li), neg(s(i - 1, j - 1)), s(i, j)});
        cnf.add_clause({neg(s(i, j)), s(i - 1, j), li});
        cnf.add_clause({neg(s(i, j)), s(i - 1, j), s(i - 1, j - 1)});
      }
    }
  }
  cnf.add_clause({neg(out), s(m, threshold)});
  cnf.add_clause({out, neg(s(m, threshold))});
  cnf.ensure_num_vars(pool.num_vars());
  return cnf;
}

}  // namespace satexpl
