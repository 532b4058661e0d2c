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

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "satexpl/errors.hpp"

namespace satexpl {

/// A propositional variable. Indices are 1-based and dense within a VarPool;
/// index 0 is never used.
struct Var {
  int index = 0;

  friend auto operator<=>(const Var&, const Var&) = default;
};

/// A variable or its negation.
struct Literal {
  Var var;
  bool positive = true;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

inline Literal pos(Var v) { return Literal{v, true}; }
inline Literal neg(Var v) { return Literal{v, false}; }

/// Negation is an involution: neg(neg(l)) == l.
inline Literal neg(Literal l) { return Literal{l.var, !l.positive}; }

/// Signed DIMACS-style integer form: +index / -index.
inline int to_dimacs(Literal l) { return l.positive ? l.var.index : -l.var.index; }

inline Literal from_dimacs(int code) {
  return Literal{Var{code < 0 ? -code : code}, code > 0};
}

/// Total truth assignment, indexed by variable index (slot 0 unused).
/// Values: 0, 1, or -1 for unassigned.
using Assignment = std::vector<std::int8_t>;

inline Assignment make_assignment(int num_vars, std::int8_t fill = -1) {
  return Assignment(static_cast<std::size_t>(num_vars) + 1, fill);
}

/// A disjunction of literals, kept sorted and duplicate-free.
class Clause {
 public:
  Clause() = default;

  /// Normalizes `lits`: merges duplicates, rejects tautologies (a clause
  /// containing both l and neg(l)). Returns nullopt for a tautology.
  static std::optional<Clause> normalized(std::vector<Literal> lits) {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i) {
      if (lits[i].var == lits[i - 1].var) return std::nullopt;
    }
    Clause c;
    c.lits_ = std::move(lits);
    return c;
  }

  const std::vector<Literal>& literals() const { return lits_; }
  std::size_t size() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }

  bool contains(Literal l) const {
    return std::binary_search(lits_.begin(), lits_.end(), l);
  }

  /// Truth value under a total assignment of the clause's variables.
  bool evaluate(const Assignment& a) const {
    for (const Literal& l : lits_) {
      const std::size_t idx = static_cast<std::size_t>(l.var.index);
      if (idx >= a.size() || a[idx] < 0) {
        throw MissingAssignment("unassigned variable " + std::to_string(l.var.index));
      }
      if ((a[idx] == 1) == l.positive) return true;
    }
    return false;
  }

  friend auto operator<=>(const Clause&, const Clause&) = default;

 private:
  std::vector<Literal> lits_;
};

/// A conjunction of clauses over variables 1..num_vars.
class Cnf {
 public:
  Cnf() = default;
  explicit Cnf(int num_vars) : num_vars_(num_vars) {}

  /// Adds a clause after normalization. Tautologies are dropped eagerly;
  /// returns false when that happens. num_vars grows to cover the clause.
  bool add_clause(std::vector<Literal> lits) {
    auto c = Clause::normalized(std::move(lits));
    if (!c) return false;
    for (const Literal& l : c->literals()) {
      num_vars_ = std::max(num_vars_, l.var.index);
    }
    clauses_.push_back(std::move(*c));
    return true;
  }

  void add(const Cnf& other) {
    num_vars_ = std::max(num_vars_, other.num_vars_);
    clauses_.insert(clauses_.end(), other.clauses_.begin(), other.clauses_.end());
  }

  const std::vector<Clause>& clauses() const { return clauses_; }
  std::size_t num_clauses() const { return clauses_.size(); }

  int num_vars() const { return num_vars_; }

  /// Raises the variable count (e.g. to cover pool variables that appear in
  /// no clause yet). Never shrinks.
  void ensure_num_vars(int n) { num_vars_ = std::max(num_vars_, n); }

  bool evaluate(const Assignment& a) const {
    for (const Clause& c : clauses_) {
      if (!c.evaluate(a)) return false;
    }
    return true;
  }

  friend bool operator==(const Cnf& a, const Cnf& b) {
    return a.num_vars_ == b.num_vars_ && a.clauses_ == b.clauses_;
  }

 private:
  std::vector<Clause> clauses_;
  int num_vars_ = 0;
};

/// Issues fresh variables and keeps the feature-name <-> variable map.
/// Input features occupy the lowest indices 1..n; every later fresh() call
/// returns an auxiliary above them.
class VarPool {
 public:
  VarPool() = default;

  explicit VarPool(const std::vector<std::string>& feature_names) {
    names_.reserve(feature_names.size());
    for (const std::string& name : feature_names) {
      if (!by_name_.emplace(name, Var{static_cast<int>(names_.size()) + 1}).second) {
        throw ConfigError("duplicate feature name \"" + name + "\"");
      }
      names_.push_back(name);
    }
    next_ = static_cast<int>(names_.size()) + 1;
  }

  Var fresh() { return Var{next_++}; }

  int num_vars() const { return next_ - 1; }
  int num_features() const { return static_cast<int>(names_.size()); }

  /// Variable of feature `i` (0-based feature index).
  Var feature_var(int i) const { return Var{i + 1}; }

  std::optional<Var> var_of(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::string> name_of(Var v) const {
    if (v.index >= 1 && v.index <= static_cast<int>(names_.size())) {
      return names_[static_cast<std::size_t>(v.index) - 1];
    }
    return std::nullopt;
  }

  const std::vector<std::string>& feature_names() const { return names_; }

 private:
  int next_ = 1;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Var> by_name_;
};

}  // namespace satexpl
