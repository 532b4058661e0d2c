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
#include <chrono>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "satexpl/errors.hpp"
#include "satexpl/pmaxsat.hpp"
#include "satexpl/solver.hpp"

namespace satexpl {

/// A set of soft-clause positions, kept sorted for canonical comparison.
using SoftSubset = std::vector<int>;

/// Bounds on an enumeration run. Enumeration halts when either bound trips
/// and the result is flagged incomplete.
struct EnumerationBudget {
  std::optional<std::size_t> max_results;
  std::optional<double> timeout_seconds;

  std::optional<std::chrono::steady_clock::time_point> deadline() const {
    if (!timeout_seconds) return std::nullopt;
    return std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
               std::chrono::duration<double>(*timeout_seconds));
  }
};

struct EnumerationResult {
  std::vector<SoftSubset> subsets;
  bool complete = true;
};

namespace detail {

/// Solver over the hard clauses with one fresh selector variable per soft
/// clause: assuming a selector enforces its soft clause, which gives cheap
/// subset toggling and assumption cores.
class SelectorSolver {
 public:
  explicit SelectorSolver(const PartialMaxSatInstance& p) : instance_(&p) {
    solver_.ensure_num_vars(p.num_vars());
    solver_.add_cnf(p.hard);
    selectors_.reserve(p.soft.size());
    for (const SoftClause& s : p.soft) {
      const Var sel = solver_.new_var();
      std::vector<Literal> clause{neg(sel)};
      clause.insert(clause.end(), s.clause.literals().begin(), s.clause.literals().end());
      solver_.add_clause(clause);
      selectors_.push_back(pos(sel));
    }
  }

  SatResult solve_subset(const SoftSubset& subset) {
    std::vector<Literal> assumptions;
    assumptions.reserve(subset.size());
    for (int i : subset) assumptions.push_back(selectors_[static_cast<std::size_t>(i)]);
    return solver_.solve(assumptions);
  }

  SatResult solve_free() { return solver_.solve(); }

  /// Soft clauses satisfied by a total model, as a sorted position set.
  SoftSubset satisfied_soft(const Assignment& model) const {
    SoftSubset out;
    for (std::size_t i = 0; i < instance_->soft.size(); ++i) {
      if (instance_->soft[i].clause.evaluate(model)) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  Solver& solver() { return solver_; }
  std::size_t num_soft() const { return instance_->soft.size(); }
  const PartialMaxSatInstance& instance() const { return *instance_; }

 private:
  const PartialMaxSatInstance* instance_;
  Solver solver_;
  std::vector<Literal> selectors_;
};

inline SoftSubset complement_of(const SoftSubset& subset, std::size_t num_soft) {
  SoftSubset out;
  std::size_t j = 0;
  for (int i = 0; i < static_cast<int>(num_soft); ++i) {
    if (j < subset.size() && subset[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

/// Extends `candidate` to a maximal satisfiable subset by linear search,
/// harvesting each SAT model to absorb every soft clause it satisfies.
/// Returns nullopt when the solver times out mid-grow.
inline std::optional<SoftSubset> grow_on(SelectorSolver& sel, SoftSubset candidate) {
  std::vector<bool> in(sel.num_soft(), false);
  for (int i : candidate) in[static_cast<std::size_t>(i)] = true;
  for (int i = 0; i < static_cast<int>(sel.num_soft()); ++i) {
    if (in[static_cast<std::size_t>(i)]) continue;
    SoftSubset attempt = candidate;
    attempt.insert(std::lower_bound(attempt.begin(), attempt.end(), i), i);
    const SatResult res = sel.solve_subset(attempt);
    if (res.status == SolveStatus::kUnknown) return std::nullopt;
    if (res.status == SolveStatus::kSat) {
      candidate = sel.satisfied_soft(res.model);
      for (int k : candidate) in[static_cast<std::size_t>(k)] = true;
    }
  }
  return candidate;
}

/// Definition check for an MCS: the complement is satisfiable with the hard
/// clauses, and adding back any single clause of the MCS is not.
inline bool check_mcs(SelectorSolver& verify, const SoftSubset& mcs) {
  const SoftSubset rest = complement_of(mcs, verify.num_soft());
  if (verify.solve_subset(rest).status != SolveStatus::kSat) return false;
  for (int c : mcs) {
    SoftSubset with = rest;
    with.insert(std::lower_bound(with.begin(), with.end(), c), c);
    if (verify.solve_subset(with).status != SolveStatus::kUnsat) return false;
  }
  return true;
}

/// Definition check for a MUS: unsatisfiable with the hard clauses, and
/// dropping any single clause restores satisfiability.
inline bool check_mus(SelectorSolver& verify, const SoftSubset& mus) {
  if (verify.solve_subset(mus).status != SolveStatus::kUnsat) return false;
  for (std::size_t k = 0; k < mus.size(); ++k) {
    SoftSubset without = mus;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(k));
    if (verify.solve_subset(without).status != SolveStatus::kSat) return false;
  }
  return true;
}

}  // namespace detail

/// Greedily extends `seed` with every soft clause that keeps the hard clauses
/// satisfiable; the complement of the result is an MCS (empty when the whole
/// instance is satisfiable). Precondition: hard + seed is satisfiable.
inline SoftSubset grow_mss(const SoftSubset& seed, const PartialMaxSatInstance& p) {
  detail::SelectorSolver sel(p);
  SoftSubset candidate = seed;
  std::sort(candidate.begin(), candidate.end());
  const SatResult res = sel.solve_subset(candidate);
  if (res.status != SolveStatus::kSat) {
    throw SolverError("grow_mss: hard clauses plus seed are unsatisfiable");
  }
  auto grown = detail::grow_on(sel, sel.satisfied_soft(res.model));
  return *grown;  // no deadline attached, grow_on cannot time out
}

/// Enumerates all Minimal Correction Subsets of the instance: iterate
/// "find a model of the hard clauses and blocking clauses, grow the satisfied
/// soft clauses to an MSS, emit its complement, block it by the disjunction
/// of its soft literals". Every emitted subset passes its definition check on
/// a pristine solver. With no budget the output is the complete MCS family;
/// a fully satisfiable instance yields an empty family.
inline EnumerationResult enumerate_mcs(const PartialMaxSatInstance& p,
                                       const EnumerationBudget& budget = {}) {
  const auto deadline = budget.deadline();
  detail::SelectorSolver enumerator(p);
  detail::SelectorSolver verifier(p);
  enumerator.solver().set_deadline(deadline);
  verifier.solver().set_deadline(deadline);

  EnumerationResult result;
  bool first = true;
  for (;;) {
    const SatResult res = enumerator.solve_free();
    if (res.status == SolveStatus::kUnknown) {
      result.complete = false;
      break;
    }
    if (res.status == SolveStatus::kUnsat) {
      if (first) throw HardUnsat("hard clauses are unsatisfiable");
      break;  // every MCS is blocked: enumeration complete
    }
    first = false;
    if (budget.max_results && result.subsets.size() >= *budget.max_results) {
      result.complete = false;
      break;
    }
    auto mss = detail::grow_on(enumerator, enumerator.satisfied_soft(res.model));
    if (!mss) {
      result.complete = false;
      break;
    }
    SoftSubset mcs = detail::complement_of(*mss, p.soft.size());
    if (mcs.empty()) break;  // instance satisfiable with all soft clauses
    if (!detail::check_mcs(verifier, mcs)) {
      if (deadline && std::chrono::steady_clock::now() > *deadline) {
        result.complete = false;  // check was cut short, not refuted
        break;
      }
      throw SolverError("internal error: emitted subset failed the MCS definition check");
    }
    // Block this MCS: some soft literal of it must hold in later models,
    // which forbids rediscovering it or any superset correction.
    std::vector<Literal> block;
    for (int i : mcs) {
      const auto& lits = p.soft[static_cast<std::size_t>(i)].clause.literals();
      block.insert(block.end(), lits.begin(), lits.end());
    }
    enumerator.solver().add_clause(block);
    result.subsets.push_back(std::move(mcs));
  }
  return result;
}

/// All inclusion-minimal sets intersecting every member of `family`, by
/// recursive branching on the elements of a smallest uncovered set, pruning
/// branches that would strand an element without a privately-hit set. The
/// empty family has the empty set as its unique minimal hitting set.
inline std::vector<SoftSubset> minimal_hitting_sets(const std::vector<SoftSubset>& family) {
  if (family.empty()) return {SoftSubset{}};
  for (const SoftSubset& f : family) {
    if (f.empty()) throw ConfigError("minimal_hitting_sets: family member is empty");
  }
  std::unordered_map<int, std::vector<std::size_t>> occ;
  for (std::size_t t = 0; t < family.size(); ++t) {
    for (int e : family[t]) occ[e].push_back(t);
  }
  std::vector<int> hit_count(family.size(), 0);
  std::vector<int> current;
  std::set<SoftSubset> found;

  auto has_private_set = [&](int e, int incoming) {
    for (std::size_t t : occ[e]) {
      if (hit_count[t] == 1 &&
          !std::binary_search(family[t].begin(), family[t].end(), incoming)) {
        return true;
      }
    }
    return false;
  };

  auto recurse = [&](auto&& self) -> void {
    std::size_t pick = family.size();
    for (std::size_t t = 0; t < family.size(); ++t) {
      if (hit_count[t] == 0 && (pick == family.size() || family[t].size() < family[pick].size())) {
        pick = t;
      }
    }
    if (pick == family.size()) {
      SoftSubset s(current.begin(), current.end());
      std::sort(s.begin(), s.end());
      found.insert(std::move(s));
      return;
    }
    for (int v : family[pick]) {
      bool all_critical = true;
      for (int e : current) {
        if (!has_private_set(e, v)) {
          all_critical = false;
          break;
        }
      }
      if (!all_critical) continue;
      current.push_back(v);
      for (std::size_t t : occ[v]) ++hit_count[t];
      self(self);
      for (std::size_t t : occ[v]) --hit_count[t];
      current.pop_back();
    }
  };
  recurse(recurse);
  return {found.begin(), found.end()};
}

/// MUS enumeration given an already-computed MCS family (hitting-set
/// duality). If the MCS phase was cut by its budget the duality is unsound,
/// so no subsets are returned and the result is flagged incomplete.
inline EnumerationResult enumerate_mus_from_mcs(const PartialMaxSatInstance& p,
                                                const EnumerationResult& mcs,
                                                const EnumerationBudget& budget = {}) {
  const auto deadline = budget.deadline();
  if (!mcs.complete) return EnumerationResult{{}, false};
  if (mcs.subsets.empty()) return EnumerationResult{{}, true};  // satisfiable instance

  std::vector<SoftSubset> candidates = minimal_hitting_sets(mcs.subsets);
  detail::SelectorSolver verifier(p);
  verifier.solver().set_deadline(deadline);
  EnumerationResult result;
  for (SoftSubset& mus : candidates) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      result.complete = false;
      break;
    }
    if (budget.max_results && result.subsets.size() >= *budget.max_results) {
      result.complete = false;
      break;
    }
    if (!detail::check_mus(verifier, mus)) {
      if (deadline && std::chrono::steady_clock::now() > *deadline) {
        result.complete = false;
        break;
      }
      throw SolverError("internal error: hitting set failed the MUS definition check");
    }
    result.subsets.push_back(std::move(mus));
  }
  return result;
}

/// Enumerates all Minimal Unsatisfiable Subsets: computes the complete MCS
/// family, then dualizes it with enumerate_mus_from_mcs. The result cap
/// applies to the MUS side only; the MCS phase must run to completion for the
/// duality to hold, so only the timeout limits it.
inline EnumerationResult enumerate_mus(const PartialMaxSatInstance& p,
                                       const EnumerationBudget& budget = {}) {
  EnumerationBudget mcs_budget;
  mcs_budget.timeout_seconds = budget.timeout_seconds;
  return enumerate_mus_from_mcs(p, enumerate_mcs(p, mcs_budget), budget);
}

/// Line-oriented text form for diffing against external enumerators, one
/// subset per line: "mcs: 3 7 12".
inline std::string format_subsets(const std::string& kind,
                                  const std::vector<SoftSubset>& subsets) {
  std::string out;
  for (const SoftSubset& s : subsets) {
    out += kind;
    out += ':';
    for (int i : s) {
      out += ' ';
      out += std::to_string(i);
    }
    out += '\n';
  }
  return out;
}

}  // namespace satexpl
