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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "satexpl/cnf.hpp"
#include "satexpl/errors.hpp"

namespace satexpl {

enum class SolveStatus { kSat, kUnsat, kUnknown };

/// Outcome of one solve() call. `model` is present iff SAT and satisfies
/// every clause and every assumed literal. On UNSAT under assumptions,
/// `core` holds the subset of assumption literals in the final conflict
/// (empty when the clauses are unsatisfiable without any assumption).
struct SatResult {
  SolveStatus status = SolveStatus::kUnknown;
  Assignment model;
  std::vector<Literal> core;
};

/// Conflict-driven clause-learning SAT solver: unit propagation over
/// two-watched-literal lists, first-UIP conflict analysis with clause
/// minimization, VSIDS branching with phase saving, Luby restarts, learnt
/// clause reduction, and incremental solving under assumptions.
///
/// One instance is single-threaded and not shareable, but stays re-entrant
/// between incremental calls: clauses may be added between solves.
class Solver {
 public:
  Solver() = default;
  explicit Solver(int num_vars) { ensure_num_vars(num_vars); }

  int num_vars() const { return static_cast<int>(assigns_.size()); }

  Var new_var() {
    const int v = num_vars();
    watches_.emplace_back();
    watches_.emplace_back();
    assigns_.push_back(-1);
    level_.push_back(0);
    reason_.push_back(kNoReason);
    activity_.push_back(0.0);
    polarity_.push_back(0);
    seen_.push_back(0);
    heap_insert(v);
    return Var{v + 1};
  }

  void ensure_num_vars(int n) {
    while (num_vars() < n) new_var();
  }

  void add_cnf(const Cnf& cnf) {
    ensure_num_vars(cnf.num_vars());
    for (const Clause& c : cnf.clauses()) add_clause(c.literals());
  }

  /// Adds a clause. Returns false iff the solver became (or already was)
  /// inconsistent at the top level.
  bool add_clause(std::span<const Literal> lits) {
    cancel_until(0);
    if (!ok_) return false;
    std::vector<int> cl;
    cl.reserve(lits.size());
    for (const Literal& l : lits) {
      if (l.var.index < 1) throw SolverError("variable index must be >= 1");
      ensure_num_vars(l.var.index);
      cl.push_back(to_internal(l));
    }
    std::sort(cl.begin(), cl.end());
    cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
    std::vector<int> kept;
    for (std::size_t i = 0; i < cl.size(); ++i) {
      if (i + 1 < cl.size() && cl[i + 1] == (cl[i] ^ 1)) return ok_;  // tautology
      const int v = lit_value(cl[i]);
      if (v == 1) return ok_;  // satisfied at top level
      if (v == -1) kept.push_back(cl[i]);
    }
    if (kept.empty()) {
      ok_ = false;
    } else if (kept.size() == 1) {
      unchecked_enqueue(kept[0], kNoReason);
      ok_ = (propagate() == kNoReason);
    } else {
      attach_new_clause(std::move(kept), /*learnt=*/false);
      ++problem_clauses_;
      learnt_budget_ = std::max(learnt_budget_, 256.0 + problem_clauses_ / 3.0);
    }
    return ok_;
  }

  /// Aborts with SolveStatus::kUnknown once the wall clock passes `deadline`.
  void set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline) {
    deadline_ = deadline;
  }

  /// Seed for the (off-by-default) randomized branching component. The
  /// solver is deterministic for a fixed seed and input sequence.
  void set_branching_seed(std::uint64_t seed) { rng_state_ = seed | 1; }
  void set_random_branch_freq(double freq) { random_branch_freq_ = freq; }

  SatResult solve(std::span<const Literal> assumptions = {}) {
    SatResult result;
    if (!ok_) {
      cancel_until(0);
      result.status = SolveStatus::kUnsat;
      return result;
    }
    std::vector<int> wanted;
    wanted.reserve(assumptions.size());
    for (const Literal& l : assumptions) {
      ensure_num_vars(l.var.index);
      wanted.push_back(to_internal(l));
    }
    // Consecutive solves usually share a long assumption prefix; keep the
    // decision levels that still match instead of re-propagating them.
    int keep = 0;
    while (keep < static_cast<int>(wanted.size()) &&
           keep < static_cast<int>(assumptions_.size()) && keep < decision_level() &&
           assumptions_[static_cast<std::size_t>(keep)] ==
               wanted[static_cast<std::size_t>(keep)]) {
      ++keep;
    }
    cancel_until(keep);
    assumptions_ = std::move(wanted);
    conflict_core_.clear();
    timed_out_ = false;

    int status = 0;
    for (int restarts = 0; status == 0; ++restarts) {
      status = search(static_cast<std::int64_t>(luby(2.0, restarts) * 100.0));
      if (timed_out_) {
        cancel_until(0);
        assumptions_.clear();
        result.status = SolveStatus::kUnknown;
        return result;
      }
    }
    if (status > 0) {
      result.status = SolveStatus::kSat;
      result.model = make_assignment(num_vars());
      for (int v = 0; v < num_vars(); ++v) {
        result.model[static_cast<std::size_t>(v) + 1] = assigns_[static_cast<std::size_t>(v)];
      }
    } else {
      result.status = SolveStatus::kUnsat;
      result.core.reserve(conflict_core_.size());
      for (int l : conflict_core_) result.core.push_back(to_external(l));
      cancel_until(0);
      assumptions_.clear();
    }
    return result;
  }

  bool ok() const { return ok_; }
  std::uint64_t num_conflicts() const { return conflicts_; }
  std::uint64_t num_decisions() const { return decisions_; }
  std::uint64_t num_propagations() const { return propagations_; }

 private:
  // Internal literal encoding: lit = 2 * var + sign, var 0-based, sign 1 for
  // a negated variable.
  static int to_internal(Literal l) {
    return ((l.var.index - 1) << 1) | (l.positive ? 0 : 1);
  }
  static Literal to_external(int lit) {
    return Literal{Var{(lit >> 1) + 1}, (lit & 1) == 0};
  }
  static int negate(int lit) { return lit ^ 1; }
  static int var_of(int lit) { return lit >> 1; }

  static constexpr int kNoReason = -1;

  struct SClause {
    std::vector<int> lits;
    double activity = 0.0;
    bool learnt = false;
  };

  struct Watcher {
    int cref;
    int blocker;
  };

  int lit_value(int lit) const {
    const std::int8_t a = assigns_[static_cast<std::size_t>(var_of(lit))];
    return a < 0 ? -1 : (a ^ static_cast<std::int8_t>(lit & 1));
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void unchecked_enqueue(int lit, int reason) {
    const std::size_t v = static_cast<std::size_t>(var_of(lit));
    assigns_[v] = static_cast<std::int8_t>(1 - (lit & 1));
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(lit);
  }

  int propagate() {
    int conflict = kNoReason;
    while (qhead_ < trail_.size()) {
      const int p = trail_[qhead_++];
      ++propagations_;
      std::vector<Watcher>& ws = watches_[static_cast<std::size_t>(p)];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        const Watcher w = ws[i];
        if (lit_value(w.blocker) == 1) {
          ws[j++] = ws[i++];
          continue;
        }
        SClause& c = *db_[static_cast<std::size_t>(w.cref)];
        const int false_lit = negate(p);
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        ++i;
        const int first = c.lits[0];
        if (first != w.blocker && lit_value(first) == 1) {
          ws[j++] = Watcher{w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (lit_value(c.lits[k]) != 0) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[static_cast<std::size_t>(negate(c.lits[1]))].push_back(Watcher{w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        // Clause is unit or conflicting.
        ws[j++] = Watcher{w.cref, first};
        if (lit_value(first) == 0) {
          conflict = w.cref;
          qhead_ = trail_.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          unchecked_enqueue(first, w.cref);
        }
      }
      ws.resize(j);
    }
    return conflict;
  }

  /// First-UIP learning. Fills `out_learnt` (asserting literal first) and the
  /// backtrack level.
  void analyze(int confl, std::vector<int>& out_learnt, int& out_btlevel) {
    out_learnt.clear();
    out_learnt.push_back(0);  // placeholder for the asserting literal
    int path_count = 0;
    int p = -1;
    std::size_t index = trail_.size();

    do {
      SClause& c = *db_[static_cast<std::size_t>(confl)];
      if (c.learnt) bump_clause(c);
      for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
        const int q = c.lits[k];
        const std::size_t v = static_cast<std::size_t>(var_of(q));
        if (!seen_[v] && level_[v] > 0) {
          bump_var(static_cast<int>(v));
          seen_[v] = 1;
          if (level_[v] >= decision_level()) {
            ++path_count;
          } else {
            out_learnt.push_back(q);
          }
        }
      }
      while (!seen_[static_cast<std::size_t>(var_of(trail_[--index]))]) {
      }
      p = trail_[index];
      confl = reason_[static_cast<std::size_t>(var_of(p))];
      seen_[static_cast<std::size_t>(var_of(p))] = 0;
      --path_count;
    } while (path_count > 0);
    out_learnt[0] = negate(p);

    // Conflict clause minimization: drop literals whose reason clause is
    // already covered by the rest of the learnt clause.
    analyze_clear_.assign(out_learnt.begin(), out_learnt.end());
    std::size_t kept = 1;
    for (std::size_t k = 1; k < out_learnt.size(); ++k) {
      const int q = out_learnt[k];
      const int r = reason_[static_cast<std::size_t>(var_of(q))];
      bool redundant = false;
      if (r != kNoReason) {
        redundant = true;
        for (int other : db_[static_cast<std::size_t>(r)]->lits) {
          const std::size_t v = static_cast<std::size_t>(var_of(other));
          if (other != negate(q) && !seen_[v] && level_[v] > 0) {
            redundant = false;
            break;
          }
        }
      }
      if (!redundant) out_learnt[kept++] = q;
    }
    out_learnt.resize(kept);

    out_btlevel = 0;
    if (out_learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < out_learnt.size(); ++k) {
        if (level_[static_cast<std::size_t>(var_of(out_learnt[k]))] >
            level_[static_cast<std::size_t>(var_of(out_learnt[max_i]))]) {
          max_i = k;
        }
      }
      std::swap(out_learnt[1], out_learnt[max_i]);
      out_btlevel = level_[static_cast<std::size_t>(var_of(out_learnt[1]))];
    }
    for (int l : analyze_clear_) seen_[static_cast<std::size_t>(var_of(l))] = 0;
    seen_[static_cast<std::size_t>(var_of(p))] = 0;
  }

  /// Computes which assumptions imply the failing literal `p` (the negation
  /// of an assumption found false). Fills conflict_core_ with assumption
  /// literals.
  void analyze_final(int p) {
    conflict_core_.clear();
    conflict_core_.push_back(negate(p));
    if (decision_level() == 0) return;
    seen_[static_cast<std::size_t>(var_of(p))] = 1;
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[0]);) {
      const std::size_t v = static_cast<std::size_t>(var_of(trail_[i]));
      if (!seen_[v]) continue;
      if (reason_[v] == kNoReason) {
        // A decision seen from the failing assumption is itself an earlier
        // assumption (branching never precedes the assumption levels).
        conflict_core_.push_back(trail_[i]);
      } else {
        for (int q : db_[static_cast<std::size_t>(reason_[v])]->lits) {
          const std::size_t qv = static_cast<std::size_t>(var_of(q));
          if (level_[qv] > 0) seen_[qv] = 1;
        }
      }
      seen_[v] = 0;
    }
    seen_[static_cast<std::size_t>(var_of(p))] = 0;
  }

  void cancel_until(int target) {
    if (decision_level() <= target) return;
    for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(target)]);) {
      const std::size_t v = static_cast<std::size_t>(var_of(trail_[i]));
      polarity_[v] = assigns_[v];
      assigns_[v] = -1;
      reason_[v] = kNoReason;
      heap_insert(static_cast<int>(v));
    }
    trail_.resize(static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(target)]));
    trail_lim_.resize(static_cast<std::size_t>(target));
    qhead_ = trail_.size();
  }

  int search(std::int64_t conflict_budget) {
    std::int64_t local_conflicts = 0;
    std::vector<int> learnt;
    if (past_deadline()) {
      timed_out_ = true;
      return 0;
    }
    for (;;) {
      if ((++deadline_ticks_ & 0x7f) == 0 && past_deadline()) {
        timed_out_ = true;
        return 0;
      }
      const int confl = propagate();
      if (confl != kNoReason) {
        ++conflicts_;
        ++local_conflicts;
        if (decision_level() == 0) {
          ok_ = false;
          conflict_core_.clear();
          return -1;
        }
        int bt_level = 0;
        analyze(confl, learnt, bt_level);
        cancel_until(bt_level);
        if (learnt.size() == 1) {
          unchecked_enqueue(learnt[0], kNoReason);
        } else {
          const int cref = attach_new_clause(learnt, /*learnt=*/true);
          bump_clause(*db_[static_cast<std::size_t>(cref)]);
          unchecked_enqueue(learnt[0], cref);
        }
        decay_activities();
      } else {
        if (local_conflicts >= conflict_budget) {
          cancel_until(0);
          return 0;
        }
        if (learnt_count_ >
            static_cast<std::int64_t>(learnt_budget_) + static_cast<std::int64_t>(trail_.size())) {
          reduce_db();
        }
        int next = -1;
        while (decision_level() < static_cast<int>(assumptions_.size())) {
          const int p = assumptions_[static_cast<std::size_t>(decision_level())];
          const int v = lit_value(p);
          if (v == 1) {
            trail_lim_.push_back(static_cast<int>(trail_.size()));  // already satisfied
          } else if (v == 0) {
            analyze_final(negate(p));
            return -1;
          } else {
            next = p;
            break;
          }
        }
        if (next == -1) {
          ++decisions_;
          next = pick_branch_lit();
          if (next == -1) return 1;  // all variables assigned
        }
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        unchecked_enqueue(next, kNoReason);
      }
    }
  }

  int pick_branch_lit() {
    if (random_branch_freq_ > 0 && rng01() < random_branch_freq_ && !heap_.empty()) {
      const int v = heap_[static_cast<std::size_t>(rng_next()) % heap_.size()];
      if (assigns_[static_cast<std::size_t>(v)] < 0) {
        return (v << 1) | (polarity_[static_cast<std::size_t>(v)] == 1 ? 0 : 1);
      }
    }
    while (!heap_.empty()) {
      const int v = heap_remove_max();
      if (assigns_[static_cast<std::size_t>(v)] < 0) {
        return (v << 1) | (polarity_[static_cast<std::size_t>(v)] == 1 ? 0 : 1);
      }
    }
    return -1;
  }

  int attach_new_clause(std::vector<int> lits, bool learnt) {
    int cref;
    if (free_slots_.empty()) {
      cref = static_cast<int>(db_.size());
      db_.push_back(std::make_unique<SClause>());
    } else {
      cref = free_slots_.back();
      free_slots_.pop_back();
      db_[static_cast<std::size_t>(cref)] = std::make_unique<SClause>();
    }
    SClause& c = *db_[static_cast<std::size_t>(cref)];
    c.lits = std::move(lits);
    c.learnt = learnt;
    watches_[static_cast<std::size_t>(negate(c.lits[0]))].push_back(Watcher{cref, c.lits[1]});
    watches_[static_cast<std::size_t>(negate(c.lits[1]))].push_back(Watcher{cref, c.lits[0]});
    if (learnt) ++learnt_count_;
    return cref;
  }

  void detach_clause(int cref) {
    const SClause& c = *db_[static_cast<std::size_t>(cref)];
    for (int w = 0; w < 2; ++w) {
      auto& ws = watches_[static_cast<std::size_t>(negate(c.lits[static_cast<std::size_t>(w)]))];
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [cref](const Watcher& x) { return x.cref == cref; }),
               ws.end());
    }
  }

  bool is_reason_locked(int cref) const {
    const SClause& c = *db_[static_cast<std::size_t>(cref)];
    const std::size_t v = static_cast<std::size_t>(var_of(c.lits[0]));
    return reason_[v] == cref && assigns_[v] >= 0;
  }

  void reduce_db() {
    std::vector<int> learnts;
    for (std::size_t i = 0; i < db_.size(); ++i) {
      if (db_[i] && db_[i]->learnt) learnts.push_back(static_cast<int>(i));
    }
    std::sort(learnts.begin(), learnts.end(), [this](int a, int b) {
      return db_[static_cast<std::size_t>(a)]->activity < db_[static_cast<std::size_t>(b)]->activity;
    });
    const std::size_t limit = learnts.size() / 2;
    for (std::size_t i = 0; i < limit; ++i) {
      const int cref = learnts[i];
      if (db_[static_cast<std::size_t>(cref)]->lits.size() > 2 && !is_reason_locked(cref)) {
        detach_clause(cref);
        db_[static_cast<std::size_t>(cref)].reset();
        free_slots_.push_back(cref);
        --learnt_count_;
      }
    }
    learnt_budget_ *= 1.1;
  }

  bool past_deadline() const {
    return deadline_ && std::chrono::steady_clock::now() > *deadline_;
  }

  // --- activity bookkeeping ---

  void bump_var(int v) {
    activity_[static_cast<std::size_t>(v)] += var_inc_;
    if (activity_[static_cast<std::size_t>(v)] > 1e100) {
      for (double& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    heap_update(v);
  }

  void bump_clause(SClause& c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
      for (auto& cl : db_) {
        if (cl && cl->learnt) cl->activity *= 1e-20;
      }
      clause_inc_ *= 1e-20;
    }
  }

  void decay_activities() {
    var_inc_ /= 0.95;
    clause_inc_ /= 0.999;
  }

  // --- branching heap: max-heap on activity, ties broken by variable index
  // for reproducibility ---

  bool heap_before(int a, int b) const {
    const double aa = activity_[static_cast<std::size_t>(a)];
    const double ab = activity_[static_cast<std::size_t>(b)];
    return aa > ab || (aa == ab && a < b);
  }

  void heap_insert(int v) {
    heap_pos_.resize(assigns_.size(), -1);
    if (heap_pos_[static_cast<std::size_t>(v)] >= 0) return;
    heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    heap_up(static_cast<int>(heap_.size()) - 1);
  }

  void heap_update(int v) {
    const int i = heap_pos_[static_cast<std::size_t>(v)];
    if (i >= 0) heap_up(i);
  }

  int heap_remove_max() {
    const int top = heap_[0];
    heap_pos_[static_cast<std::size_t>(top)] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_pos_[static_cast<std::size_t>(heap_[0])] = 0;
      heap_down(0);
    }
    return top;
  }

  void heap_up(int i) {
    const int v = heap_[static_cast<std::size_t>(i)];
    while (i > 0) {
      const int parent = (i - 1) >> 1;
      if (!heap_before(v, heap_[static_cast<std::size_t>(parent)])) break;
      heap_[static_cast<std::size_t>(i)] = heap_[static_cast<std::size_t>(parent)];
      heap_pos_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(i)])] = i;
      i = parent;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_pos_[static_cast<std::size_t>(v)] = i;
  }

  void heap_down(int i) {
    const int v = heap_[static_cast<std::size_t>(i)];
    const int n = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= n) break;
      if (child + 1 < n &&
          heap_before(heap_[static_cast<std::size_t>(child + 1)], heap_[static_cast<std::size_t>(child)])) {
        ++child;
      }
      if (!heap_before(heap_[static_cast<std::size_t>(child)], v)) break;
      heap_[static_cast<std::size_t>(i)] = heap_[static_cast<std::size_t>(child)];
      heap_pos_[static_cast<std::size_t>(heap_[static_cast<std::size_t>(i)])] = i;
      i = child;
    }
    heap_[static_cast<std::size_t>(i)] = v;
    heap_pos_[static_cast<std::size_t>(v)] = i;
  }

  // --- misc ---

  static double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      --seq;
      x = x % size;
    }
    double result = 1.0;
    for (int i = 0; i < seq; ++i) result *= y;
    return result;
  }

  std::uint64_t rng_next() {
    rng_state_ ^= rng_state_ << 13;
    rng_state_ ^= rng_state_ >> 7;
    rng_state_ ^= rng_state_ << 17;
    return rng_state_;
  }

  double rng01() { return static_cast<double>(rng_next() >> 11) * 0x1.0p-53; }

  std::vector<std::unique_ptr<SClause>> db_;
  std::vector<int> free_slots_;
  std::vector<std::vector<Watcher>> watches_;  // indexed by internal literal
  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<std::int8_t> polarity_;
  std::vector<std::int8_t> seen_;
  std::vector<int> analyze_clear_;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;

  std::vector<int> assumptions_;
  std::vector<int> conflict_core_;

  std::int64_t learnt_count_ = 0;
  std::int64_t problem_clauses_ = 0;
  double learnt_budget_ = 256.0;
  std::uint64_t deadline_ticks_ = 0;
  bool ok_ = true;
  bool timed_out_ = false;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  double random_branch_freq_ = 0.0;
  std::uint64_t rng_state_ = 0x9e3779b97f4a7c15ULL;

  std::uint64_t conflicts_ = 0;
  std::uint64_t decisions_ = 0;
  std::uint64_t propagations_ = 0;
};

}  // namespace satexpl
