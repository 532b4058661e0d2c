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
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "satexpl/enumerate.hpp"
#include "satexpl/errors.hpp"
#include "satexpl/instance.hpp"
#include "satexpl/pmaxsat.hpp"

namespace satexpl {

enum class ExplanationKind { kSufficientReason, kCounterfactual };

inline std::string to_string(ExplanationKind k) {
  return k == ExplanationKind::kSufficientReason ? "SR" : "CF";
}

/// A sufficient reason or counterfactual: a set of (feature index, value of
/// that feature in the explained instance) pairs. Identity across instances
/// is equality of kind and item set, regardless of which instance produced
/// the explanation.
struct Explanation {
  ExplanationKind kind = ExplanationKind::kSufficientReason;
  std::vector<std::pair<int, int>> items;  // sorted by feature index

  int size() const { return static_cast<int>(items.size()); }

  bool involves(int feature) const {
    for (const auto& [f, v] : items) {
      if (f == feature) return true;
    }
    return false;
  }

  friend auto operator<=>(const Explanation&, const Explanation&) = default;
};

/// E(x,f) for one instance and one explanation kind, deduplicated.
struct ExplanationSet {
  Instance instance;
  ExplanationKind kind = ExplanationKind::kSufficientReason;
  std::vector<Explanation> explanations;

  bool contains(const Explanation& e) const {
    for (const Explanation& own : explanations) {
      if (own == e) return true;
    }
    return false;
  }
};

/// Builds the explanation set of `x` from enumerated soft subsets, mapping
/// each soft position through the instance's soft-clause metadata.
inline ExplanationSet to_explanations(ExplanationKind kind,
                                      const std::vector<SoftSubset>& subsets,
                                      const PartialMaxSatInstance& p, const Instance& x) {
  ExplanationSet out;
  out.instance = x;
  out.kind = kind;
  std::set<Explanation> dedup;
  for (const SoftSubset& s : subsets) {
    Explanation e;
    e.kind = kind;
    for (int i : s) {
      const SoftClause& soft = p.soft[static_cast<std::size_t>(i)];
      e.items.emplace_back(soft.feature, soft.value);
    }
    std::sort(e.items.begin(), e.items.end());
    if (dedup.insert(e).second) out.explanations.push_back(std::move(e));
  }
  return out;
}

/// Explanations of one same-prediction neighbor, both kinds.
struct NeighborExplanations {
  Instance v;
  int distance = 0;
  ExplanationSet sufficient_reasons;
  ExplanationSet counterfactuals;
  bool sr_complete = true;
  bool cf_complete = true;

  const ExplanationSet& of(ExplanationKind kind) const {
    return kind == ExplanationKind::kSufficientReason ? sufficient_reasons : counterfactuals;
  }
};

/// Per-neighbor explanation sets over the sampled neighborhood V(x,r).
/// `scored` holds only neighbors predicted like x (the center first,
/// nearest-first after that), up to the configured cap; the coverage counters
/// make capped scores interpretable as estimates.
struct NeighborhoodExplanations {
  Instance center;
  int radius = 0;
  int total_members = 0;            // |V(x,r)|, all sampled members
  int same_prediction_members = 0;  // members v with f(v) = f(x)
  std::vector<NeighborExplanations> scored;

  bool all_complete() const {
    for (const NeighborExplanations& n : scored) {
      if (!n.sr_complete || !n.cf_complete) return false;
    }
    return true;
  }
};

/// 1/size(e): inversely proportional to explanation size.
inline double score_parsimony(const Explanation& e) {
  if (e.size() < 1) throw Error("parsimony undefined for an empty explanation");
  return 1.0 / static_cast<double>(e.size());
}

/// |Extent(e,x,r)| / |V(x,r)|: the share of the neighborhood predicted like x
/// whose explanation set contains e.
inline double score_generality(const Explanation& e, const NeighborhoodExplanations& ne) {
  if (ne.total_members < 1) throw Error("generality needs a non-empty neighborhood");
  int extent = 0;
  for (const NeighborExplanations& n : ne.scored) {
    if (n.of(e.kind).contains(e)) ++extent;
  }
  return static_cast<double>(extent) / static_cast<double>(ne.total_members);
}

/// 1/|E(x,f)|: the same for every explanation of the instance.
inline double score_responsibility(const ExplanationSet& set) {
  if (set.explanations.empty()) throw Error("responsibility undefined for an empty set");
  return 1.0 / static_cast<double>(set.explanations.size());
}

/// max over neighbors v with e in E(v,f) of 1/|E(v,f)|. The center counts as
/// its own neighbor, so an explanation drawn from E(x,f) always has a value.
inline double score_responsibility_neighborhood(const Explanation& e,
                                                const NeighborhoodExplanations& ne) {
  std::optional<double> best;
  for (const NeighborExplanations& n : ne.scored) {
    const ExplanationSet& set = n.of(e.kind);
    if (!set.contains(e)) continue;
    const double r = score_responsibility(set);
    if (!best || r > *best) best = r;
  }
  if (!best) throw NoOccurrence("explanation appears in no scored neighbor");
  return *best;
}

/// Cover(X_k, x): the explanations of the set involving feature k.
inline std::vector<Explanation> cover(int feature, const ExplanationSet& set) {
  std::vector<Explanation> out;
  for (const Explanation& e : set.explanations) {
    if (e.involves(feature)) out.push_back(e);
  }
  return out;
}

/// |Cover(X_k,x)| / |E(x,f)|.
inline double score_feature_involvement(int feature, const ExplanationSet& set) {
  if (set.explanations.empty()) throw Error("involvement undefined for an empty set");
  return static_cast<double>(cover(feature, set).size()) /
         static_cast<double>(set.explanations.size());
}

/// |union over v of Cover(X_k,v)| / |E(V(x,r),f)| with set-union semantics:
/// identical explanations arising from different neighbors count once.
/// Absent when the neighborhood produced no explanations of this kind.
inline std::optional<double> score_feature_generality(int feature,
                                                      const NeighborhoodExplanations& ne,
                                                      ExplanationKind kind) {
  std::set<Explanation> all;
  std::set<Explanation> covered;
  for (const NeighborExplanations& n : ne.scored) {
    for (const Explanation& e : n.of(kind).explanations) {
      all.insert(e);
      if (e.involves(feature)) covered.insert(e);
    }
  }
  if (all.empty()) return std::nullopt;
  return static_cast<double>(covered.size()) / static_cast<double>(all.size());
}

enum class Aggregation { kMin, kMax, kAvg };

/// 1 / aggr{size(e) : e in Cover(X_k,x)}; absent on an empty cover rather
/// than zero.
inline std::optional<double> score_feature_responsibility(int feature,
                                                          const ExplanationSet& set,
                                                          Aggregation aggr = Aggregation::kAvg) {
  const std::vector<Explanation> c = cover(feature, set);
  if (c.empty()) return std::nullopt;
  double value = 0.0;
  switch (aggr) {
    case Aggregation::kMin: {
      int best = c.front().size();
      for (const Explanation& e : c) best = std::min(best, e.size());
      value = best;
      break;
    }
    case Aggregation::kMax: {
      int worst = c.front().size();
      for (const Explanation& e : c) worst = std::max(worst, e.size());
      value = worst;
      break;
    }
    case Aggregation::kAvg: {
      double sum = 0.0;
      for (const Explanation& e : c) sum += e.size();
      value = sum / static_cast<double>(c.size());
      break;
    }
  }
  return 1.0 / value;
}

/// One explanation with every attached score. Neighborhood scores are absent
/// when no neighborhood was scored.
struct ScoredExplanation {
  Explanation explanation;
  double parsimony = 0.0;
  double responsibility = 0.0;
  std::optional<double> generality;
  std::optional<double> neighborhood_responsibility;
};

struct FeatureScoreRow {
  int feature = 0;
  double involvement = 0.0;
  std::optional<double> generality;
  std::optional<double> responsibility;
};

inline std::vector<ScoredExplanation> score_explanations(
    const ExplanationSet& set, const NeighborhoodExplanations* ne) {
  std::vector<ScoredExplanation> out;
  out.reserve(set.explanations.size());
  for (const Explanation& e : set.explanations) {
    ScoredExplanation s;
    s.explanation = e;
    s.parsimony = score_parsimony(e);
    s.responsibility = score_responsibility(set);
    if (ne) {
      s.generality = score_generality(e, *ne);
      s.neighborhood_responsibility = score_responsibility_neighborhood(e, *ne);
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<FeatureScoreRow> score_features(int num_features, const ExplanationSet& set,
                                                   const NeighborhoodExplanations* ne,
                                                   Aggregation aggr = Aggregation::kAvg) {
  std::vector<FeatureScoreRow> rows;
  rows.reserve(static_cast<std::size_t>(num_features));
  const bool have_explanations = !set.explanations.empty();
  for (int f = 0; f < num_features; ++f) {
    FeatureScoreRow row;
    row.feature = f;
    row.involvement = have_explanations ? score_feature_involvement(f, set) : 0.0;
    if (ne) row.generality = score_feature_generality(f, *ne, set.kind);
    if (have_explanations) row.responsibility = score_feature_responsibility(f, set, aggr);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Stable ordering of scored explanations by one score, ties broken by
/// (size ascending, lexicographic items). Returns indices into `scored`.
/// Keys: "parsimony", "responsibility", "generality",
/// "neighborhood-responsibility". Explanations missing the requested score
/// sort after all scored ones.
inline std::vector<std::size_t> rank(const std::vector<ScoredExplanation>& scored,
                                     const std::string& key, bool descending = true) {
  auto value_of = [&key](const ScoredExplanation& s) -> std::optional<double> {
    if (key == "parsimony") return s.parsimony;
    if (key == "responsibility") return s.responsibility;
    if (key == "generality") return s.generality;
    if (key == "neighborhood-responsibility") return s.neighborhood_responsibility;
    throw UnknownKey("unknown score key \"" + key + "\"");
  };
  if (!scored.empty()) value_of(scored.front());  // validate the key up front
  std::vector<std::size_t> order(scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto va = value_of(scored[a]);
    const auto vb = value_of(scored[b]);
    if (va.has_value() != vb.has_value()) return va.has_value();
    if (va && vb && *va != *vb) return descending ? *va > *vb : *va < *vb;
    const Explanation& ea = scored[a].explanation;
    const Explanation& eb = scored[b].explanation;
    if (ea.size() != eb.size()) return ea.size() < eb.size();
    return ea.items < eb.items;
  });
  return order;
}

}  // namespace satexpl
