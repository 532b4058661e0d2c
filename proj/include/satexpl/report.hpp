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

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "satexpl/encoder.hpp"
#include "satexpl/errors.hpp"
#include "satexpl/instance.hpp"
#include "satexpl/scoring.hpp"

namespace satexpl {

struct NeighborhoodStats {
  int radius = 0;
  int total_members = 0;
  int same_prediction = 0;
  int scored = 0;
  bool complete = true;
};

/// Everything one explain run produces. Serializes deterministically for a
/// fixed seed; wall-clock timings live in their own field so determinism
/// checks can strip them.
struct ExplanationReport {
  nlohmann::json config_echo = nlohmann::json::object();
  std::vector<std::string> feature_names;
  Instance instance;
  std::optional<int> instance_index;
  int prediction = 0;
  Polarity polarity = Polarity::kExplainNegative;
  std::optional<double> fidelity;
  std::string note;
  int forest_trees = 0;
  int forest_threshold = 0;
  std::string forest_source;  // "trained" or "file"

  std::vector<ScoredExplanation> sufficient_reasons;
  std::vector<ScoredExplanation> counterfactuals;
  bool sr_complete = true;
  bool cf_complete = true;
  std::vector<FeatureScoreRow> feature_scores_sr;
  std::vector<FeatureScoreRow> feature_scores_cf;
  std::optional<NeighborhoodStats> neighborhood;
  std::map<std::string, double> timings_ms;
};

namespace detail {

inline nlohmann::json optional_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

inline nlohmann::json scored_explanations_to_json(const std::vector<ScoredExplanation>& list,
                                                  const std::vector<std::string>& names,
                                                  bool complete) {
  nlohmann::json out;
  out["complete"] = complete;
  nlohmann::json arr = nlohmann::json::array();
  for (const ScoredExplanation& s : list) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& [feature, value] : s.explanation.items) {
      items.push_back({{"feature", names[static_cast<std::size_t>(feature)]}, {"value", value}});
    }
    arr.push_back({{"items", std::move(items)},
                   {"size", s.explanation.size()},
                   {"scores",
                    {{"parsimony", s.parsimony},
                     {"responsibility", s.responsibility},
                     {"generality", optional_to_json(s.generality)},
                     {"neighborhood_responsibility",
                      optional_to_json(s.neighborhood_responsibility)}}}});
  }
  out["explanations"] = std::move(arr);
  return out;
}

inline nlohmann::json feature_scores_to_json(const std::vector<FeatureScoreRow>& rows,
                                             const std::vector<std::string>& names) {
  nlohmann::json arr = nlohmann::json::array();
  for (const FeatureScoreRow& r : rows) {
    arr.push_back({{"feature", names[static_cast<std::size_t>(r.feature)]},
                   {"involvement", r.involvement},
                   {"generality", optional_to_json(r.generality)},
                   {"responsibility", optional_to_json(r.responsibility)}});
  }
  return arr;
}

inline nlohmann::json rankings_to_json(const std::vector<ScoredExplanation>& list) {
  nlohmann::json out = nlohmann::json::object();
  if (list.empty()) return out;
  for (const std::string key : {"parsimony", "responsibility"}) {
    out[key] = rank(list, key);
  }
  if (list.front().generality) out["generality"] = rank(list, "generality");
  if (list.front().neighborhood_responsibility) {
    out["neighborhood-responsibility"] = rank(list, "neighborhood-responsibility");
  }
  return out;
}

}  // namespace detail

inline nlohmann::json report_to_json(const ExplanationReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = r.config_echo;
  j["feature_names"] = r.feature_names;
  j["instance"]["values"] = r.instance.values;
  j["instance"]["index"] =
      r.instance_index ? nlohmann::json(*r.instance_index) : nlohmann::json(nullptr);
  j["prediction"] = r.prediction;
  j["polarity"] = to_string(r.polarity);
  j["fidelity"] = detail::optional_to_json(r.fidelity);
  j["note"] = r.note;
  j["forest"] = {{"trees", r.forest_trees},
                 {"threshold", r.forest_threshold},
                 {"source", r.forest_source}};
  j["sufficient_reasons"] =
      detail::scored_explanations_to_json(r.sufficient_reasons, r.feature_names, r.sr_complete);
  j["counterfactuals"] =
      detail::scored_explanations_to_json(r.counterfactuals, r.feature_names, r.cf_complete);
  j["rankings"] = {{"sufficient_reasons", detail::rankings_to_json(r.sufficient_reasons)},
                   {"counterfactuals", detail::rankings_to_json(r.counterfactuals)}};
  j["feature_scores"] = {
      {"sr", detail::feature_scores_to_json(r.feature_scores_sr, r.feature_names)},
      {"cf", detail::feature_scores_to_json(r.feature_scores_cf, r.feature_names)}};
  if (r.neighborhood) {
    j["neighborhood"] = {{"radius", r.neighborhood->radius},
                         {"members", r.neighborhood->total_members},
                         {"same_prediction", r.neighborhood->same_prediction},
                         {"scored", r.neighborhood->scored},
                         {"complete", r.neighborhood->complete}};
  } else {
    j["neighborhood"] = nullptr;
  }
  j["timings_ms"] = r.timings_ms;
  return j;
}

/// The report body used for determinism comparisons: everything except the
/// wall-clock timings.
inline nlohmann::json report_body(nlohmann::json report_json) {
  report_json.erase("timings_ms");
  return report_json;
}

/// CSV table of per-feature scores, one row per (feature, kind):
/// feature,kind,involvement,generality,responsibility. Absent scores leave
/// the field empty.
inline std::string feature_scores_csv(const ExplanationReport& r) {
  auto cell = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  std::string out = "feature,kind,involvement,generality,responsibility\n";
  auto emit = [&](const std::vector<FeatureScoreRow>& rows, const char* kind) {
    for (const FeatureScoreRow& row : rows) {
      out += r.feature_names[static_cast<std::size_t>(row.feature)];
      out += ',';
      out += kind;
      out += ',';
      out += std::to_string(row.involvement);
      out += ',';
      out += cell(row.generality);
      out += ',';
      out += cell(row.responsibility);
      out += '\n';
    }
  };
  emit(r.feature_scores_sr, "SR");
  emit(r.feature_scores_cf, "CF");
  return out;
}

/// CSV table of per-explanation scores.
inline std::string explanation_scores_csv(const ExplanationReport& r) {
  auto cell = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  std::string out =
      "kind,items,size,parsimony,responsibility,generality,neighborhood_responsibility\n";
  auto emit = [&](const std::vector<ScoredExplanation>& list, const char* kind) {
    for (const ScoredExplanation& s : list) {
      out += kind;
      out += ',';
      std::string items;
      for (const auto& [feature, value] : s.explanation.items) {
        if (!items.empty()) items += ' ';
        items += r.feature_names[static_cast<std::size_t>(feature)];
        items += '=';
        items += std::to_string(value);
      }
      out += items;
      out += ',' + std::to_string(s.explanation.size());
      out += ',' + std::to_string(s.parsimony);
      out += ',' + std::to_string(s.responsibility);
      out += ',' + cell(s.generality);
      out += ',' + cell(s.neighborhood_responsibility);
      out += '\n';
    }
  };
  emit(r.sufficient_reasons, "SR");
  emit(r.counterfactuals, "CF");
  return out;
}

/// Neighborhood-explanations cache: everything cmd_score needs to recompute
/// neighborhood scores without re-enumeration.
inline nlohmann::json neighborhood_cache_to_json(const NeighborhoodExplanations& ne) {
  nlohmann::json j;
  j["radius"] = ne.radius;
  j["total_members"] = ne.total_members;
  j["same_prediction_members"] = ne.same_prediction_members;
  nlohmann::json neighbors = nlohmann::json::array();
  auto sets_to_json = [](const ExplanationSet& set, bool complete) {
    nlohmann::json out;
    out["complete"] = complete;
    nlohmann::json arr = nlohmann::json::array();
    for (const Explanation& e : set.explanations) {
      nlohmann::json items = nlohmann::json::array();
      for (const auto& [feature, value] : e.items) {
        items.push_back({{"feature", feature}, {"value", value}});
      }
      arr.push_back(std::move(items));
    }
    out["sets"] = std::move(arr);
    return out;
  };
  for (const NeighborExplanations& n : ne.scored) {
    neighbors.push_back({{"values", n.v.values},
                         {"distance", n.distance},
                         {"sufficient_reasons", sets_to_json(n.sufficient_reasons, n.sr_complete)},
                         {"counterfactuals", sets_to_json(n.counterfactuals, n.cf_complete)}});
  }
  j["neighbors"] = std::move(neighbors);
  return j;
}

inline NeighborhoodExplanations neighborhood_cache_from_json(const nlohmann::json& j) {
  NeighborhoodExplanations ne;
  ne.radius = j.value("radius", 0);
  ne.total_members = j.value("total_members", 0);
  ne.same_prediction_members = j.value("same_prediction_members", 0);
  auto sets_from_json = [](const nlohmann::json& in, ExplanationKind kind, const Instance& v,
                           bool& complete) {
    ExplanationSet set;
    set.kind = kind;
    set.instance = v;
    complete = in.value("complete", true);
    for (const auto& items : in.at("sets")) {
      Explanation e;
      e.kind = kind;
      for (const auto& item : items) {
        e.items.emplace_back(item.at("feature").get<int>(), item.at("value").get<int>());
      }
      std::sort(e.items.begin(), e.items.end());
      set.explanations.push_back(std::move(e));
    }
    return set;
  };
  for (const auto& nj : j.at("neighbors")) {
    NeighborExplanations n;
    n.v.values = nj.at("values").get<std::vector<std::uint8_t>>();
    n.distance = nj.value("distance", 0);
    n.sufficient_reasons = sets_from_json(nj.at("sufficient_reasons"),
                                          ExplanationKind::kSufficientReason, n.v, n.sr_complete);
    n.counterfactuals = sets_from_json(nj.at("counterfactuals"),
                                       ExplanationKind::kCounterfactual, n.v, n.cf_complete);
    ne.scored.push_back(std::move(n));
  }
  if (!ne.scored.empty()) ne.center = ne.scored.front().v;
  return ne;
}

/// Writes via a temp file in the same directory plus an atomic rename, so a
/// failed run never leaves a partial file behind.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path() && !target.parent_path().empty()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path temp = target.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary);
    if (!out) throw IoError("cannot write \"" + temp.string() + "\"");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(temp, ec);
      throw IoError("short write to \"" + temp.string() + "\"");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw IoError("cannot move report into place at \"" + path + "\"");
  }
}

}  // namespace satexpl
