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
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "satexpl/csv.hpp"
#include "satexpl/encoder.hpp"
#include "satexpl/enumerate.hpp"
#include "satexpl/errors.hpp"
#include "satexpl/forest.hpp"
#include "satexpl/forest_json.hpp"
#include "satexpl/instance.hpp"
#include "satexpl/oracle.hpp"
#include "satexpl/parallel.hpp"
#include "satexpl/report.hpp"
#include "satexpl/sampling.hpp"
#include "satexpl/scoring.hpp"

namespace satexpl {

/// One explain/encode run, fully specified. Everything has a default except
/// the dataset/forest source and the instance selector.
struct RunConfig {
  std::string data_path;
  std::optional<std::string> labels_column;
  std::string oracle_command;
  std::string forest_file;
  std::string instance_spec;  // row index into the dataset, or inline "1,0,1,..."
  int radius = -1;            // -1: full radius (the feature count)
  int samples = 200;          // perturbation budget p
  int nb_trees = 10;
  int max_depth = 24;
  int min_leaf = 1;
  std::uint64_t seed = 0;
  Polarity polarity = Polarity::kExplainNegative;
  double timeout_seconds = 600.0;
  std::optional<std::size_t> max_explanations;
  int neighbor_cap = 50;
  std::string out_path;
  std::optional<std::pair<int, int>> grid;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  int oracle_batch = 1024;

  nlohmann::json echo() const {
    nlohmann::json j;
    j["data"] = data_path;
    j["labels_column"] = labels_column ? nlohmann::json(*labels_column) : nlohmann::json(nullptr);
    j["oracle_cmd"] = oracle_command;
    j["forest_file"] = forest_file;
    j["instance"] = instance_spec;
    j["radius"] = radius;
    j["samples"] = samples;
    j["trees"] = nb_trees;
    j["depth"] = max_depth;
    j["seed"] = seed;
    j["polarity"] = to_string(polarity);
    j["timeout"] = timeout_seconds;
    j["max_explanations"] =
        max_explanations ? nlohmann::json(*max_explanations) : nlohmann::json(nullptr);
    j["neighbor_cap"] = neighbor_cap;
    return j;
  }
};

struct PipelineResult {
  ExplanationReport report;
  RandomForest forest;
  CnfModel model;
  PartialMaxSatInstance pmaxsat;
  NeighborhoodSet neighborhood;  // members empty when no sampling happened
  std::optional<NeighborhoodExplanations> neighborhood_explanations;
};

namespace detail {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Instance parse_instance_spec(const std::string& spec, const Dataset* dataset) {
  if (spec.empty()) throw ConfigError("no instance selected");
  if (spec.find(',') != std::string::npos) {
    Instance x;
    std::istringstream in(spec);
    std::string token;
    while (std::getline(in, token, ',')) {
      if (token == "0") {
        x.values.push_back(0);
      } else if (token == "1") {
        x.values.push_back(1);
      } else {
        throw ConfigError("inline instance must be comma-separated 0/1 values, got \"" + token +
                          "\"");
      }
    }
    return x;
  }
  std::size_t consumed = 0;
  int index = 0;
  try {
    index = std::stoi(spec, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("instance selector must be a row index or an inline vector");
  }
  if (consumed != spec.size()) {
    throw ConfigError("instance selector must be a row index or an inline vector");
  }
  if (!dataset) throw ConfigError("row-index instance selection needs --data");
  if (index < 0 || index >= static_cast<int>(dataset->rows.size())) {
    throw ConfigError("row index " + std::to_string(index) + " outside dataset of " +
                      std::to_string(dataset->rows.size()) + " rows");
  }
  Instance x = dataset->rows[static_cast<std::size_t>(index)];
  x.label.reset();
  return x;
}

inline std::unique_ptr<Oracle> make_oracle(const RunConfig& cfg, const Dataset* dataset) {
  if (!cfg.oracle_command.empty()) {
    return std::make_unique<SubprocessOracle>(cfg.oracle_command, cfg.oracle_batch);
  }
  if (cfg.labels_column) {
    if (!dataset) throw ConfigError("--labels-col needs --data");
    return std::make_unique<PrecomputedOracle>(*dataset, cfg.oracle_batch);
  }
  return nullptr;
}

/// Per-neighbor SR/CF enumeration over the scored slice of the neighborhood
/// (same surrogate prediction as the center, nearest-first, center first).
inline NeighborhoodExplanations explain_neighborhood(
    const CnfModel& model, const RandomForest& forest, const NeighborhoodSet& ns,
    int center_prediction, int cap, const EnumerationBudget& budget, int jobs) {
  NeighborhoodExplanations ne;
  ne.center = ns.center;
  ne.radius = ns.radius;
  ne.total_members = static_cast<int>(ns.members.size());

  std::vector<std::pair<int, int>> order;  // (distance, member index), stable
  for (std::size_t i = 0; i < ns.members.size(); ++i) {
    if (forest.predict(ns.members[i]) != center_prediction) continue;
    order.emplace_back(hamming(ns.center, ns.members[i]), static_cast<int>(i));
  }
  ne.same_prediction_members = static_cast<int>(order.size());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (cap >= 0 && static_cast<int>(order.size()) > cap) {
    order.resize(static_cast<std::size_t>(cap));
  }

  ne.scored.resize(order.size());
  parallel_for(jobs, static_cast<int>(order.size()), [&](int slot) {
    const auto [distance, member_index] = order[static_cast<std::size_t>(slot)];
    const Instance& v = ns.members[static_cast<std::size_t>(member_index)];
    PartialMaxSatInstance p;
    p.hard = model.cnf;  // hard satisfiability was verified once by the caller
    p.soft = encode_instance(v, model);

    NeighborExplanations entry;
    entry.v = v;
    entry.distance = distance;
    const EnumerationResult cf = enumerate_mcs(p, budget);
    entry.counterfactuals = to_explanations(ExplanationKind::kCounterfactual, cf.subsets, p, v);
    entry.cf_complete = cf.complete;
    const EnumerationResult sr = enumerate_mus_from_mcs(p, cf, budget);
    entry.sufficient_reasons =
        to_explanations(ExplanationKind::kSufficientReason, sr.subsets, p, v);
    entry.sr_complete = sr.complete;
    ne.scored[static_cast<std::size_t>(slot)] = std::move(entry);
  });
  return ne;
}

}  // namespace detail

/// Everything through the Partial Max-SAT assembly: resolve the dataset and
/// instance, obtain the surrogate (trained on the labeled neighborhood, or
/// loaded from a file), and compile it against the requested polarity. With a
/// forest file, sampling/training are skipped and fidelity is only available
/// when an oracle is configured.
inline PipelineResult prepare_encoding(const RunConfig& cfg) {
  PipelineResult result;
  ExplanationReport& report = result.report;
  report.config_echo = cfg.echo();
  report.polarity = cfg.polarity;

  std::optional<Dataset> dataset;
  if (!cfg.data_path.empty()) dataset = ingest_csv(cfg.data_path, cfg.labels_column);

  const Instance x = detail::parse_instance_spec(cfg.instance_spec, dataset ? &*dataset : nullptr);
  report.instance = x;
  if (cfg.instance_spec.find(',') == std::string::npos && !cfg.instance_spec.empty()) {
    report.instance_index = std::stoi(cfg.instance_spec);
  }
  if (dataset && x.arity() != dataset->num_features()) {
    throw ConfigError("instance arity " + std::to_string(x.arity()) +
                      " does not match dataset features " +
                      std::to_string(dataset->num_features()));
  }

  const int radius = cfg.radius < 0 ? x.arity() : cfg.radius;
  std::unique_ptr<Oracle> oracle = detail::make_oracle(cfg, dataset ? &*dataset : nullptr);

  std::vector<std::string> forest_names;
  if (!cfg.forest_file.empty()) {
    detail::Stopwatch t;
    result.forest = load_forest_file(cfg.forest_file, &forest_names);
    report.forest_source = "file";
    report.timings_ms["load_forest"] = t.ms();
    if (x.arity() != result.forest.num_features) {
      throw ConfigError("instance arity " + std::to_string(x.arity()) +
                        " does not match forest features " +
                        std::to_string(result.forest.num_features));
    }
    // a neighborhood is still useful for the neighborhood scores
    if (radius > 0 && (dataset || cfg.samples > 0)) {
      detail::Stopwatch ts;
      result.neighborhood = sample_neighborhood(x, radius, dataset ? &*dataset : nullptr,
                                                cfg.samples, cfg.seed);
      report.timings_ms["sample"] = ts.ms();
      if (oracle) {
        detail::Stopwatch tl;
        result.neighborhood = label(result.neighborhood, *oracle);
        report.timings_ms["label"] = tl.ms();
        report.fidelity = fidelity(result.forest, result.neighborhood);
      }
    }
  } else {
    if (!oracle) {
      throw ConfigError("training a surrogate needs an oracle: --oracle-cmd or --labels-col");
    }
    detail::Stopwatch ts;
    result.neighborhood =
        sample_neighborhood(x, radius, dataset ? &*dataset : nullptr, cfg.samples, cfg.seed);
    report.timings_ms["sample"] = ts.ms();
    detail::Stopwatch tl;
    result.neighborhood = label(result.neighborhood, *oracle);
    report.timings_ms["label"] = tl.ms();
    detail::Stopwatch tt;
    result.forest = train_forest(result.neighborhood.members, cfg.nb_trees, cfg.max_depth,
                                 cfg.seed, cfg.min_leaf, cfg.jobs);
    report.forest_source = "trained";
    report.timings_ms["train"] = tt.ms();
    report.fidelity = fidelity(result.forest, result.neighborhood);
  }
  report.forest_trees = static_cast<int>(result.forest.trees.size());
  report.forest_threshold = result.forest.threshold;

  report.feature_names = dataset ? dataset->feature_names : forest_names;
  if (dataset && !forest_names.empty() && forest_names != dataset->feature_names) {
    throw ConfigError("forest file feature names differ from the dataset header");
  }

  detail::Stopwatch te;
  result.model = encode_forest(result.forest, cfg.polarity, report.feature_names);
  report.feature_names = result.model.pool.feature_names();
  result.pmaxsat = build_pmaxsat(result.model, encode_instance(x, result.model));
  report.timings_ms["encode"] = te.ms();
  report.prediction = result.forest.predict(x);
  return result;
}

/// The full pipeline: sample -> label -> train -> encode -> enumerate ->
/// score. Neighborhood scores are computed whenever a neighborhood exists
/// and the neighbor cap allows it.
inline PipelineResult run_explain(const RunConfig& cfg) {
  detail::Stopwatch total;
  PipelineResult result = prepare_encoding(cfg);
  ExplanationReport& report = result.report;
  const Instance x = report.instance;
  const int asserted_class = cfg.polarity == Polarity::kExplainNegative ? 1 : 0;

  EnumerationBudget budget;
  budget.max_results = cfg.max_explanations;
  if (cfg.timeout_seconds > 0) budget.timeout_seconds = cfg.timeout_seconds;

  ExplanationSet srs, cfs;
  srs.instance = x;
  srs.kind = ExplanationKind::kSufficientReason;
  cfs.instance = x;
  cfs.kind = ExplanationKind::kCounterfactual;

  if (report.prediction == asserted_class) {
    report.note = "instance already predicted " +
                  std::string(asserted_class == 1 ? "positive" : "negative") +
                  "; zero explanations of kind SR/CF";
  } else {
    detail::Stopwatch tn;
    const EnumerationResult cf = enumerate_mcs(result.pmaxsat, budget);
    report.timings_ms["enumerate_cf"] = tn.ms();
    cfs = to_explanations(ExplanationKind::kCounterfactual, cf.subsets, result.pmaxsat, x);
    report.cf_complete = cf.complete;

    detail::Stopwatch tm;
    EnumerationResult full_cf = cf;
    if (budget.max_results && !cf.complete) {
      // the CF list may have been capped by --max-explanations; duality needs
      // the complete family, so rerun without the cap
      EnumerationBudget uncapped;
      uncapped.timeout_seconds = budget.timeout_seconds;
      full_cf = enumerate_mcs(result.pmaxsat, uncapped);
    }
    const EnumerationResult sr = enumerate_mus_from_mcs(result.pmaxsat, full_cf, budget);
    report.timings_ms["enumerate_sr"] = tm.ms();
    srs = to_explanations(ExplanationKind::kSufficientReason, sr.subsets, result.pmaxsat, x);
    report.sr_complete = sr.complete;

    if (!result.neighborhood.members.empty() && cfg.neighbor_cap != 0) {
      detail::Stopwatch tne;
      result.neighborhood_explanations = detail::explain_neighborhood(
          result.model, result.forest, result.neighborhood, report.prediction,
          cfg.neighbor_cap, budget, cfg.jobs);
      report.timings_ms["neighborhood"] = tne.ms();
      report.neighborhood = NeighborhoodStats{
          result.neighborhood.radius, result.neighborhood_explanations->total_members,
          result.neighborhood_explanations->same_prediction_members,
          static_cast<int>(result.neighborhood_explanations->scored.size()),
          result.neighborhood_explanations->all_complete()};
    }
  }

  const NeighborhoodExplanations* ne =
      result.neighborhood_explanations ? &*result.neighborhood_explanations : nullptr;
  report.sufficient_reasons = score_explanations(srs, ne);
  report.counterfactuals = score_explanations(cfs, ne);
  report.feature_scores_sr = score_features(result.model.num_features(), srs, ne);
  report.feature_scores_cf = score_features(result.model.num_features(), cfs, ne);
  report.timings_ms["total"] = total.ms();
  return result;
}

/// The encode-only pipeline: identical to explain through training and
/// compilation, stopping before enumeration.
inline PipelineResult run_encode(const RunConfig& cfg) { return prepare_encoding(cfg); }

}  // namespace satexpl
