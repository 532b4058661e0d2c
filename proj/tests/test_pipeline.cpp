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

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "satexpl/pgm.hpp"
#include "satexpl/pipeline.hpp"
#include "satexpl/report.hpp"
#include "support/fixtures.hpp"

using namespace satexpl;

namespace {

const std::string kVoteForest = std::string(TEST_FIXTURE_DIR) + "/vote_forest.json";
const std::string kVoteInstance = "1,1,1,0,0,0,1,1,1,0,0,0,0,1,0,1";

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("satexpl_test_" + name);
}

// 22-feature synthetic table labeled by a hidden Boolean function, exercising
// the dataset + precomputed-labels path. Returns the CSV path and the index
// of the first negatively labeled row.
std::pair<std::string, int> write_synthetic_csv(int rows, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::string csv;
  for (int f = 1; f <= 22; ++f) csv += "f" + std::to_string(f) + ",";
  csv += "label\n";
  int first_negative = -1;
  for (int r = 0; r < rows; ++r) {
    std::vector<int> v;
    for (int f = 0; f < 22; ++f) v.push_back(static_cast<int>(rng() & 1u));
    const int label = (v[2] && !v[6]) || (v[11] && v[19]) ? 1 : 0;
    if (label == 0 && first_negative < 0) first_negative = r;
    for (int f = 0; f < 22; ++f) csv += std::to_string(v[f]) + ",";
    csv += std::to_string(label) + "\n";
  }
  const auto path = temp_file("synthetic_" + std::to_string(seed) + ".csv");
  std::ofstream out(path);
  out << csv;
  return {path.string(), first_negative};
}

std::set<std::set<std::string>> explanation_name_sets(const nlohmann::json& section,
                                                      const nlohmann::json& report) {
  std::set<std::set<std::string>> out;
  for (const auto& e : report.at(section).at("explanations")) {
    std::set<std::string> items;
    for (const auto& item : e.at("items")) {
      items.insert(item.at("feature").get<std::string>());
    }
    out.insert(std::move(items));
  }
  return out;
}

}  // namespace

TEST_CASE("explain on the vote fixture reproduces the walkthrough", "[pipeline][golden]") {
  RunConfig cfg;
  cfg.forest_file = kVoteForest;
  cfg.instance_spec = kVoteInstance;
  cfg.samples = 0;  // no neighborhood: base scores only
  const PipelineResult result = run_explain(cfg);
  const nlohmann::json j = report_to_json(result.report);

  CHECK(j.at("prediction") == 0);
  CHECK(explanation_name_sets("sufficient_reasons", j) ==
        std::set<std::set<std::string>>{
            {"X4", "X5"}, {"X12", "X5"}, {"X4", "X12", "X9"}});
  CHECK(explanation_name_sets("counterfactuals", j) ==
        std::set<std::set<std::string>>{
            {"X4", "X12"}, {"X5", "X12"}, {"X5", "X9"}, {"X4", "X5"}});
  for (const auto& e : j.at("sufficient_reasons").at("explanations")) {
    CHECK(e.at("scores").at("responsibility").get<double>() == Catch::Approx(1.0 / 3.0));
  }
  for (const auto& e : j.at("counterfactuals").at("explanations")) {
    CHECK(e.at("scores").at("responsibility").get<double>() == Catch::Approx(0.25));
    CHECK(e.at("scores").at("generality").is_null());
  }
  CHECK(j.at("fidelity").is_null());
  CHECK(j.at("neighborhood").is_null());
}

TEST_CASE("explain notes instances already of the asserted class", "[pipeline]") {
  RunConfig cfg;
  cfg.forest_file = kVoteForest;
  cfg.instance_spec = "1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1";  // predicted positive
  cfg.samples = 0;
  const PipelineResult result = run_explain(cfg);
  CHECK(result.report.prediction == 1);
  CHECK(result.report.sufficient_reasons.empty());
  CHECK(result.report.counterfactuals.empty());
  CHECK(result.report.note ==
        "instance already predicted positive; zero explanations of kind SR/CF");

  // the same instance under positive polarity has explanations
  cfg.polarity = Polarity::kExplainPositive;
  const PipelineResult positive = run_explain(cfg);
  CHECK(positive.report.note.empty());
  CHECK_FALSE(positive.report.sufficient_reasons.empty());
  CHECK_FALSE(positive.report.counterfactuals.empty());
}

TEST_CASE("full trained pipeline over the synthetic table", "[pipeline][trained]") {
  const auto [csv, negative_row] = write_synthetic_csv(200, 93);
  REQUIRE(negative_row >= 0);
  RunConfig cfg;
  cfg.data_path = csv;
  cfg.labels_column = "label";
  cfg.instance_spec = std::to_string(negative_row);
  cfg.seed = 11;
  cfg.neighbor_cap = 4;
  const PipelineResult result = run_explain(cfg);
  const ExplanationReport& report = result.report;

  REQUIRE(report.fidelity.has_value());
  CHECK(*report.fidelity >= 0.9);
  CHECK(report.prediction == 0);
  CHECK(report.forest_trees == 10);
  CHECK(report.forest_threshold == 6);
  REQUIRE_FALSE(report.counterfactuals.empty());
  REQUIRE_FALSE(report.sufficient_reasons.empty());
  CHECK(report.sr_complete);
  CHECK(report.cf_complete);

  // neighborhood scoring ran under the cap; x is one of the 200 rows
  REQUIRE(report.neighborhood.has_value());
  CHECK(report.neighborhood->scored <= 4);
  CHECK(report.neighborhood->scored >= 1);
  CHECK(report.neighborhood->total_members == 200);
  REQUIRE(result.neighborhood_explanations.has_value());
  for (const ScoredExplanation& s : report.counterfactuals) {
    REQUIRE(s.generality.has_value());
    CHECK(*s.generality > 0.0);  // x is in its own extent
    REQUIRE(s.neighborhood_responsibility.has_value());
    CHECK(*s.neighborhood_responsibility >= s.responsibility - 1e-12);
  }

  // every reported explanation set is consistent with the surrogate: applying
  // a counterfactual flip inverts the prediction
  for (const ScoredExplanation& s : report.counterfactuals) {
    Instance flipped = report.instance;
    for (const auto& [feature, value] : s.explanation.items) {
      flipped.values[static_cast<std::size_t>(feature)] ^= 1u;
    }
    CHECK(result.forest.predict(flipped) == 1);
  }
}

TEST_CASE("explain is deterministic for a fixed seed", "[pipeline][determinism]") {
  const auto [csv, negative_row] = write_synthetic_csv(120, 5);
  RunConfig cfg;
  cfg.data_path = csv;
  cfg.labels_column = "label";
  cfg.instance_spec = std::to_string(negative_row);
  cfg.seed = 77;
  cfg.neighbor_cap = 3;
  cfg.jobs = 4;
  const nlohmann::json a = report_body(report_to_json(run_explain(cfg).report));
  const nlohmann::json b = report_body(report_to_json(run_explain(cfg).report));
  REQUIRE(a.dump() == b.dump());

  cfg.seed = 78;
  const nlohmann::json c = report_body(report_to_json(run_explain(cfg).report));
  CHECK(a.dump() != c.dump());
}

TEST_CASE("config errors surface early", "[pipeline]") {
  RunConfig cfg;
  cfg.instance_spec = "1,0";
  CHECK_THROWS_AS(run_explain(cfg), ConfigError);  // neither forest nor oracle

  cfg.forest_file = kVoteForest;
  CHECK_THROWS_AS(run_explain(cfg), ConfigError);  // arity mismatch vs forest

  RunConfig row_cfg;
  row_cfg.forest_file = kVoteForest;
  row_cfg.instance_spec = "0";  // row index without a dataset
  CHECK_THROWS_AS(run_explain(row_cfg), ConfigError);

  RunConfig missing;
  missing.data_path = "/nonexistent/no-such-file.csv";
  missing.instance_spec = "0";
  CHECK_THROWS_AS(run_explain(missing), IoError);
}

TEST_CASE("neighborhood cache round trips", "[pipeline][report]") {
  const auto [csv, negative_row] = write_synthetic_csv(80, 8);
  RunConfig cfg;
  cfg.data_path = csv;
  cfg.labels_column = "label";
  cfg.instance_spec = std::to_string(negative_row);
  cfg.seed = 3;
  cfg.neighbor_cap = 3;
  const PipelineResult result = run_explain(cfg);
  REQUIRE(result.neighborhood_explanations.has_value());
  const auto& ne = *result.neighborhood_explanations;

  const nlohmann::json cache = neighborhood_cache_to_json(ne);
  const NeighborhoodExplanations back = neighborhood_cache_from_json(cache);
  REQUIRE(back.scored.size() == ne.scored.size());
  CHECK(back.total_members == ne.total_members);
  for (std::size_t i = 0; i < ne.scored.size(); ++i) {
    CHECK(back.scored[i].v.values == ne.scored[i].v.values);
    CHECK(back.scored[i].counterfactuals.explanations ==
          ne.scored[i].counterfactuals.explanations);
    CHECK(back.scored[i].sufficient_reasons.explanations ==
          ne.scored[i].sufficient_reasons.explanations);
  }

  // scores recomputed from the cache agree with the pipeline's
  ExplanationSet cfs;
  cfs.kind = ExplanationKind::kCounterfactual;
  cfs.instance = result.report.instance;
  for (const ScoredExplanation& s : result.report.counterfactuals) {
    cfs.explanations.push_back(s.explanation);
  }
  const auto rescored = score_explanations(cfs, &back);
  REQUIRE(rescored.size() == result.report.counterfactuals.size());
  for (std::size_t i = 0; i < rescored.size(); ++i) {
    CHECK(*rescored[i].generality ==
          Catch::Approx(*result.report.counterfactuals[i].generality));
  }
}

TEST_CASE("heatmap normalization, uniform and single-spike cases", "[pipeline][pgm]") {
  // all-equal scores render uniformly white
  std::vector<double> equal(9, 0.4);
  const std::string uniform = heatmap_pgm(equal, 3, 3);
  REQUIRE(uniform.substr(0, 3) == "P5\n");
  const std::string pixels = uniform.substr(uniform.find("255\n") + 4);
  REQUIRE(pixels.size() == 9);
  for (char p : pixels) CHECK(static_cast<unsigned char>(p) == 255);

  // a single nonzero score renders one white pixel on black
  std::vector<double> spike(16, 0.0);
  spike[5] = 0.7;
  const std::string one = heatmap_pgm(spike, 4, 4);
  const std::string body = one.substr(one.find("255\n") + 4);
  for (std::size_t i = 0; i < body.size(); ++i) {
    CHECK(static_cast<unsigned char>(body[i]) == (i == 5 ? 255 : 0));
  }

  // 28x28 layout for 784 features
  std::vector<double> mnist(784, 0.5);
  const std::string big = heatmap_pgm(mnist, 28, 28);
  CHECK(big.size() == std::string("P5\n28 28\n255\n").size() + 784);

  CHECK_THROWS_AS(heatmap_pgm(mnist, 28, 27), DimensionMismatch);
}

TEST_CASE("atomic writes leave no partial files", "[pipeline][report]") {
  const auto target = temp_file("atomic.txt");
  std::filesystem::remove(target);
  write_file_atomic(target.string(), "payload");
  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "payload");
  // no temp files left behind
  int leftovers = 0;
  for (const auto& entry : std::filesystem::directory_iterator(target.parent_path())) {
    if (entry.path().filename().string().find("atomic.txt.tmp") != std::string::npos) {
      ++leftovers;
    }
  }
  CHECK(leftovers == 0);
  std::filesystem::remove(target);

  CHECK_THROWS_AS(write_file_atomic("/dev/null/sub/y.txt", "data"), IoError);
}
