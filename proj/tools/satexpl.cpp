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

// satexpl: explain individual predictions of a black-box binary classifier
// with sufficient reasons and counterfactuals computed over a local
// random-forest surrogate compiled to CNF, plus relevance scores.
//
// Exit codes: 0 success, 1 configuration, 2 I/O, 3 oracle, 4 solver/timeout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "satexpl/dimacs.hpp"
#include "satexpl/pgm.hpp"
#include "satexpl/pipeline.hpp"
#include "satexpl/report.hpp"

namespace {

using namespace satexpl;

std::string out_stem(const std::string& path) {
  const std::string suffix = ".json";
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

std::pair<int, int> parse_grid(const std::string& spec) {
  const auto x = spec.find('x');
  if (x == std::string::npos) throw ConfigError("--grid expects WIDTHxHEIGHT, e.g. 28x28");
  try {
    const int w = std::stoi(spec.substr(0, x));
    const int h = std::stoi(spec.substr(x + 1));
    if (w < 1 || h < 1) throw ConfigError("--grid dimensions must be positive");
    return {w, h};
  } catch (const std::invalid_argument&) {
    throw ConfigError("--grid expects WIDTHxHEIGHT, e.g. 28x28");
  }
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& polarity,
                        std::string& grid) {
  cmd->add_option("--data", cfg.data_path, "dataset CSV (header row, 0/1 body)");
  cmd->add_option("--labels-col", cfg.labels_column,
                  "dataset column holding black-box labels (precomputed oracle)");
  cmd->add_option("--oracle-cmd", cfg.oracle_command,
                  "shell command labeling one CSV instance per stdin line with one 0/1 line");
  cmd->add_option("--forest-file", cfg.forest_file,
                  "JSON forest to explain; skips sampling and training");
  cmd->add_option("--instance", cfg.instance_spec,
                  "row index into --data, or inline 0/1 vector like 1,0,1")
      ->required();
  cmd->add_option("--radius", cfg.radius, "Hamming neighborhood radius (-1: feature count)");
  cmd->add_option("--samples", cfg.samples, "perturbation sample budget p");
  cmd->add_option("--trees", cfg.nb_trees, "surrogate forest size");
  cmd->add_option("--depth", cfg.max_depth, "surrogate tree depth limit");
  cmd->add_option("--seed", cfg.seed, "RNG seed for sampling and training");
  cmd->add_option("--polarity", polarity, "which prediction to explain: neg or pos")
      ->check(CLI::IsMember({"neg", "pos"}));
  cmd->add_option("--timeout", cfg.timeout_seconds, "enumeration timeout in seconds");
  cmd->add_option("--max-explanations", cfg.max_explanations,
                  "cap on enumerated explanations per kind");
  cmd->add_option("--neighbor-cap", cfg.neighbor_cap,
                  "neighbors scored for generality (nearest-first; 0 disables)");
  cmd->add_option("--grid", grid, "heatmap dimensions WIDTHxHEIGHT");
  cmd->add_option("--jobs", cfg.jobs, "worker threads for training and neighborhood scoring");
}

void finish_config(RunConfig& cfg, const std::string& polarity, const std::string& grid) {
  cfg.polarity = polarity == "pos" ? Polarity::kExplainPositive : Polarity::kExplainNegative;
  if (!grid.empty()) cfg.grid = parse_grid(grid);
  if (cfg.jobs < 1) cfg.jobs = 1;
}

std::vector<double> feature_score_column(const std::vector<FeatureScoreRow>& rows,
                                         const std::string& which) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const FeatureScoreRow& r : rows) {
    if (which == "involvement") {
      out.push_back(r.involvement);
    } else if (which == "generality") {
      out.push_back(r.generality.value_or(0.0));
    } else {
      out.push_back(r.responsibility.value_or(0.0));
    }
  }
  return out;
}

void write_heatmaps(const ExplanationReport& report, int width, int height,
                    const std::string& stem) {
  const struct {
    const char* name;
    const std::vector<FeatureScoreRow>& rows;
    const char* score;
  } jobs[] = {
      {"fi_sr", report.feature_scores_sr, "involvement"},
      {"fi_cf", report.feature_scores_cf, "involvement"},
      {"fr_sr", report.feature_scores_sr, "responsibility"},
      {"fr_cf", report.feature_scores_cf, "responsibility"},
  };
  for (const auto& job : jobs) {
    const std::vector<double> scores = feature_score_column(job.rows, job.score);
    write_file_atomic(stem + "." + job.name + ".pgm", heatmap_pgm(scores, width, height));
  }
}

void print_summary(const ExplanationReport& report) {
  std::cout << "prediction: " << report.prediction << " (explaining polarity "
            << to_string(report.polarity) << ")\n";
  if (report.fidelity) {
    std::cout << "surrogate fidelity: " << *report.fidelity << "\n";
  }
  if (!report.note.empty()) std::cout << "note: " << report.note << "\n";
  std::cout << "sufficient reasons: " << report.sufficient_reasons.size()
            << (report.sr_complete ? " (complete)" : " (incomplete)") << "\n";
  std::cout << "counterfactuals: " << report.counterfactuals.size()
            << (report.cf_complete ? " (complete)" : " (incomplete)") << "\n";
  auto preview = [&report](const std::vector<ScoredExplanation>& list, const char* label) {
    if (list.empty()) return;
    const auto order = rank(list, "parsimony");
    std::cout << "top " << label << " by parsimony:\n";
    for (std::size_t i = 0; i < order.size() && i < 3; ++i) {
      const ScoredExplanation& s = list[order[i]];
      std::cout << "  ";
      for (std::size_t k = 0; k < s.explanation.items.size(); ++k) {
        const auto& [feature, value] = s.explanation.items[k];
        std::cout << (k ? " AND " : "")
                  << report.feature_names[static_cast<std::size_t>(feature)] << "=" << value;
      }
      std::cout << "  (parsimony " << s.parsimony << ")\n";
    }
  };
  preview(report.sufficient_reasons, "sufficient reasons");
  preview(report.counterfactuals, "counterfactuals");
  const auto total = report.timings_ms.find("total");
  if (total != report.timings_ms.end()) {
    std::cout << "total time: " << total->second << " ms\n";
  }
}

/// Exit 4 is reserved for solver trouble: a wall-clock timeout that truncated
/// enumeration, as opposed to a user-requested --max-explanations cap.
bool truncated_by_timeout(const RunConfig& cfg, const ExplanationReport& report) {
  const bool cf_capped = cfg.max_explanations &&
                         report.counterfactuals.size() >= *cfg.max_explanations;
  if (!report.cf_complete && !cf_capped) return true;
  const bool sr_capped = cfg.max_explanations &&
                         report.sufficient_reasons.size() >= *cfg.max_explanations;
  return !report.sr_complete && !sr_capped;
}

int cmd_explain(const RunConfig& cfg) {
  const PipelineResult result = run_explain(cfg);
  const ExplanationReport& report = result.report;

  if (report.fidelity && *report.fidelity < 0.9) {
    std::cerr << "warning: surrogate fidelity " << *report.fidelity
              << " below 0.9; explanations may not reflect the black box\n";
  }

  const std::string stem = out_stem(cfg.out_path);
  write_file_atomic(cfg.out_path, report_to_json(report).dump(2) + "\n");
  write_file_atomic(stem + ".features.csv", feature_scores_csv(report));
  write_file_atomic(stem + ".explanations.csv", explanation_scores_csv(report));
  if (result.neighborhood_explanations) {
    write_file_atomic(stem + ".neighborhood.json",
                      neighborhood_cache_to_json(*result.neighborhood_explanations).dump(2) + "\n");
  }
  if (cfg.grid) write_heatmaps(report, cfg.grid->first, cfg.grid->second, stem);

  print_summary(report);
  std::cout << "report: " << cfg.out_path << "\n";
  if (truncated_by_timeout(cfg, report)) {
    std::cerr << "error: enumeration timed out before completing\n";
    return 4;
  }
  return 0;
}

int cmd_encode(const RunConfig& cfg) {
  const PipelineResult result = run_encode(cfg);
  write_file_atomic(cfg.out_path + ".cnf", write_dimacs(result.model.cnf));
  write_file_atomic(cfg.out_path + ".wcnf", write_wcnf(result.pmaxsat));
  write_file_atomic(cfg.out_path + ".map.json",
                    var_map_to_json(result.model).dump(2) + "\n");
  std::cout << "clauses: " << result.model.cnf.num_clauses()
            << ", variables: " << result.model.cnf.num_vars()
            << ", soft units: " << result.pmaxsat.soft.size() << "\n";
  std::cout << "wrote " << cfg.out_path << ".cnf, .wcnf, .map.json\n";
  return 0;
}

ExplanationSet explanations_from_report(const nlohmann::json& j, const std::string& section,
                                        ExplanationKind kind,
                                        const std::vector<std::string>& names) {
  ExplanationSet set;
  set.kind = kind;
  set.instance.values = j.at("instance").at("values").get<std::vector<std::uint8_t>>();
  for (const auto& ej : j.at(section).at("explanations")) {
    Explanation e;
    e.kind = kind;
    for (const auto& item : ej.at("items")) {
      const std::string name = item.at("feature").get<std::string>();
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw satexpl::ParseError("unknown feature \"" + name + "\" in report", 0);
      }
      e.items.emplace_back(static_cast<int>(it - names.begin()), item.at("value").get<int>());
    }
    std::sort(e.items.begin(), e.items.end());
    set.explanations.push_back(std::move(e));
  }
  return set;
}

int cmd_score(const std::string& report_path, std::string cache_path,
              const std::string& out_path) {
  std::ifstream in(report_path, std::ios::binary);
  if (!in) throw IoError("cannot open report \"" + report_path + "\"");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw satexpl::ParseError(std::string("report: ") + e.what(), 0);
  }

  ExplanationReport report;
  report.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  report.instance.values = j.at("instance").at("values").get<std::vector<std::uint8_t>>();
  report.polarity =
      j.at("polarity").get<std::string>() == "pos" ? Polarity::kExplainPositive
                                                    : Polarity::kExplainNegative;
  const ExplanationSet srs = explanations_from_report(
      j, "sufficient_reasons", ExplanationKind::kSufficientReason, report.feature_names);
  const ExplanationSet cfs = explanations_from_report(
      j, "counterfactuals", ExplanationKind::kCounterfactual, report.feature_names);
  report.sr_complete = j.at("sufficient_reasons").value("complete", true);
  report.cf_complete = j.at("counterfactuals").value("complete", true);

  if (cache_path.empty()) {
    const std::string candidate = out_stem(report_path) + ".neighborhood.json";
    if (std::ifstream(candidate).good()) cache_path = candidate;
  }
  std::optional<NeighborhoodExplanations> ne;
  if (!cache_path.empty()) {
    std::ifstream cache_in(cache_path, std::ios::binary);
    if (!cache_in) throw IoError("cannot open neighborhood cache \"" + cache_path + "\"");
    nlohmann::json cache_json;
    try {
      cache_in >> cache_json;
    } catch (const nlohmann::json::exception& e) {
      throw satexpl::ParseError(std::string("neighborhood cache: ") + e.what(), 0);
    }
    ne = neighborhood_cache_from_json(cache_json);
  }

  const NeighborhoodExplanations* ne_ptr = ne ? &*ne : nullptr;
  report.sufficient_reasons = score_explanations(srs, ne_ptr);
  report.counterfactuals = score_explanations(cfs, ne_ptr);
  const int n = static_cast<int>(report.feature_names.size());
  report.feature_scores_sr = score_features(n, srs, ne_ptr);
  report.feature_scores_cf = score_features(n, cfs, ne_ptr);

  write_file_atomic(out_path, feature_scores_csv(report));
  write_file_atomic(out_stem(out_path) + ".explanations.csv", explanation_scores_csv(report));
  std::cout << "scored " << report.sufficient_reasons.size() << " SRs and "
            << report.counterfactuals.size() << " CFs over " << n << " features"
            << (ne ? " with neighborhood context" : "") << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_heatmap(const std::string& csv_path, const std::string& grid_spec,
                const std::string& score, const std::string& kind, const std::string& out) {
  const auto [width, height] = parse_grid(grid_spec);
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + csv_path + "\"");
  std::string line;
  if (!std::getline(in, line)) throw satexpl::ParseError("empty scores file", 1);
  const int column = score == "involvement" ? 2 : score == "generality" ? 3 : 4;
  std::vector<double> scores;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 5) throw satexpl::ParseError("expected 5 CSV fields", line_no);
    if (fields[1] != kind) continue;
    const std::string& cell = fields[static_cast<std::size_t>(column)];
    scores.push_back(cell.empty() ? 0.0 : std::stod(cell));
  }
  emit_heatmap(scores, width, height, out);
  std::cout << "wrote " << out << " (" << width << "x" << height << ", " << score << " over "
            << kind << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "SAT-based explanations for black-box binary classifiers: sufficient reasons and\n"
      "counterfactuals over a local random-forest surrogate, with relevance scores."};
  app.require_subcommand(1);

  RunConfig explain_cfg;
  std::string explain_polarity = "neg";
  std::string explain_grid;
  CLI::App* explain = app.add_subcommand("explain", "run the full explanation pipeline");
  add_common_options(explain, explain_cfg, explain_polarity, explain_grid);
  explain_cfg.out_path = "report.json";
  explain->add_option("--out", explain_cfg.out_path, "report path (JSON)");

  RunConfig encode_cfg;
  std::string encode_polarity = "neg";
  std::string encode_grid;
  CLI::App* encode = app.add_subcommand(
      "encode", "compile the surrogate and instance to DIMACS CNF/WCNF plus a variable map");
  add_common_options(encode, encode_cfg, encode_polarity, encode_grid);
  encode_cfg.out_path = "encoded";
  encode->add_option("--out", encode_cfg.out_path, "output path prefix");

  std::string score_report;
  std::string score_cache;
  std::string score_out = "scores.csv";
  CLI::App* score = app.add_subcommand(
      "score", "recompute score tables from a report without re-enumeration");
  score->add_option("report", score_report, "report JSON from a previous explain run")
      ->required();
  score->add_option("--neighborhood-cache", score_cache,
                    "neighborhood explanations JSON (default: report sidecar when present)");
  score->add_option("--out", score_out, "feature score CSV path");

  std::string hm_csv;
  std::string hm_grid;
  std::string hm_score = "involvement";
  std::string hm_kind = "CF";
  std::string hm_out = "heatmap.pgm";
  CLI::App* heatmap = app.add_subcommand("heatmap", "render a feature score CSV as a PGM image");
  heatmap->add_option("scores", hm_csv, "feature score CSV from explain or score")->required();
  heatmap->add_option("--grid", hm_grid, "image dimensions WIDTHxHEIGHT")->required();
  heatmap->add_option("--score", hm_score, "column: involvement, generality, responsibility")
      ->check(CLI::IsMember({"involvement", "generality", "responsibility"}));
  heatmap->add_option("--kind", hm_kind, "explanation kind: SR or CF")
      ->check(CLI::IsMember({"SR", "CF"}));
  heatmap->add_option("--out", hm_out, "output PGM path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // configuration problems exit 1
  }

  try {
    if (app.got_subcommand(explain)) {
      finish_config(explain_cfg, explain_polarity, explain_grid);
      return cmd_explain(explain_cfg);
    }
    if (app.got_subcommand(encode)) {
      finish_config(encode_cfg, encode_polarity, encode_grid);
      return cmd_encode(encode_cfg);
    }
    if (app.got_subcommand(score)) return cmd_score(score_report, score_cache, score_out);
    if (app.got_subcommand(heatmap)) {
      return cmd_heatmap(hm_csv, hm_grid, hm_score, hm_kind, hm_out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const OracleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const satexpl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
