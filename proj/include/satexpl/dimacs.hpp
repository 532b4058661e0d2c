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

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "satexpl/cnf.hpp"
#include "satexpl/errors.hpp"
#include "satexpl/pmaxsat.hpp"

// DIMACS CNF / WCNF text formats. LF line endings, space-separated tokens,
// terminating 0 per clause. WCNF hard clauses carry weight TOP, soft clauses
// weight 1, with TOP = (#soft) + 1.

namespace satexpl {

inline std::string write_dimacs(const Cnf& cnf) {
  std::string out = "p cnf " + std::to_string(cnf.num_vars()) + " " +
                    std::to_string(cnf.num_clauses()) + "\n";
  for (const Clause& c : cnf.clauses()) {
    for (const Literal& l : c.literals()) {
      out += std::to_string(to_dimacs(l));
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

namespace detail {

struct DimacsTokens {
  std::vector<std::vector<long long>> lines;  // tokenized non-comment lines
  std::vector<std::size_t> line_numbers;      // 1-based source line of each
  std::string format;                         // "cnf" or "wcnf"
  long long num_vars = 0;
  long long num_clauses = 0;
  long long top = 0;  // wcnf only
};

inline DimacsTokens tokenize_dimacs(const std::string& text, const std::string& expect_format) {
  DimacsTokens result;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank line
    if (first == "c") continue;    // comment
    if (first == "p") {
      if (have_header) throw ParseError("duplicate header", line_no);
      if (!(ls >> result.format) || result.format != expect_format) {
        throw ParseError("expected \"p " + expect_format + "\" header", line_no);
      }
      if (!(ls >> result.num_vars >> result.num_clauses)) {
        throw ParseError("malformed header", line_no);
      }
      if (expect_format == "wcnf" && !(ls >> result.top)) {
        throw ParseError("missing TOP in wcnf header", line_no);
      }
      std::string extra;
      if (ls >> extra) throw ParseError("trailing tokens after header", line_no);
      if (result.num_vars < 0 || result.num_clauses < 0) {
        throw ParseError("negative counts in header", line_no);
      }
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError("clause before header", line_no);
    std::vector<long long> tokens;
    ls.clear();
    ls.str(line);
    long long value = 0;
    while (ls >> value) tokens.push_back(value);
    if (!ls.eof()) throw ParseError("non-integer token", line_no);
    if (tokens.empty() || tokens.back() != 0) {
      throw ParseError("clause not terminated by 0", line_no);
    }
    tokens.pop_back();
    for (long long t : tokens) {
      if (t == 0) throw ParseError("embedded 0 inside clause", line_no);
    }
    result.lines.push_back(std::move(tokens));
    result.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError("missing header", line_no == 0 ? 1 : line_no);
  if (static_cast<long long>(result.lines.size()) != result.num_clauses) {
    throw ParseError("clause count " + std::to_string(result.lines.size()) +
                         " does not match header " + std::to_string(result.num_clauses),
                     line_no == 0 ? 1 : line_no);
  }
  return result;
}

inline std::vector<Literal> to_literals(const std::vector<long long>& codes,
                                        long long num_vars, std::size_t line_no) {
  std::vector<Literal> lits;
  lits.reserve(codes.size());
  for (long long code : codes) {
    const long long v = code < 0 ? -code : code;
    if (v > num_vars) {
      throw ParseError("variable " + std::to_string(v) + " exceeds header count", line_no);
    }
    lits.push_back(from_dimacs(static_cast<int>(code)));
  }
  return lits;
}

}  // namespace detail

/// Parses "p cnf V C" text. Throws ParseError (with line number) on malformed
/// input. Round-trips with write_dimacs modulo literal order.
inline Cnf read_dimacs(const std::string& text) {
  const auto tokens = detail::tokenize_dimacs(text, "cnf");
  Cnf cnf(static_cast<int>(tokens.num_vars));
  for (std::size_t i = 0; i < tokens.lines.size(); ++i) {
    cnf.add_clause(detail::to_literals(tokens.lines[i], tokens.num_vars, tokens.line_numbers[i]));
  }
  return cnf;
}

/// DIMACS WCNF export: "p wcnf V C TOP", hard clauses first with weight TOP,
/// then soft clauses with weight 1. TOP = (#soft) + 1, so no set of soft
/// clauses can outweigh a hard one.
inline std::string write_wcnf(const PartialMaxSatInstance& p) {
  const long long top = static_cast<long long>(p.soft.size()) + 1;
  const std::size_t num_clauses = p.hard.num_clauses() + p.soft.size();
  std::string out = "p wcnf " + std::to_string(p.num_vars()) + " " +
                    std::to_string(num_clauses) + " " + std::to_string(top) + "\n";
  auto append = [&out](long long weight, const Clause& c) {
    out += std::to_string(weight);
    for (const Literal& l : c.literals()) {
      out += ' ';
      out += std::to_string(to_dimacs(l));
    }
    out += " 0\n";
  };
  for (const Clause& c : p.hard.clauses()) append(top, c);
  for (const SoftClause& s : p.soft) append(1, s.clause);
  return out;
}

/// Parses WCNF text back into an instance. Clauses with weight == TOP are
/// hard, all others soft. Feature metadata is not recoverable from WCNF.
inline PartialMaxSatInstance read_wcnf(const std::string& text) {
  const auto tokens = detail::tokenize_dimacs(text, "wcnf");
  PartialMaxSatInstance p;
  p.hard.ensure_num_vars(static_cast<int>(tokens.num_vars));
  for (std::size_t i = 0; i < tokens.lines.size(); ++i) {
    const auto& line = tokens.lines[i];
    if (line.empty()) throw ParseError("missing weight", tokens.line_numbers[i]);
    const long long weight = line.front();
    if (weight <= 0) throw ParseError("non-positive weight", tokens.line_numbers[i]);
    std::vector<long long> codes(line.begin() + 1, line.end());
    auto lits = detail::to_literals(codes, tokens.num_vars, tokens.line_numbers[i]);
    if (weight == tokens.top) {
      p.hard.add_clause(std::move(lits));
    } else {
      auto clause = Clause::normalized(std::move(lits));
      if (clause) p.soft.push_back(SoftClause{std::move(*clause), -1, -1});
    }
  }
  p.hard.ensure_num_vars(static_cast<int>(tokens.num_vars));
  return p;
}

}  // namespace satexpl
