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

#include <vector>

#include "satexpl/cnf.hpp"

namespace satexpl {

/// A soft clause plus the (feature, value) pair it encodes. feature is a
/// 0-based feature index, or -1 for soft clauses without feature metadata
/// (e.g. instances loaded back from a WCNF file).
struct SoftClause {
  Clause clause;
  int feature = -1;
  int value = -1;

  friend bool operator==(const SoftClause&, const SoftClause&) = default;
};

/// Hard clauses (the classifier encoding) plus relaxable soft unit clauses
/// (the instance encoding). Soft clause order follows feature index.
struct PartialMaxSatInstance {
  Cnf hard;
  std::vector<SoftClause> soft;

  int num_vars() const {
    int n = hard.num_vars();
    for (const SoftClause& s : soft) {
      for (const Literal& l : s.clause.literals()) n = std::max(n, l.var.index);
    }
    return n;
  }
};

}  // namespace satexpl
