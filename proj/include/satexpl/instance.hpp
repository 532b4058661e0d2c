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
#include <optional>
#include <string>
#include <vector>

#include "satexpl/errors.hpp"

namespace satexpl {

/// A binary feature vector, optionally carrying a class label.
struct Instance {
  std::vector<std::uint8_t> values;
  std::optional<int> label;

  int arity() const { return static_cast<int>(values.size()); }

  bool same_values(const Instance& other) const { return values == other.values; }
};

/// Number of differing feature values between two instances of equal arity.
inline int hamming(const Instance& a, const Instance& b) {
  if (a.values.size() != b.values.size()) {
    throw ArityMismatch("hamming: arity " + std::to_string(a.values.size()) + " vs " +
                        std::to_string(b.values.size()));
  }
  int dist = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dist += a.values[i] != b.values[i];
  }
  return dist;
}

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Instance> rows;

  int num_features() const { return static_cast<int>(feature_names.size()); }
};

/// The sampled vicinity of an instance. The center is always members[0];
/// every member lies within the Hamming radius and members are pairwise
/// distinct as feature vectors.
struct NeighborhoodSet {
  Instance center;
  int radius = 0;
  std::vector<Instance> members;

  bool labeled() const {
    for (const Instance& m : members) {
      if (!m.label) return false;
    }
    return true;
  }
};

}  // namespace satexpl
