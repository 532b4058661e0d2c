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

#include <random>
#include <set>
#include <vector>

#include "satexpl/errors.hpp"
#include "satexpl/instance.hpp"

namespace satexpl {

/// Samples the vicinity of `x` within Hamming radius `radius`.
///
/// Dataset mode (`dataset` non-null): the members are exactly the dataset
/// rows within the radius, deduplicated as feature vectors, with x itself
/// first. If nothing besides x is found, perturbation sampling kicks in when
/// `perturb_count` > 0 and otherwise EmptyNeighborhood is thrown.
///
/// Perturbation mode (`dataset` null): `perturb_count` distinct perturbed
/// instances plus x, each obtained by flipping k features with k drawn
/// uniformly from 1..radius and the flipped subset uniform among k-subsets.
/// Deterministic for a fixed seed.
inline NeighborhoodSet sample_neighborhood(const Instance& x, int radius,
                                           const Dataset* dataset, int perturb_count,
                                           std::uint64_t seed) {
  if (radius < 0) throw ConfigError("radius must be >= 0");
  NeighborhoodSet ns;
  ns.center = x;
  ns.radius = radius;
  ns.members.push_back(x);
  if (radius == 0) return ns;

  std::set<std::vector<std::uint8_t>> known{x.values};
  if (dataset) {
    for (const Instance& row : dataset->rows) {
      if (hamming(x, row) > radius) continue;
      if (!known.insert(row.values).second) continue;
      Instance member = row;
      member.label.reset();  // labels come from the oracle, not the file
      ns.members.push_back(std::move(member));
    }
    if (ns.members.size() > 1) return ns;
    if (perturb_count <= 0) {
      throw EmptyNeighborhood("no dataset row within radius " + std::to_string(radius) +
                              " and perturbation sampling disabled");
    }
  }
  if (perturb_count < 1) throw ConfigError("perturbation sampling needs a positive count");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> flip_count(1, radius);
  std::vector<int> positions(x.values.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);

  // The radius-r ball around x may hold fewer than perturb_count distinct
  // points; a draw cap keeps termination guaranteed without counting the
  // ball exactly.
  const long long max_draws = 64LL * perturb_count + 1024;
  long long draws = 0;
  int found = 0;
  while (found < perturb_count && draws < max_draws) {
    ++draws;
    const int k = std::min(flip_count(rng), x.arity());
    // partial Fisher-Yates for a uniform k-subset
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> rest(i, static_cast<int>(positions.size()) - 1);
      std::swap(positions[static_cast<std::size_t>(i)],
                positions[static_cast<std::size_t>(rest(rng))]);
    }
    Instance member;
    member.values = x.values;
    for (int i = 0; i < k; ++i) {
      member.values[static_cast<std::size_t>(positions[static_cast<std::size_t>(i)])] ^= 1u;
    }
    if (!known.insert(member.values).second) continue;
    ns.members.push_back(std::move(member));
    ++found;
  }
  return ns;
}

}  // namespace satexpl
