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

#include <cmath>
#include <fstream>
#include <span>
#include <string>

#include "satexpl/errors.hpp"

namespace satexpl {

/// Renders a per-feature score vector as a binary PGM (P5, maxval 255)
/// grayscale image, row-major by feature index, normalized by the maximum
/// score: pixel = round(255 * score / max). An all-zero vector renders black.
inline std::string heatmap_pgm(std::span<const double> scores, int width, int height) {
  if (width < 1 || height < 1 ||
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != scores.size()) {
    throw DimensionMismatch("grid " + std::to_string(width) + "x" + std::to_string(height) +
                            " does not cover " + std::to_string(scores.size()) + " features");
  }
  double max_score = 0.0;
  for (double s : scores) max_score = std::max(max_score, s);
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + scores.size());
  for (double s : scores) {
    const double normalized = max_score > 0.0 ? s / max_score : 0.0;
    out.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(255.0 * normalized))));
  }
  return out;
}

inline void emit_heatmap(std::span<const double> scores, int width, int height,
                         const std::string& path) {
  const std::string pgm = heatmap_pgm(scores, width, height);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out.write(pgm.data(), static_cast<std::streamsize>(pgm.size()));
  if (!out) throw IoError("short write to \"" + path + "\"");
}

}  // namespace satexpl
