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

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "satexpl/errors.hpp"
#include "satexpl/instance.hpp"

namespace satexpl {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace detail

/// Parses CSV text with a header row of feature names and 0/1 body rows.
/// When `label_column` names a header column, that column becomes the row
/// label instead of a feature. Throws ParseError / NonBinaryValue with
/// 1-based row and column coordinates.
inline Dataset parse_csv(const std::string& text,
                         const std::optional<std::string>& label_column = std::nullopt) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.empty()) throw ParseError("empty header row", 1);

  int label_index = -1;
  Dataset dataset;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (label_column && header[i] == *label_column) {
      if (label_index >= 0) throw ParseError("duplicate label column", 1, i + 1);
      label_index = static_cast<int>(i);
    } else {
      dataset.feature_names.push_back(header[i]);
    }
  }
  if (label_column && label_index < 0) {
    throw ParseError("label column \"" + *label_column + "\" not found in header", 1);
  }
  if (dataset.feature_names.empty()) throw ParseError("no feature columns", 1);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    Instance row;
    row.values.reserve(dataset.feature_names.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string& f = fields[i];
      if (f != "0" && f != "1") throw NonBinaryValue(f, line_no, i + 1);
      const std::uint8_t v = f == "1" ? 1 : 0;
      if (static_cast<int>(i) == label_index) {
        row.label = v;
      } else {
        row.values.push_back(v);
      }
    }
    dataset.rows.push_back(std::move(row));
  }
  return dataset;
}

inline Dataset ingest_csv(const std::string& path,
                          const std::optional<std::string>& label_column = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), label_column);
}

}  // namespace satexpl
