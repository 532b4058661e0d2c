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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace satexpl {

/// Base class for all library errors. The CLI maps subclasses to exit codes:
/// ConfigError -> 1, IoError -> 2, OracleError -> 3, SolverError -> 4.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input (DIMACS, CSV, JSON). Carries 1-based coordinates
/// where they are known; 0 means "not applicable".
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
      : IoError(what + " (line " + std::to_string(line) +
                (column ? ", column " + std::to_string(column) : "") + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class NonBinaryValue : public ParseError {
 public:
  NonBinaryValue(const std::string& value, std::size_t line, std::size_t column)
      : ParseError("non-binary value \"" + value + "\"", line, column) {}
};

class OracleError : public Error {
 public:
  using Error::Error;
};

/// The oracle subprocess violated the line protocol (wrong count, bad token).
class OracleProtocolError : public OracleError {
 public:
  using OracleError::OracleError;
};

/// The oracle subprocess exited with a nonzero status.
class OracleExit : public OracleError {
 public:
  using OracleError::OracleError;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

/// The hard clauses alone are unsatisfiable: the encoded classifier never
/// predicts the asserted class, so explanations are undefined.
class HardUnsat : public SolverError {
 public:
  using SolverError::SolverError;
};

class MissingAssignment : public Error {
 public:
  using Error::Error;
};

class InvalidThreshold : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyData : public Error {
 public:
  using Error::Error;
};

class EmptyNeighborhood : public Error {
 public:
  using Error::Error;
};

class UnknownKey : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NoOccurrence : public Error {
 public:
  using Error::Error;
};

}  // namespace satexpl
