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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "satexpl/csv.hpp"
#include "satexpl/instance.hpp"
#include "satexpl/oracle.hpp"
#include "satexpl/sampling.hpp"
#include "support/random_gen.hpp"

using namespace satexpl;

namespace {

Instance make_instance(std::vector<std::uint8_t> values) {
  Instance x;
  x.values = std::move(values);
  return x;
}

Dataset random_dataset(testgen::Rng& rng, int n, int rows) {
  Dataset d;
  for (int i = 1; i <= n; ++i) d.feature_names.push_back("f" + std::to_string(i));
  for (int r = 0; r < rows; ++r) {
    Instance row;
    for (int i = 0; i < n; ++i) {
      row.values.push_back(static_cast<std::uint8_t>(testgen::pick(rng, 0, 1)));
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

}  // namespace

TEST_CASE("hamming distance basics", "[data]") {
  const Instance a = make_instance({1, 0, 1, 1});
  const Instance b = make_instance({0, 0, 1, 0});
  CHECK(hamming(a, a) == 0);
  CHECK(hamming(a, b) == 2);
  CHECK(hamming(a, b) == hamming(b, a));
  CHECK_THROWS_AS(hamming(a, make_instance({1, 0})), ArityMismatch);
}

TEST_CASE("csv parsing of a toy file", "[data][csv]") {
  const Dataset d = parse_csv("a,b\n0,1\n1,1\n");
  REQUIRE(d.feature_names == std::vector<std::string>{"a", "b"});
  REQUIRE(d.rows.size() == 2);
  CHECK(d.rows[0].values == std::vector<std::uint8_t>{0, 1});
  CHECK_FALSE(d.rows[0].label.has_value());
}

TEST_CASE("csv label column is split out", "[data][csv]") {
  const Dataset d = parse_csv("a,y,b\n0,1,1\n1,0,0\n", "y");
  REQUIRE(d.feature_names == std::vector<std::string>{"a", "b"});
  REQUIRE(d.rows[0].label == 1);
  REQUIRE(d.rows[1].label == 0);
  CHECK(d.rows[0].values == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("csv rejects non-binary values with coordinates", "[data][csv]") {
  try {
    parse_csv("a,b\n0,1\n0,2\n");
    FAIL("expected NonBinaryValue");
  } catch (const NonBinaryValue& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 2);
  }
  CHECK_THROWS_AS(parse_csv("a,b\n0\n"), ParseError);       // field count
  CHECK_THROWS_AS(parse_csv(""), ParseError);               // no header
  CHECK_THROWS_AS(parse_csv("a,b\n0,1\n", "nope"), ParseError);  // missing label col
}

TEST_CASE("zero radius keeps only the center", "[data][sampling]") {
  const Instance x = make_instance({1, 0, 1});
  const NeighborhoodSet ns = sample_neighborhood(x, 0, nullptr, 50, 1);
  REQUIRE(ns.members.size() == 1);
  CHECK(ns.members.front().same_values(x));
}

TEST_CASE("dataset-mode membership equals a brute-force Hamming filter", "[data][sampling]") {
  testgen::Rng rng(17);
  for (int round = 0; round < 20; ++round) {
    const int n = testgen::pick(rng, 2, 8);
    const Dataset d = random_dataset(rng, n, testgen::pick(rng, 1, 40));
    Instance x;
    for (int i = 0; i < n; ++i) x.values.push_back(static_cast<std::uint8_t>(testgen::pick(rng, 0, 1)));
    const int radius = testgen::pick(rng, 1, n);

    std::set<std::vector<std::uint8_t>> expected{x.values};
    for (const Instance& row : d.rows) {
      if (hamming(x, row) <= radius) expected.insert(row.values);
    }
    if (expected.size() == 1) continue;  // only x: fallback would kick in
    const NeighborhoodSet ns = sample_neighborhood(x, radius, &d, 0, 7);
    std::set<std::vector<std::uint8_t>> got;
    for (const Instance& m : ns.members) got.insert(m.values);
    REQUIRE(got == expected);
    REQUIRE(ns.members.front().same_values(x));
  }
}

TEST_CASE("empty dataset neighborhood without perturbation budget throws", "[data][sampling]") {
  Dataset d;
  d.feature_names = {"a", "b", "c", "d", "e", "f"};
  d.rows.push_back(make_instance({1, 1, 1, 1, 1, 1}));
  const Instance x = make_instance({0, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(sample_neighborhood(x, 1, &d, 0, 3), EmptyNeighborhood);
  // with a budget the sampler falls back to perturbation
  const NeighborhoodSet ns = sample_neighborhood(x, 1, &d, 5, 3);
  CHECK(ns.members.size() == 6);
}

TEST_CASE("perturbation sampling is distinct, in-radius, deterministic", "[data][sampling]") {
  const Instance x = make_instance({0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
  const int radius = 3;
  const NeighborhoodSet ns = sample_neighborhood(x, radius, nullptr, 40, 99);
  REQUIRE(ns.members.size() == 41);  // 40 perturbed plus x
  std::set<std::vector<std::uint8_t>> seen;
  for (const Instance& m : ns.members) {
    CHECK(hamming(x, m) <= radius);
    CHECK(seen.insert(m.values).second);
  }
  const NeighborhoodSet again = sample_neighborhood(x, radius, nullptr, 40, 99);
  for (std::size_t i = 0; i < ns.members.size(); ++i) {
    REQUIRE(again.members[i].values == ns.members[i].values);
  }
  const NeighborhoodSet other = sample_neighborhood(x, radius, nullptr, 40, 100);
  bool any_difference = false;
  for (std::size_t i = 0; i < ns.members.size(); ++i) {
    any_difference = any_difference || other.members[i].values != ns.members[i].values;
  }
  CHECK(any_difference);
}

TEST_CASE("small Hamming balls cap the perturbation count", "[data][sampling]") {
  const Instance x = make_instance({0, 0});
  const NeighborhoodSet ns = sample_neighborhood(x, 1, nullptr, 50, 5);
  CHECK(ns.members.size() == 3);  // x plus its two radius-1 flips
}

TEST_CASE("function oracle labels and validates", "[data][oracle]") {
  FunctionOracle parity([](const Instance& x) {
    int sum = 0;
    for (auto v : x.values) sum += v;
    return sum % 2;
  });
  NeighborhoodSet ns;
  ns.center = make_instance({1, 1, 0});
  ns.members = {make_instance({1, 1, 0}), make_instance({1, 0, 0})};
  const NeighborhoodSet labeled = label(ns, parity);
  REQUIRE(labeled.labeled());
  CHECK(*labeled.members[0].label == 0);
  CHECK(*labeled.members[1].label == 1);
  CHECK(*labeled.center.label == 0);

  FunctionOracle broken([](const Instance&) { return 7; });
  CHECK_THROWS_AS(label(ns, broken), OracleProtocolError);
}

TEST_CASE("precomputed oracle copies labels and rejects unknown rows", "[data][oracle]") {
  Dataset d = parse_csv("a,b,y\n0,0,0\n0,1,1\n1,0,1\n", "y");
  PrecomputedOracle oracle(d);
  std::vector<Instance> batch{make_instance({0, 1}), make_instance({0, 0})};
  CHECK(oracle.labels(batch) == std::vector<int>{1, 0});
  std::vector<Instance> unknown{make_instance({1, 1})};
  CHECK_THROWS_AS(oracle.labels(unknown), OracleProtocolError);

  Dataset unlabeled = parse_csv("a,b\n0,0\n");
  CHECK_THROWS_AS(PrecomputedOracle{unlabeled}, ConfigError);
}

TEST_CASE("subprocess oracle: constant answers over the line protocol", "[data][oracle]") {
  SubprocessOracle zeros("while read line; do echo 0; done");
  std::vector<Instance> batch{make_instance({1, 0}), make_instance({0, 1}),
                              make_instance({1, 1})};
  CHECK(zeros.labels(batch) == std::vector<int>{0, 0, 0});

  // the child sees comma-separated values: echo back the first field
  SubprocessOracle first_feature("cut -d, -f1");
  CHECK(first_feature.labels(batch) == std::vector<int>{1, 0, 1});
}

TEST_CASE("subprocess oracle failures raise distinct errors", "[data][oracle]") {
  std::vector<Instance> batch{make_instance({1, 0}), make_instance({0, 1})};

  SubprocessOracle short_output("head -n 1 | sed 's/.*/0/'");
  CHECK_THROWS_AS(short_output.labels(batch), OracleProtocolError);

  SubprocessOracle garbage("while read line; do echo maybe; done");
  CHECK_THROWS_AS(garbage.labels(batch), OracleProtocolError);

  SubprocessOracle failing("exit 3");
  CHECK_THROWS_AS(failing.labels(batch), OracleExit);
}

TEST_CASE("subprocess batching respects batch_size", "[data][oracle]") {
  const auto marker = std::filesystem::temp_directory_path() /
                      ("satexpl_oracle_batches_" + std::to_string(::getpid()));
  std::filesystem::remove(marker);
  SubprocessOracle oracle("echo run >> " + marker.string() + "; while read l; do echo 0; done",
                          /*batch_size=*/2);
  std::vector<Instance> batch(5, make_instance({1}));
  CHECK(oracle.labels(batch).size() == 5);
  std::ifstream in(marker);
  int runs = 0;
  std::string line;
  while (std::getline(in, line)) ++runs;
  CHECK(runs == 3);  // ceil(5 / 2) invocations
  std::filesystem::remove(marker);
}
