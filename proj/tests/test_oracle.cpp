// Copyright 2026 The cnotforge authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>

#include "cnotforge/oracle.hpp"
#include "cnotforge/sat_encode.hpp"
#include "helpers.hpp"

using namespace cnotforge;
using namespace cnotforge::testing;

TEST_CASE("oracle reproduces the worked-example optima") {
  ExactOracle oracle;
  auto m = example_matrix();
  auto complete4 = CouplingGraph::complete(4);
  auto line4 = CouplingGraph::line(4);

  CHECK(oracle.count(m, Variant::S, complete4) == 3);
  CHECK(oracle.count(m, Variant::W, complete4) == 2);
  CHECK(oracle.count(m, Variant::SR, line4) == 8);
  CHECK(oracle.count(m, Variant::WR, line4) == 5);
  CHECK(oracle.count(ParityMatrix::identity(4), Variant::S, complete4) == 0);
  CHECK(oracle.count(ParityMatrix::identity(4), Variant::WR, line4) == 0);
}

TEST_CASE("oracle depth basics") {
  ExactOracle oracle;
  auto complete4 = CouplingGraph::complete(4);
  CHECK(oracle.depth(ParityMatrix::identity(4), Variant::S, complete4) == 0);

  auto single = apply_cnot(ParityMatrix::identity(4), 2, 0);
  CHECK(oracle.depth(single, Variant::S, complete4) == 1);

  // The weak 2-gate solution shares qubit 1, so its two gates are
  // sequential: weak depth 2.
  CHECK(oracle.depth(example_matrix(), Variant::W, complete4) == 2);

  auto parallel = ParityMatrix::identity(4);
  parallel.apply_cnot(0, 1);
  parallel.apply_cnot(2, 3);
  CHECK(oracle.depth(parallel, Variant::S, complete4) == 1);
  CHECK(oracle.count(parallel, Variant::S, complete4) == 2);
}

TEST_CASE("oracle plans replay to the target") {
  ExactOracle oracle;
  std::mt19937 rng(59);
  auto complete4 = CouplingGraph::complete(4);
  auto line4 = CouplingGraph::line(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_full_rank(4, rng);
    for (Variant v : {Variant::S, Variant::W, Variant::SR, Variant::WR}) {
      const CouplingGraph& cp = is_restricted(v) ? line4 : complete4;
      for (Metric metric : {Metric::Count, Metric::Depth}) {
        Plan p = oracle.plan(m, v, metric, cp);
        CHECK(replay(4, p) == m);
        if (is_restricted(v)) {
          WirePlan wire = realize_plan(4, p);
          for (const auto& step : wire.steps)
            for (const auto& [c, t] : step) CHECK(cp.allows(c, t));
        }
      }
    }
  }
}

TEST_CASE("oracle containment properties") {
  ExactOracle oracle;
  std::mt19937 rng(61);
  auto complete4 = CouplingGraph::complete(4);
  auto line4 = CouplingGraph::line(4);
  for (int trial = 0; trial < 25; ++trial) {
    auto m = random_full_rank(4, rng);
    int s = oracle.count(m, Variant::S, complete4);
    int w = oracle.count(m, Variant::W, complete4);
    int sr = oracle.count(m, Variant::SR, line4);
    int wr = oracle.count(m, Variant::WR, line4);
    CHECK(w <= s);
    CHECK(s <= sr);
    CHECK(w <= wr);
    CHECK(wr <= sr);
    CHECK(oracle.depth(m, Variant::S, complete4) <= s);
    CHECK(oracle.depth(m, Variant::SR, line4) <= sr);
  }
}

TEST_CASE("oracle agrees with the SAT route exhaustively at n = 2") {
  ExactOracle oracle;
  auto all2 = ExactOracle::all_full_rank(2);
  CHECK(all2.size() == 6);
  auto complete2 = CouplingGraph::complete(2);
  auto line2 = CouplingGraph::line(2);
  SolverHandle builtin = SolverHandle::builtin_sat(30.0);
  for (const auto& m : all2) {
    for (Variant v : {Variant::S, Variant::W, Variant::SR, Variant::WR}) {
      const CouplingGraph& cp = is_restricted(v) ? line2 : complete2;
      for (Metric metric : {Metric::Count, Metric::Depth}) {
        auto found = find_optimum(m, v, metric, cp, builtin, 30.0);
        int expected = metric == Metric::Count ? oracle.count(m, v, cp)
                                               : oracle.depth(m, v, cp);
        CHECK(found.bound == expected);
      }
    }
  }
}

TEST_CASE("all_full_rank counts the small general linear groups") {
  CHECK(ExactOracle::all_full_rank(2).size() == 6);
  CHECK(ExactOracle::all_full_rank(3).size() == 168);
}

TEST_CASE("oracle rejects oversized and unreachable inputs") {
  ExactOracle oracle;
  CHECK_THROWS_AS(oracle.count(ParityMatrix::identity(5), Variant::S,
                               CouplingGraph::complete(5)),
                  std::invalid_argument);
  auto disconnected = parse_coupling("n 4\n0 1\n2 3\n");
  CHECK_THROWS_AS(oracle.count(example_matrix(), Variant::SR, disconnected),
                  std::invalid_argument);
}
