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

#include "cnotforge/qbf_encode.hpp"
#include "helpers.hpp"

using namespace cnotforge;
using namespace cnotforge::testing;

namespace {

bool qbf_true(const ParityMatrix& m, int k, Variant v, Metric metric,
              const CouplingGraph& cp) {
  auto q = encode_qbf(m, k, v, metric, cp);
  return builtin_sat(expand_universals(q)).status == SolveStatus::Sat;
}

}  // namespace

TEST_CASE("expansion truth matches the known frontier on the worked example") {
  auto m = example_matrix();
  auto complete4 = CouplingGraph::complete(4);
  auto line4 = CouplingGraph::line(4);

  CHECK(qbf_true(m, 3, Variant::S, Metric::Count, complete4));
  CHECK_FALSE(qbf_true(m, 2, Variant::S, Metric::Count, complete4));
  CHECK(qbf_true(ParityMatrix::identity(4), 0, Variant::S, Metric::Count,
                 complete4));
  CHECK(qbf_true(m, 8, Variant::SR, Metric::Count, line4));
  CHECK_FALSE(qbf_true(m, 7, Variant::SR, Metric::Count, line4));
}

TEST_CASE("prefix structure follows the block layout") {
  auto q = encode_qbf(example_matrix(), 2, Variant::S, Metric::Count,
                      CouplingGraph::complete(4));
  REQUIRE(q.prefix.size() == 3);
  CHECK(q.prefix[0].existential);
  CHECK_FALSE(q.prefix[1].existential);
  CHECK(q.prefix[2].existential);
  CHECK(q.prefix[1].vars.size() == 2);  // ceil(log2 4) universal selectors

  // Every variable sits in exactly one block.
  std::vector<int> seen(q.var_count + 1, 0);
  for (const auto& b : q.prefix)
    for (int v : b.vars) ++seen[v];
  for (int v = 1; v <= q.var_count; ++v) CHECK(seen[v] == 1);

  SUBCASE("outer variables cover exactly the plan variables") {
    for (int t = 0; t < 2; ++t)
      for (int i = 0; i < 4; ++i) {
        int cv = q.varmap.id("ctrl[" + std::to_string(t) + "][" +
                             std::to_string(i) + "]");
        CHECK(std::count(q.outer_vars().begin(), q.outer_vars().end(), cv) ==
              1);
      }
  }

  SUBCASE("variables per step grow linearly, SAT grows quadratically") {
    auto q8 = encode_qbf(ParityMatrix::identity(8), 3, Variant::S,
                         Metric::Count, CouplingGraph::complete(8));
    auto q16 = encode_qbf(ParityMatrix::identity(16), 3, Variant::S,
                          Metric::Count, CouplingGraph::complete(16));
    auto s8 = encode_count(ParityMatrix::identity(8), 3, Variant::S,
                           CouplingGraph::complete(8));
    auto s16 = encode_count(ParityMatrix::identity(16), 3, Variant::S,
                            CouplingGraph::complete(16));
    // Doubling n roughly doubles the QBF variable count but quadruples the
    // SAT variable count; clause counts sit one degree higher each.
    CHECK(q16.var_count < q8.var_count * 5 / 2);
    CHECK(s16.var_count > s8.var_count * 3);
    CHECK(q16.clauses.size() < q8.clauses.size() * 5);
    CHECK(s16.clauses.size() > s8.clauses.size() * 6);
  }
}

TEST_CASE("QDIMACS emission") {
  auto q = encode_qbf(example_matrix(), 1, Variant::S, Metric::Count,
                      CouplingGraph::complete(4));
  std::string text = emit_qdimacs(q);
  CHECK(text.find("p cnf") != std::string::npos);
  CHECK(text.find("\ne ") != std::string::npos);
  CHECK(text.find("\na ") != std::string::npos);
  CHECK(text.find("c var 1 = ctrl[0][0]") != std::string::npos);

  // Prefix lines must list every variable exactly once.
  std::istringstream in(text);
  std::string line;
  std::vector<int> seen(q.var_count + 1, 0);
  while (std::getline(in, line)) {
    if (line.empty() || (line[0] != 'e' && line[0] != 'a')) continue;
    std::istringstream ls(line.substr(1));
    int v;
    while (ls >> v)
      if (v != 0) ++seen[v];
  }
  for (int v = 1; v <= q.var_count; ++v) CHECK(seen[v] == 1);
}

TEST_CASE("weak variants are not offered in QBF") {
  CHECK_THROWS_AS(encode_qbf(example_matrix(), 2, Variant::W, Metric::Count,
                             CouplingGraph::complete(4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(encode_qbf(example_matrix(), 2, Variant::WR, Metric::Count,
                             CouplingGraph::line(4)),
                  std::invalid_argument);
}

TEST_CASE("expansion frontier equals the flat SAT frontier") {
  std::mt19937 rng(83);
  auto complete4 = CouplingGraph::complete(4);
  auto line4 = CouplingGraph::line(4);
  SolverHandle builtin = SolverHandle::builtin_sat(30.0);
  for (int trial = 0; trial < 8; ++trial) {
    auto m = random_full_rank(4, rng);
    for (Variant v : {Variant::S, Variant::SR}) {
      const CouplingGraph& cp = v == Variant::SR ? line4 : complete4;
      for (Metric metric : {Metric::Count, Metric::Depth}) {
        int opt = find_optimum(m, v, metric, cp, builtin, 30.0).bound;
        for (int k = 0; k <= opt + 1; ++k) {
          CnfInstance flat = metric == Metric::Count
                                 ? encode_count(m, k, v, cp)
                                 : encode_depth(m, k, v, cp);
          bool flat_sat = builtin_sat(flat).status == SolveStatus::Sat;
          CHECK(qbf_true(m, k, v, metric, cp) == flat_sat);
        }
      }
    }
  }
}

TEST_CASE("dead universal codes stay vacuous at n = 3") {
  // ceil(log2 3) = 2 selector bits leave one dead code; it must not
  // constrain anything, so the frontier still matches the SAT one.
  std::mt19937 rng(89);
  auto complete3 = CouplingGraph::complete(3);
  SolverHandle builtin = SolverHandle::builtin_sat(30.0);
  for (int trial = 0; trial < 6; ++trial) {
    auto m = random_full_rank(3, rng);
    int opt =
        find_optimum(m, Variant::S, Metric::Count, complete3, builtin, 30.0)
            .bound;
    for (int k = 0; k <= opt + 1; ++k) {
      bool flat_sat =
          builtin_sat(encode_count(m, k, Variant::S, complete3)).status ==
          SolveStatus::Sat;
      CHECK(qbf_true(m, k, Variant::S, Metric::Count, complete3) == flat_sat);
    }
  }
}

TEST_CASE("decode_outer replays the outer assignment") {
  auto m = example_matrix();
  auto complete4 = CouplingGraph::complete(4);

  SUBCASE("count plans come back verified") {
    auto q = encode_qbf(m, 3, Variant::S, Metric::Count, complete4);
    auto res = builtin_sat(expand_universals(q));
    REQUIRE(res.status == SolveStatus::Sat);
    Plan plan = decode_outer(res.model, q);
    CHECK(plan.gate_count() == 3);
    CHECK(replay(4, plan) == m);
  }

  SUBCASE("k = 0 decodes to the empty plan") {
    auto q = encode_qbf(ParityMatrix::identity(4), 0, Variant::S,
                        Metric::Count, complete4);
    auto res = builtin_sat(expand_universals(q));
    REQUIRE(res.status == SolveStatus::Sat);
    CHECK(decode_outer(res.model, q).steps.empty());
  }

  SUBCASE("a corrupted outer assignment is rejected") {
    auto q = encode_qbf(m, 3, Variant::S, Metric::Count, complete4);
    auto res = builtin_sat(expand_universals(q));
    REQUIRE(res.status == SolveStatus::Sat);
    auto model = res.model;
    // Force a second control variable true in step 0.
    int c0 = q.varmap.id("ctrl[0][0]");
    int c1 = q.varmap.id("ctrl[0][1]");
    model[c0] = model[c1] = true;
    CHECK_THROWS_AS(decode_outer(model, q), SolverError);
  }
}

TEST_CASE("find_optimum_qbf without an external solver") {
  auto m = example_matrix();
  auto r = find_optimum_qbf(m, Variant::S, Metric::Count,
                            CouplingGraph::complete(4), std::nullopt,
                            SolverHandle::builtin_sat(30.0), 30.0);
  REQUIRE(r.status == SearchStatus::Optimal);
  CHECK(r.bound == 3);
  REQUIRE(r.plan.has_value());
  CHECK(replay(4, *r.plan) == m);

  auto rd = find_optimum_qbf(m, Variant::SR, Metric::Depth,
                             CouplingGraph::line(4), std::nullopt,
                             SolverHandle::builtin_sat(30.0), 30.0);
  CHECK(rd.status == SearchStatus::Optimal);
  CHECK(rd.bound >= 1);
}
