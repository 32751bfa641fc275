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

#include "cnotforge/coupling.hpp"

using namespace cnotforge;

TEST_CASE("parse_coupling") {
  auto g = parse_coupling("n 4\n0 1\n1 2\n2 3\n");
  CHECK(g.size() == 4);
  CHECK(g.pairs().size() == 6);
  CHECK(g.allows(0, 1));
  CHECK(g.allows(1, 0));
  CHECK_FALSE(g.allows(0, 2));
  CHECK(g == CouplingGraph::line(4));

  SUBCASE("directed edges") {
    auto d = parse_coupling("n 3\n0 -> 1\n1 2\n");
    CHECK(d.allows(0, 1));
    CHECK_FALSE(d.allows(1, 0));
    CHECK(d.allows(1, 2));
    CHECK(d.allows(2, 1));
  }

  SUBCASE("errors carry the line number") {
    CHECK_THROWS_WITH_AS(parse_coupling("n 2\n0 0\n"),
                         doctest::Contains("line 2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_coupling("n 2\n0 5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_coupling("n 2\n0\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_coupling("0 1\n"), std::invalid_argument);
  }

  SUBCASE("edgeless graph forbids every pair") {
    auto e = parse_coupling("n 3\n");
    CHECK(e.pairs().empty());
    CHECK_FALSE(e.is_connected());
  }
}

TEST_CASE("complete") {
  CHECK(CouplingGraph::complete(2).pairs() ==
        std::set<std::pair<int, int>>{{0, 1}, {1, 0}});
  CHECK(CouplingGraph::complete(4).pairs().size() == 12);
  CHECK(CouplingGraph::complete(1).pairs().empty());
  CHECK(CouplingGraph::complete(5).is_complete());
}

TEST_CASE("line") {
  CHECK(CouplingGraph::line(4) == parse_coupling("n 4\n0 1\n1 2\n2 3\n"));
  CHECK(CouplingGraph::line(1).pairs().empty());
  CHECK(CouplingGraph::line(2) == CouplingGraph::complete(2));
  CHECK(CouplingGraph::line(5).is_connected());
}

TEST_CASE("emit round-trips the pair set") {
  auto g = parse_coupling("n 5\n0 1\n1 -> 3\n2 4\n");
  CHECK(parse_coupling(g.emit()) == g);
  auto line = CouplingGraph::line(7);
  CHECK(parse_coupling(line.emit()) == line);
}

TEST_CASE("remapped pairs follow the permutation") {
  auto g = CouplingGraph::line(3);
  auto r = g.remapped({2, 1, 0});
  CHECK(r.allows(2, 1));
  CHECK(r.allows(1, 0));
  CHECK_FALSE(r.allows(0, 2));
}

TEST_CASE("components split on missing edges") {
  auto g = parse_coupling("n 4\n0 1\n2 3\n");
  auto comp = g.components();
  CHECK(comp[0] == comp[1]);
  CHECK(comp[2] == comp[3]);
  CHECK(comp[0] != comp[2]);
}
