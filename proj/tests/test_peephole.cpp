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

#include "cnotforge/peephole.hpp"
#include "helpers.hpp"

using namespace cnotforge;
using namespace cnotforge::testing;

namespace {

Circuit random_mixed_circuit(std::mt19937& rng, int n, int len) {
  std::uniform_int_distribution<int> pick(0, n - 1);
  Circuit c = Circuit::make(n);
  for (int g = 0; g < len; ++g) {
    int a = pick(rng);
    switch (rng() % 4) {
      case 0:
        c.gates.push_back(Gate{"t", {a}, {}, ""});
        break;
      case 1:
        c.gates.push_back(Gate{"h", {a}, {}, ""});
        break;
      default: {
        int b = pick(rng);
        if (a == b) {
          c.gates.push_back(Gate{"tdg", {a}, {}, ""});
        } else {
          c.gates.push_back(Gate{"cx", {a, b}, {}, ""});
        }
      }
    }
  }
  return c;
}

SynthOptions options(Variant v, Metric metric,
                     std::optional<CouplingGraph> cp = std::nullopt) {
  SynthOptions o;
  o.variant = v;
  o.metric = metric;
  o.coupling = std::move(cp);
  o.budget_s = 30.0;
  return o;
}

}  // namespace

TEST_CASE("verify accepts relabeled equivalents and rejects corruptions") {
  Circuit orig = gates_to_circuit(4, example_gates());
  Circuit weak = gates_to_circuit(4, example_weak_2());
  Permutation p({0, 3, 2, 1});
  CHECK(verify(orig, weak, p));
  CHECK_FALSE(verify(orig, weak, Permutation::identity(4)));

  Circuit strong = gates_to_circuit(4, example_strong_3());
  CHECK(verify(orig, strong, Permutation::identity(4)));

  SUBCASE("a deleted CNOT fails") {
    Circuit broken = strong;
    broken.gates.pop_back();
    CHECK_FALSE(verify(orig, broken, Permutation::identity(4)));
  }

  SUBCASE("swaps participate in the linear semantics") {
    Circuit swapped = weak;
    swapped.gates.push_back(Gate{"swap", {1, 3}, {}, ""});
    CHECK(verify(orig, swapped, Permutation::identity(4)));
  }

  SUBCASE("opaque gates must see identical parities") {
    Circuit a = Circuit::make(2);
    a.gates.push_back(Gate{"cx", {0, 1}, {}, ""});
    a.gates.push_back(Gate{"t", {1}, {}, ""});
    Circuit b = Circuit::make(2);
    b.gates.push_back(Gate{"t", {1}, {}, ""});
    b.gates.push_back(Gate{"cx", {0, 1}, {}, ""});
    CHECK_FALSE(verify(a, b, Permutation::identity(2)));
    CHECK(verify(a, a, Permutation::identity(2)));
  }

  SUBCASE("differing opaque parameters fail") {
    Circuit a = Circuit::make(1);
    a.gates.push_back(Gate{"rz", {0}, {"pi/4"}, ""});
    Circuit b = Circuit::make(1);
    b.gates.push_back(Gate{"rz", {0}, {"pi/2"}, ""});
    CHECK_FALSE(verify(a, b, Permutation::identity(1)));
  }
}

TEST_CASE("optimize the worked example") {
  Circuit c = gates_to_circuit(4, example_gates());

  SUBCASE("strong count") {
    auto r = optimize(c, options(Variant::S, Metric::Count));
    CHECK(r.circuit.cnot_count() == 3);
    CHECK(r.output_perm.is_identity());
    CHECK(r.after.cnot_count == 3);
    CHECK(r.before.cnot_count == 6);
    REQUIRE(r.report.size() == 1);
    CHECK(r.report[0].status == "optimal");
    CHECK(r.report[0].bound == 3);
  }

  SUBCASE("weak count relabels the outputs") {
    auto r = optimize(c, options(Variant::W, Metric::Count));
    CHECK(r.circuit.cnot_count() == 2);
    CHECK(r.output_perm == Permutation({0, 3, 2, 1}));
    CHECK(verify(c, r.circuit, r.output_perm));
  }

  SUBCASE("strong restricted on the line graph") {
    auto r = optimize(c, options(Variant::SR, Metric::Count,
                                 CouplingGraph::line(4)));
    CHECK(r.circuit.cnot_count() == 8);
    for (const auto& g : r.circuit.gates)
      CHECK(CouplingGraph::line(4).allows(g.qubits[0], g.qubits[1]));
  }

  SUBCASE("oracle backend agrees") {
    auto o = options(Variant::W, Metric::Count);
    o.backend = Backend::Oracle;
    auto r = optimize(c, o);
    CHECK(r.circuit.cnot_count() == 2);
  }

  SUBCASE("qbf backend via expansion") {
    auto o = options(Variant::S, Metric::Count);
    o.backend = Backend::Qbf;
    auto r = optimize(c, o);
    CHECK(r.circuit.cnot_count() == 3);
  }
}

TEST_CASE("optimize edge cases") {
  SUBCASE("CNOT-free circuits pass through unchanged") {
    Circuit c = Circuit::make(3);
    c.gates.push_back(Gate{"t", {0}, {}, ""});
    c.gates.push_back(Gate{"h", {2}, {}, ""});
    auto r = optimize(c, options(Variant::S, Metric::Count));
    CHECK(r.circuit.gates_equal(c));
    CHECK(r.output_perm.is_identity());
  }

  SUBCASE("weak restricted is rejected with an explanation") {
    Circuit c = gates_to_circuit(3, {{0, 1}});
    CHECK_THROWS_WITH_AS(
        optimize(c, options(Variant::WR, Metric::Count, CouplingGraph::line(3))),
        doctest::Contains("weak restricted"), std::invalid_argument);
  }

  SUBCASE("restricted without a coupling graph is rejected") {
    Circuit c = gates_to_circuit(3, {{0, 1}});
    CHECK_THROWS_AS(optimize(c, options(Variant::SR, Metric::Count)),
                    std::invalid_argument);
  }

  SUBCASE("zero budget leaves slices untouched and flags them") {
    Circuit c = gates_to_circuit(4, example_gates());
    auto o = options(Variant::S, Metric::Count);
    o.budget_s = 0.0;
    auto r = optimize(c, o);
    CHECK(r.circuit.cnot_count() == 6);
    REQUIRE(r.report.size() == 1);
    CHECK(r.report[0].status == "timeout");
    CHECK(verify(c, r.circuit, r.output_perm));
  }
}

TEST_CASE("optimize splits around blocking gates") {
  // cx, t on a shared qubit, then the inverse cx: two slices, neither of
  // which can cancel, so the count stays 2 but everything verifies.
  Circuit c = Circuit::make(2);
  c.gates.push_back(Gate{"cx", {0, 1}, {}, ""});
  c.gates.push_back(Gate{"t", {1}, {}, ""});
  c.gates.push_back(Gate{"cx", {0, 1}, {}, ""});
  auto r = optimize(c, options(Variant::S, Metric::Count));
  CHECK(r.report.size() == 2);
  CHECK(r.circuit.cnot_count() == 2);
  CHECK(verify(c, r.circuit, r.output_perm));

  // With the t gate on an untouched qubit the pair cancels to zero.
  Circuit c2 = Circuit::make(3);
  c2.gates.push_back(Gate{"cx", {0, 1}, {}, ""});
  c2.gates.push_back(Gate{"t", {2}, {}, ""});
  c2.gates.push_back(Gate{"cx", {0, 1}, {}, ""});
  auto r2 = optimize(c2, options(Variant::S, Metric::Count));
  CHECK(r2.circuit.cnot_count() == 0);
  CHECK(verify(c2, r2.circuit, r2.output_perm));
}

TEST_CASE("random mixed circuits survive the full pipeline") {
  std::mt19937 rng(97);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);
    Circuit c = random_mixed_circuit(rng, n, 4 + static_cast<int>(rng() % 20));
    for (Variant v : {Variant::S, Variant::W}) {
      auto r = optimize(c, options(v, Metric::Count));
      CHECK(r.after.cnot_count <= r.before.cnot_count);
      CHECK(verify(c, r.circuit, r.output_perm));
    }
  }
}

TEST_CASE("slice processing order does not change totals") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    Circuit c = random_mixed_circuit(rng, 4, 16);
    auto forward = optimize(c, options(Variant::S, Metric::Count));
    auto threaded = optimize(c, options(Variant::S, Metric::Count), 3);
    CHECK(forward.after.cnot_count == threaded.after.cnot_count);
    std::vector<int> bounds_fwd, bounds_thr;
    for (const auto& rec : forward.report) bounds_fwd.push_back(rec.bound);
    for (const auto& rec : threaded.report) bounds_thr.push_back(rec.bound);
    CHECK(bounds_fwd == bounds_thr);
  }
}

TEST_CASE("depth-metric peephole replaces slices with depth-optimal ones") {
  Circuit c = gates_to_circuit(4, example_gates());
  auto r = optimize(c, options(Variant::W, Metric::Depth));
  CHECK(verify(c, r.circuit, r.output_perm));
  Metrics m = metrics(r.circuit);
  CHECK(m.cnot_depth == 2);  // weak depth optimum of the example
}
