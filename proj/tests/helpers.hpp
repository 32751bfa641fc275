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

#pragma once

#include <string>
#include <vector>

#include "cnotforge/circuit.hpp"
#include "cnotforge/gf2.hpp"
#include "cnotforge/plan.hpp"

namespace cnotforge::testing {

// The 6-gate worked-example circuit and its parity matrix, used throughout
// the suites. The matrix is frozen from its known row values rather than
// recomputed, so the gate fold is checked against it, not the other way
// around.
inline std::vector<GatePair> example_gates() {
  return {{3, 1}, {1, 3}, {1, 0}, {3, 1}, {1, 0}, {3, 1}};
}

inline ParityMatrix example_matrix() {
  return ParityMatrix::from_rows({{1, 0, 0, 0},
                                  {1, 1, 0, 1},
                                  {0, 0, 1, 0},
                                  {0, 1, 0, 0}});
}

// Known-optimal resyntheses of the example: 3 gates strongly equivalent,
// 2 gates weakly equivalent with outputs 1 and 3 exchanged, 8 gates on the
// line graph, 5 gates on the line graph with permutation allowed.
inline std::vector<GatePair> example_strong_3() {
  return {{1, 0}, {3, 1}, {1, 3}};
}
inline std::vector<GatePair> example_weak_2() { return {{1, 0}, {1, 3}}; }
inline std::vector<GatePair> example_line_8() {
  return {{1, 0}, {2, 3}, {3, 2}, {2, 1}, {1, 2}, {3, 2}, {2, 3}, {1, 2}};
}
inline std::vector<GatePair> example_line_weak_5() {
  return {{1, 0}, {1, 2}, {2, 1}, {1, 2}, {2, 3}};
}

inline std::string example_qasm() {
  std::string s = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[4];\n";
  for (const auto& [c, t] : example_gates())
    s += "cx q[" + std::to_string(c) + "], q[" + std::to_string(t) + "];\n";
  return s;
}

inline Circuit gates_to_circuit(int n, const std::vector<GatePair>& gates) {
  Circuit c = Circuit::make(n);
  for (const auto& [ctrl, tgt] : gates)
    c.gates.push_back(Gate{"cx", {ctrl, tgt}, {}, ""});
  return c;
}

}  // namespace cnotforge::testing
