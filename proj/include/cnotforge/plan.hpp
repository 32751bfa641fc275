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

#include <optional>
#include <utility>
#include <vector>

#include "cnotforge/gf2.hpp"

namespace cnotforge {

using GatePair = std::pair<int, int>;  // (control, target) indices

/// A synthesized solution. Steps act on column indices; with an input
/// permutation present (weak-equivalence variants), replay starts from the
/// column-permuted identity instead of the identity.
struct Plan {
  std::optional<Permutation> input_perm;
  std::vector<std::vector<GatePair>> steps;  // each step: disjoint-qubit pairs

  int gate_count() const {
    int c = 0;
    for (const auto& s : steps) c += static_cast<int>(s.size());
    return c;
  }
  int depth() const { return static_cast<int>(steps.size()); }

  std::vector<GatePair> flatten() const {
    std::vector<GatePair> out;
    for (const auto& s : steps) out.insert(out.end(), s.begin(), s.end());
    return out;
  }

  static Plan from_gates(std::vector<GatePair> gates) {
    Plan p;
    for (auto& g : gates) p.steps.push_back({g});
    return p;
  }
};

/// Fold the plan over the (possibly permuted) identity.
inline ParityMatrix replay(int n, const Plan& plan) {
  ParityMatrix m = plan.input_perm ? permuted_identity(n, *plan.input_perm)
                                   : ParityMatrix::identity(n);
  for (const auto& step : plan.steps)
    for (const auto& [c, t] : step) m.apply_cnot(c, t);
  return m;
}

/// A plan rendered as gates on circuit wires: for weak-equivalence plans the
/// input permutation is folded away by relabeling each gate through its
/// inverse, leaving a circuit that realizes a column permutation of the
/// target. output_perm is that permutation: fold(gates) ==
/// permute_columns(target, output_perm).
struct WirePlan {
  std::vector<std::vector<GatePair>> steps;
  Permutation output_perm;
};

inline WirePlan realize_plan(int n, const Plan& plan) {
  if (!plan.input_perm)
    return WirePlan{plan.steps, Permutation::identity(n)};
  Permutation inv = plan.input_perm->inverse();
  WirePlan out{plan.steps, inv};
  for (auto& step : out.steps)
    for (auto& [c, t] : step) {
      c = inv(c);
      t = inv(t);
    }
  return out;
}

/// Column-operation Gaussian elimination; the returned plan replays to m
/// exactly. Used as the upper bound for the optimal-search loop, not optimal
/// itself.
inline Plan gauss_synth(const ParityMatrix& m) {
  if (!is_full_rank(m))
    throw std::invalid_argument("gauss_synth: matrix is not full rank");
  int n = m.size();
  ParityMatrix w = m;
  std::vector<GatePair> ops;  // ops reducing m to the identity
  auto add = [&](int c, int t) {
    w.apply_cnot(c, t);
    ops.emplace_back(c, t);
  };
  // Phase 1: clear above the diagonal row by row. Columns < r never hold a
  // 1 in row r here, so a pivot always exists at or right of the diagonal.
  for (int r = 0; r < n; ++r) {
    if (!w.get(r, r)) {
      for (int c = r + 1; c < n; ++c) {
        if (w.get(r, c)) {
          add(c, r);
          break;
        }
      }
    }
    for (int c = r + 1; c < n; ++c)
      if (w.get(r, c)) add(r, c);
  }
  // Phase 2: now unit lower triangular; sweep rows bottom-up, where column r
  // is already e_r, so each addition only clears the one entry.
  for (int r = n - 1; r >= 0; --r)
    for (int c = 0; c < r; ++c)
      if (w.get(r, c)) add(r, c);
  // Column additions are involutions, so the reversed reduction replays to m.
  std::vector<GatePair> gates(ops.rbegin(), ops.rend());
  return Plan::from_gates(std::move(gates));
}

}  // namespace cnotforge
