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

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cnotforge/cnf.hpp"
#include "cnotforge/coupling.hpp"
#include "cnotforge/gf2.hpp"
#include "cnotforge/plan.hpp"

namespace cnotforge {

/// Brute-force ground truth: breadth-first search over GL_n(F2) for n <= 4
/// (|GL_4| = 20160 states). States are the n*n matrix bits packed into one
/// word; a column addition is a shift-and-xor on the packed form.
class ExactOracle {
public:
  static constexpr int kMaxN = 4;

  int count(const ParityMatrix& m, Variant variant, const CouplingGraph& cp) {
    return query(m, variant, Metric::Count, cp).bound;
  }
  int depth(const ParityMatrix& m, Variant variant, const CouplingGraph& cp) {
    return query(m, variant, Metric::Depth, cp).bound;
  }

  /// A witness plan of optimal size, reconstructed by walking the BFS
  /// distance map back to its start.
  Plan plan(const ParityMatrix& m, Variant variant, Metric metric,
            const CouplingGraph& cp) {
    auto q = query(m, variant, metric, cp);
    return q.plan;
  }

  /// Every full-rank n x n matrix; test support for exhaustive sweeps.
  static std::vector<ParityMatrix> all_full_rank(int n) {
    if (n > 3) throw std::invalid_argument("all_full_rank: n too large");
    std::vector<ParityMatrix> out;
    uint32_t limit = uint32_t(1) << (n * n);
    for (uint32_t bits = 0; bits < limit; ++bits) {
      ParityMatrix m(n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          if ((bits >> (c * n + r)) & 1) m.set(r, c, true);
      if (is_full_rank(m)) out.push_back(std::move(m));
    }
    return out;
  }

private:
  using State = uint32_t;

  struct DistMap {
    std::vector<int8_t> dist;  // -1 unseen
  };

  struct QueryResult {
    int bound;
    Plan plan;
  };

  struct Key {
    int n;
    Variant variant;
    Metric metric;
    std::vector<std::pair<int, int>> pairs;
    bool operator<(const Key& o) const {
      return std::tie(n, variant, metric, pairs) <
             std::tie(o.n, o.variant, o.metric, o.pairs);
    }
  };

  static State pack(const ParityMatrix& m) {
    State s = 0;
    int n = m.size();
    for (int c = 0; c < n; ++c)
      s |= static_cast<State>(m.column(c)) << (c * n);
    return s;
  }

  static State apply_pair(State s, int c, int t, int n) {
    State mask = (State(1) << n) - 1;
    State col = (s >> (c * n)) & mask;
    return s ^ (col << (t * n));
  }

  /// Moves in one search: single pairs for the count metric, every
  /// non-empty set of qubit-disjoint pairs for the depth metric.
  static std::vector<std::vector<GatePair>> moves(
      int n, Metric metric, const std::vector<GatePair>& pairs) {
    std::vector<std::vector<GatePair>> out;
    if (metric == Metric::Count) {
      for (const auto& p : pairs) out.push_back({p});
      return out;
    }
    std::vector<GatePair> current;
    std::vector<bool> used(n, false);
    auto rec = [&](auto&& self, size_t from) -> void {
      if (!current.empty()) out.push_back(current);
      for (size_t i = from; i < pairs.size(); ++i) {
        auto [a, b] = pairs[i];
        if (used[a] || used[b]) continue;
        used[a] = used[b] = true;
        current.push_back(pairs[i]);
        self(self, i + 1);
        current.pop_back();
        used[a] = used[b] = false;
      }
    };
    rec(rec, 0);
    return out;
  }

  static void bfs(int n, State start,
                  const std::vector<std::vector<GatePair>>& ops, DistMap& dm) {
    if (dm.dist.empty()) dm.dist.assign(size_t(1) << (n * n), -1);
    std::vector<State> frontier{start}, next;
    if (dm.dist[start] != -1) return;
    dm.dist[start] = 0;
    for (int8_t d = 1; !frontier.empty(); ++d) {
      next.clear();
      for (State s : frontier) {
        for (const auto& op : ops) {
          State s2 = s;
          for (const auto& [c, t] : op) s2 = apply_pair(s2, c, t, n);
          if (dm.dist[s2] == -1) {
            dm.dist[s2] = d;
            next.push_back(s2);
          }
        }
      }
      frontier.swap(next);
    }
  }

  /// All permutation matrices of size n, with their permutation maps.
  static std::vector<std::pair<State, std::vector<int>>> perm_starts(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    std::vector<std::pair<State, std::vector<int>>> out;
    do {
      out.emplace_back(pack(permuted_identity(n, Permutation{p})), p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }

  QueryResult query(const ParityMatrix& m, Variant variant, Metric metric,
                    const CouplingGraph& cp) {
    int n = m.size();
    if (n > kMaxN) throw std::invalid_argument("ExactOracle: n > 4");
    if (cp.size() != n)
      throw std::invalid_argument("ExactOracle: coupling size mismatch");
    if (!is_full_rank(m))
      throw std::invalid_argument("ExactOracle: matrix is not full rank");
    State target = pack(m);

    std::vector<GatePair> base_pairs(cp.pairs().begin(), cp.pairs().end());

    if (variant == Variant::WR) {
      // Each start permutation fixes its own remapped restriction set, so
      // the searches cannot share a frontier; take the best over all of
      // them.
      std::lock_guard<std::mutex> lock(mutex_);
      int best = -1;
      std::vector<int> best_perm;
      const DistMap* best_map = nullptr;
      const std::vector<std::vector<GatePair>>* best_ops = nullptr;
      for (const auto& [start, perm] : perm_starts(n)) {
        Key key{n, variant, metric, {}};
        auto remapped = cp.remapped(perm);
        key.pairs.assign(remapped.pairs().begin(), remapped.pairs().end());
        key.pairs.emplace_back(-1, pack_perm(perm));  // separate per start
        auto& entry = cache_[key];
        if (entry.map.dist.empty()) {
          entry.ops = moves(n, metric, key_pairs_of(remapped));
          bfs(n, start, entry.ops, entry.map);
        }
        int8_t d = entry.map.dist[target];
        if (d >= 0 && (best < 0 || d < best)) {
          best = d;
          best_perm = perm;
          best_map = &entry.map;
          best_ops = &entry.ops;
        }
      }
      if (best < 0)
        throw std::invalid_argument(
            "ExactOracle: target unreachable under the coupling restrictions");
      Plan plan = reconstruct(n, target, *best_map, *best_ops).first;
      plan.input_perm = Permutation{best_perm};
      return {best, plan};
    }

    Key key{n, variant, metric, base_pairs};
    std::lock_guard<std::mutex> lock(mutex_);
    auto& entry = cache_[key];
    if (entry.map.dist.empty()) {
      entry.ops = moves(n, metric, base_pairs);
      if (is_weak(variant)) {
        // One edge set for every start: a single merged multi-source BFS
        // from all permutation matrices.
        entry.map.dist.assign(size_t(1) << (n * n), -1);
        std::vector<State> frontier, next;
        for (const auto& [start, perm] : perm_starts(n)) {
          entry.map.dist[start] = 0;
          frontier.push_back(start);
        }
        for (int8_t d = 1; !frontier.empty(); ++d) {
          next.clear();
          for (State s : frontier)
            for (const auto& op : entry.ops) {
              State s2 = s;
              for (const auto& [c, t] : op) s2 = apply_pair(s2, c, t, n);
              if (entry.map.dist[s2] == -1) {
                entry.map.dist[s2] = d;
                next.push_back(s2);
              }
            }
          frontier.swap(next);
        }
      } else {
        bfs(n, pack(ParityMatrix::identity(n)), entry.ops, entry.map);
      }
    }
    int8_t d = entry.map.dist[target];
    if (d < 0) {
      if (variant == Variant::SR)
        throw std::invalid_argument(
            "ExactOracle: target unreachable under the coupling restrictions");
      throw std::logic_error("ExactOracle: target unreachable");
    }
    auto [plan, reached] = reconstruct(n, target, entry.map, entry.ops);
    if (is_weak(variant)) plan.input_perm = unpack_perm(n, reached);
    return {d, plan};
  }

  static std::vector<GatePair> key_pairs_of(const CouplingGraph& cp) {
    return std::vector<GatePair>(cp.pairs().begin(), cp.pairs().end());
  }

  static int pack_perm(const std::vector<int>& p) {
    int v = 0;
    for (int x : p) v = v * 8 + x;
    return v;
  }

  /// Column additions are involutions, so walking down the distance
  /// gradient with the same move set recovers a shortest plan. Returns the
  /// plan and the distance-0 state it ends on.
  static std::pair<Plan, State> reconstruct(
      int n, State target, const DistMap& dm,
      const std::vector<std::vector<GatePair>>& ops) {
    Plan plan;
    State s = target;
    int d = dm.dist[s];
    while (d > 0) {
      bool stepped = false;
      for (const auto& op : ops) {
        State s2 = s;
        for (const auto& [c, t] : op) s2 = apply_pair(s2, c, t, n);
        if (dm.dist[s2] == d - 1) {
          plan.steps.push_back(op);
          s = s2;
          --d;
          stepped = true;
          break;
        }
      }
      if (!stepped) throw std::logic_error("ExactOracle: broken distance map");
    }
    std::reverse(plan.steps.begin(), plan.steps.end());
    return {plan, s};
  }

  /// Reads the permutation out of a packed permutation matrix: row i has its
  /// single 1 in column p(i).
  static Permutation unpack_perm(int n, State s) {
    std::vector<int> p(n, -1);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r)
        if ((s >> (c * n + r)) & 1) p[r] = c;
    return Permutation{p};
  }

  struct Entry {
    DistMap map;
    std::vector<std::vector<GatePair>> ops;
  };

  std::map<Key, Entry> cache_;
  std::mutex mutex_;
};

}  // namespace cnotforge
