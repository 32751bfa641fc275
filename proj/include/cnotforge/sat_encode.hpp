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

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "cnotforge/cnf.hpp"
#include "cnotforge/coupling.hpp"
#include "cnotforge/gf2.hpp"
#include "cnotforge/plan.hpp"
#include "cnotforge/solver.hpp"

namespace cnotforge {

struct EncodeOptions {
  // At-least-one CNOT per layer in the depth encoding. Dropping it does not
  // affect correctness, only solver performance.
  bool alo_layers = true;
};

namespace detail {

inline std::string sym(const char* base, int a, int b) {
  return std::string(base) + "[" + std::to_string(a) + "][" +
         std::to_string(b) + "]";
}
inline std::string sym(const char* base, int a, int b, int c) {
  return sym(base, a, b) + "[" + std::to_string(c) + "]";
}

inline void check_encode_args(const ParityMatrix& m, int k, Variant variant,
                              const CouplingGraph& cp) {
  if (k < 0) throw std::invalid_argument("encode: negative bound");
  if (cp.size() != m.size())
    throw std::invalid_argument("encode: coupling size mismatch");
  if (!is_restricted(variant) && !cp.is_complete())
    throw std::invalid_argument(
        "encode: unrestricted variant requires the complete graph");
}

/// Ordered action pairs that get update constraints. Weak+restricted keeps
/// all pairs and restricts them symbolically through the layer-0 mapping.
inline std::vector<std::pair<int, int>> update_pairs(int n, Variant variant,
                                                     const CouplingGraph& cp) {
  std::vector<std::pair<int, int>> out;
  if (variant == Variant::SR) {
    out.assign(cp.pairs().begin(), cp.pairs().end());
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) out.emplace_back(i, j);
  }
  return out;
}

/// Layer-0 state rows: identity for strong variants, a free permutation
/// matrix (row and column exactly-one) for weak ones.
inline void encode_initial(CnfInstance& inst, int n, Variant variant) {
  auto m0 = [&](int r, int c) { return inst.varmap.id(sym("m", 0, r, c)); };
  for (int r = 0; r < n; ++r) {
    std::vector<int> row;
    for (int c = 0; c < n; ++c) row.push_back(m0(r, c));
    exactly_one(inst, row, "m0row" + std::to_string(r));
  }
  if (is_weak(variant)) {
    for (int c = 0; c < n; ++c) {
      std::vector<int> col;
      for (int r = 0; r < n; ++r) col.push_back(m0(r, c));
      exactly_one(inst, col, "m0col" + std::to_string(c));
    }
  } else {
    for (int q = 0; q < n; ++q) inst.add_clause({m0(q, q)});
  }
}

inline void encode_goal(CnfInstance& inst, const ParityMatrix& m, int k) {
  int n = m.size();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int id = inst.varmap.id(sym("m", k, r, c));
      inst.add_clause({m.get(r, c) ? id : -id});
    }
}

/// Symbolic qubit-pair restrictions for weak+restricted synthesis: a
/// non-connected pair, seen through the layer-0 mapping, blocks the mapped
/// action. `veto` turns the blocked (p, q) action into clause literals.
template <typename Veto>
void encode_mapped_restrictions(CnfInstance& inst, int n,
                                const CouplingGraph& cp, const Veto& veto) {
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || cp.allows(i, j)) continue;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          if (p == q) continue;
          std::vector<int> clause{-inst.varmap.id(sym("m", 0, i, p)),
                                  -inst.varmap.id(sym("m", 0, j, q))};
          veto(p, q, clause);
          inst.add_clause(std::move(clause));
        }
    }
}

inline void allocate_state_vars(CnfInstance& inst, int n, int k) {
  for (int t = 0; t <= k; ++t)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) inst.varmap.fresh(sym("m", t, r, c));
}

}  // namespace detail

/// Gate-optimal bounded-reachability CNF: k+1 state layers of matrix
/// variables, one control/target column choice per step. Satisfiable iff a
/// plan of exactly k column additions transforms the (permuted, for weak
/// variants) identity into m under the restrictions.
inline CnfInstance encode_count(const ParityMatrix& m, int k, Variant variant,
                                const CouplingGraph& cp) {
  detail::check_encode_args(m, k, variant, cp);
  int n = m.size();
  CnfInstance inst;
  inst.k = k;
  inst.n = n;
  inst.variant = variant;
  inst.metric = Metric::Count;

  detail::allocate_state_vars(inst, n, k);
  for (int t = 0; t < k; ++t) {
    for (int q = 0; q < n; ++q) inst.varmap.fresh(detail::sym("ctrl", t, q));
    for (int q = 0; q < n; ++q) inst.varmap.fresh(detail::sym("tgt", t, q));
  }
  inst.var_count = inst.varmap.count();

  auto mv = [&](int t, int r, int c) {
    return inst.varmap.id(detail::sym("m", t, r, c));
  };
  auto ctrl = [&](int t, int q) {
    return inst.varmap.id(detail::sym("ctrl", t, q));
  };
  auto tgt = [&](int t, int q) {
    return inst.varmap.id(detail::sym("tgt", t, q));
  };

  detail::encode_initial(inst, n, variant);

  auto pairs = detail::update_pairs(n, variant, cp);
  for (int t = 0; t < k; ++t) {
    std::vector<int> cvars, tvars;
    for (int q = 0; q < n; ++q) {
      cvars.push_back(ctrl(t, q));
      tvars.push_back(tgt(t, q));
    }
    detail::exactly_one(inst, cvars, "ctrl" + std::to_string(t));
    detail::exactly_one(inst, tvars, "tgt" + std::to_string(t));
    // Control and target must differ; the SAT layer needs this stated even
    // where the pair restrictions do not cover the diagonal.
    for (int q = 0; q < n; ++q)
      inst.add_clause({-ctrl(t, q), -tgt(t, q)});

    if (variant == Variant::WR) {
      detail::encode_mapped_restrictions(
          inst, n, cp, [&](int p, int q, std::vector<int>& clause) {
            clause.push_back(-ctrl(t, p));
            clause.push_back(-tgt(t, q));
          });
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && !cp.allows(i, j))
            inst.add_clause({-ctrl(t, i), -tgt(t, j)});
    }

    // Target column update: flip where the control row bit is set, copy
    // where it is not.
    for (const auto& [i, j] : pairs) {
      for (int r = 0; r < n; ++r) {
        int ci = ctrl(t, i), tj = tgt(t, j);
        int mi = mv(t, r, i), mj = mv(t, r, j), mj1 = mv(t + 1, r, j);
        inst.add_clause({-ci, -tj, -mi, mj, mj1});
        inst.add_clause({-ci, -tj, -mi, -mj, -mj1});
        inst.add_clause({-ci, -tj, mi, -mj, mj1});
        inst.add_clause({-ci, -tj, mi, mj, -mj1});
      }
    }
    // Untouched columns propagate.
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) {
        inst.add_clause({tgt(t, c), -mv(t, r, c), mv(t + 1, r, c)});
        inst.add_clause({tgt(t, c), mv(t, r, c), -mv(t + 1, r, c)});
      }
  }

  detail::encode_goal(inst, m, k);
  inst.var_count = inst.varmap.count();
  return inst;
}

/// Depth-optimal encoding: one variable per permitted qubit pair per layer,
/// at most one CNOT touching each qubit per layer. Satisfiable iff a k-layer
/// parallel plan reaches m; the makespan is the circuit's CNOT depth.
inline CnfInstance encode_depth(const ParityMatrix& m, int k, Variant variant,
                                const CouplingGraph& cp,
                                const EncodeOptions& opts = {}) {
  detail::check_encode_args(m, k, variant, cp);
  int n = m.size();
  CnfInstance inst;
  inst.k = k;
  inst.n = n;
  inst.variant = variant;
  inst.metric = Metric::Depth;

  // Pairs that get a CNOT variable: restricted pairs are simply disabled by
  // never allocating them, except under weak+restricted where the
  // restriction is symbolic and every pair stays live.
  auto pairs = detail::update_pairs(n, variant, cp);

  detail::allocate_state_vars(inst, n, k);
  for (int t = 0; t < k; ++t) {
    for (const auto& [i, j] : pairs)
      inst.varmap.fresh(detail::sym("cnot", t, i, j));
    for (int q = 0; q < n; ++q) inst.varmap.fresh(detail::sym("tgt", t, q));
  }
  inst.var_count = inst.varmap.count();

  auto mv = [&](int t, int r, int c) {
    return inst.varmap.id(detail::sym("m", t, r, c));
  };
  auto cnot = [&](int t, int i, int j) {
    return inst.varmap.id(detail::sym("cnot", t, i, j));
  };
  auto tgt = [&](int t, int q) {
    return inst.varmap.id(detail::sym("tgt", t, q));
  };

  detail::encode_initial(inst, n, variant);

  for (int t = 0; t < k; ++t) {
    // At most one CNOT touches a qubit per layer.
    for (int q = 0; q < n; ++q) {
      std::vector<int> touching;
      for (const auto& [i, j] : pairs)
        if (i == q || j == q) touching.push_back(cnot(t, i, j));
      detail::at_most_one(inst, touching,
                          "amo" + std::to_string(t) + "q" + std::to_string(q));
    }
    if (opts.alo_layers) {
      std::vector<int> all;
      for (const auto& [i, j] : pairs) all.push_back(cnot(t, i, j));
      detail::at_least_one(inst, all);
    }
    if (variant == Variant::WR) {
      detail::encode_mapped_restrictions(
          inst, n, cp, [&](int p, int q, std::vector<int>& clause) {
            clause.push_back(-cnot(t, p, q));
          });
    }
    // Target marker: tgt[j] holds iff some CNOT targets column j.
    for (int j = 0; j < n; ++j) {
      std::vector<int> sources{-tgt(t, j)};
      for (const auto& [i, j2] : pairs) {
        if (j2 != j) continue;
        sources.push_back(cnot(t, i, j));
        inst.add_clause({-cnot(t, i, j), tgt(t, j)});
      }
      inst.add_clause(std::move(sources));
    }
    for (const auto& [i, j] : pairs) {
      for (int r = 0; r < n; ++r) {
        int a = cnot(t, i, j);
        int mi = mv(t, r, i), mj = mv(t, r, j), mj1 = mv(t + 1, r, j);
        inst.add_clause({-a, -mi, mj, mj1});
        inst.add_clause({-a, -mi, -mj, -mj1});
        inst.add_clause({-a, mi, -mj, mj1});
        inst.add_clause({-a, mi, mj, -mj1});
      }
    }
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) {
        inst.add_clause({tgt(t, c), -mv(t, r, c), mv(t + 1, r, c)});
        inst.add_clause({tgt(t, c), mv(t, r, c), -mv(t + 1, r, c)});
      }
  }

  detail::encode_goal(inst, m, k);
  inst.var_count = inst.varmap.count();
  return inst;
}

/// Reads a plan back out of a satisfying assignment. Inconsistencies with
/// the variable map signal an encoder bug and throw.
inline Plan decode(const std::vector<bool>& model, const CnfInstance& inst) {
  int n = inst.n;
  auto truth = [&](const std::string& s) {
    int id = inst.varmap.id(s);
    if (id >= static_cast<int>(model.size()) && !model.empty())
      throw SolverError("decode: model does not cover variable " + s);
    return model.empty() ? false : model[id];
  };
  Plan plan;
  if (is_weak(inst.variant)) {
    std::vector<int> map(n, -1);
    for (int i = 0; i < n; ++i) {
      for (int p = 0; p < n; ++p) {
        if (truth(detail::sym("m", 0, i, p))) {
          if (map[i] != -1)
            throw SolverError("decode: layer-0 row with two set columns");
          map[i] = p;
        }
      }
      if (map[i] < 0)
        throw SolverError("decode: layer-0 row with no set column");
    }
    plan.input_perm = Permutation(std::move(map));
  }
  for (int t = 0; t < inst.k; ++t) {
    if (inst.metric == Metric::Count) {
      int c = -1, g = -1;
      for (int q = 0; q < n; ++q) {
        if (truth(detail::sym("ctrl", t, q))) {
          if (c != -1) throw SolverError("decode: two control columns set");
          c = q;
        }
        if (truth(detail::sym("tgt", t, q))) {
          if (g != -1) throw SolverError("decode: two target columns set");
          g = q;
        }
      }
      if (c < 0 || g < 0)
        throw SolverError("decode: step without control/target");
      plan.steps.push_back({{c, g}});
    } else {
      std::vector<GatePair> layer;
      std::vector<bool> touched(n, false);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j || !inst.varmap.has(detail::sym("cnot", t, i, j)))
            continue;
          if (!truth(detail::sym("cnot", t, i, j))) continue;
          if (touched[i] || touched[j])
            throw SolverError("decode: overlapping CNOTs in one layer");
          touched[i] = touched[j] = true;
          layer.emplace_back(i, j);
        }
      if (!layer.empty()) plan.steps.push_back(std::move(layer));
    }
  }
  return plan;
}

enum class SearchStatus { Optimal, Timeout };

struct FindResult {
  std::optional<Plan> plan;
  int bound = -1;
  SearchStatus status = SearchStatus::Timeout;
};

namespace detail {

/// Column addition (c -> t) routed over bidirectionally coupled edges:
/// swap c's column next to t, add, swap back. Not optimal; it only has to
/// be a valid plan to cap the search.
class RestrictedRouter {
public:
  RestrictedRouter(int n, const CouplingGraph& cp) : n_(n), adj_(n) {
    for (const auto& [a, b] : cp.pairs())
      if (cp.allows(b, a)) adj_[a].push_back(b);
  }

  std::optional<std::vector<int>> path(int from, int to) const {
    std::vector<int> prev(n_, -1);
    std::vector<int> queue{from};
    prev[from] = from;
    for (size_t h = 0; h < queue.size(); ++h) {
      int u = queue[h];
      if (u == to) break;
      for (int v : adj_[u])
        if (prev[v] < 0) {
          prev[v] = u;
          queue.push_back(v);
        }
    }
    if (prev[to] < 0) return std::nullopt;
    std::vector<int> p{to};
    while (p.back() != from) p.push_back(prev[p.back()]);
    std::reverse(p.begin(), p.end());
    return p;
  }

private:
  int n_;
  std::vector<std::vector<int>> adj_;
};

inline std::optional<Plan> restricted_gauss(const ParityMatrix& m,
                                            const CouplingGraph& cp) {
  int n = m.size();
  auto comp = cp.components();
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (m.get(r, c) && comp[r] != comp[c]) return std::nullopt;

  RestrictedRouter router(n, cp);
  ParityMatrix w = m;
  std::vector<GatePair> ops;
  auto raw = [&](int c, int t) {
    w.apply_cnot(c, t);
    ops.emplace_back(c, t);
  };
  auto swap_cols = [&](int a, int b) {
    raw(a, b);
    raw(b, a);
    raw(a, b);
  };
  auto add = [&](int c, int t) -> bool {
    if (cp.allows(c, t)) {
      raw(c, t);
      return true;
    }
    auto p = router.path(c, t);
    if (!p || p->size() < 2) return false;
    const auto& path = *p;
    for (size_t i = 0; i + 2 < path.size(); ++i) swap_cols(path[i], path[i + 1]);
    raw(path[path.size() - 2], t);
    for (size_t i = path.size() - 2; i-- > 0;) swap_cols(path[i], path[i + 1]);
    return true;
  };

  // Same two-phase scheme as gauss_synth, with routed additions.
  for (int r = 0; r < n; ++r) {
    if (!w.get(r, r)) {
      for (int c = r + 1; c < n; ++c)
        if (w.get(r, c)) {
          if (!add(c, r)) return std::nullopt;
          break;
        }
    }
    for (int c = r + 1; c < n; ++c)
      if (w.get(r, c))
        if (!add(r, c)) return std::nullopt;
  }
  for (int r = n - 1; r >= 0; --r)
    for (int c = 0; c < r; ++c)
      if (w.get(r, c))
        if (!add(r, c)) return std::nullopt;
  if (w != ParityMatrix::identity(n)) return std::nullopt;
  std::vector<GatePair> gates(ops.rbegin(), ops.rend());
  return Plan::from_gates(std::move(gates));
}

/// Upper bound on the optimal gate count, also used to cap the depth loop.
/// Throws when the target is unreachable under the restrictions.
inline int search_cap(const ParityMatrix& m, Variant variant,
                      const CouplingGraph& cp) {
  if (!is_restricted(variant)) return gauss_synth(m).gate_count();
  auto plan = restricted_gauss(m, cp);
  if (plan) return plan->gate_count();
  if (variant == Variant::SR)
    throw std::invalid_argument(
        "target is unreachable under the coupling restrictions");
  // Weak + restricted on a disconnected graph: some input permutation may
  // still make the target reachable. Feasible to enumerate only at small n.
  int n = m.size();
  if (n > 8)
    throw std::invalid_argument(
        "weak synthesis on a disconnected coupling graph is unsupported for n > 8");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  int best = -1;
  do {
    Permutation p{std::vector<int>(perm)};
    // With start Q_p, the gate fold must equal Q_p^{-1} m, which is m with
    // row x moved to row p(x); allowed pairs are CP seen through p.
    ParityMatrix reduced(n);
    for (int x = 0; x < n; ++x)
      for (int c = 0; c < n; ++c)
        if (m.get(x, c)) reduced.set(p(x), c, true);
    auto sub = restricted_gauss(reduced, cp.remapped(p.map()));
    if (sub) {
      int cand = sub->gate_count();
      if (best < 0 || cand < best) best = cand;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best < 0)
    throw std::invalid_argument(
        "target is unreachable under the coupling restrictions");
  return best;
}

}  // namespace detail

/// Ramps k = 0, 1, 2, ... and returns at the first satisfiable bound, which
/// is the optimum. The ramp is capped by a synthesized (non-optimal) plan;
/// decoded plans are replay-verified before being returned.
inline FindResult find_optimum(const ParityMatrix& m, Variant variant,
                               Metric metric, const CouplingGraph& cp,
                               const SolverHandle& solver, double budget_s,
                               const EncodeOptions& opts = {}) {
  if (!is_full_rank(m))
    throw std::invalid_argument("find_optimum: matrix is not full rank");
  int cap = detail::search_cap(m, variant, cp);
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(budget_s);
  for (int k = 0; k <= cap; ++k) {
    double remain = std::chrono::duration<double>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
    if (remain <= 0.0) return {std::nullopt, k, SearchStatus::Timeout};
    CnfInstance inst = metric == Metric::Count
                           ? encode_count(m, k, variant, cp)
                           : encode_depth(m, k, variant, cp, opts);
    SolverHandle h = solver;
    h.time_limit_s = remain;
    SolveResult res = solve_cnf(h, inst);
    if (res.status == SolveStatus::Timeout)
      return {std::nullopt, k, SearchStatus::Timeout};
    if (res.status == SolveStatus::Unsat) continue;
    Plan plan = decode(res.model, inst);
    if (replay(m.size(), plan) != m)
      throw SolverError("decoded plan does not replay to the target matrix");
    WirePlan wire = realize_plan(m.size(), plan);
    if (is_restricted(variant)) {
      for (const auto& step : wire.steps)
        for (const auto& [c, t] : step)
          if (!cp.allows(c, t))
            throw SolverError("decoded plan violates the coupling graph");
    }
    return {std::move(plan), k, SearchStatus::Optimal};
  }
  throw std::logic_error(
      "find_optimum: no bound up to the synthesized cap was satisfiable");
}

}  // namespace cnotforge
