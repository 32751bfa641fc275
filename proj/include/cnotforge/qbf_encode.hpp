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
#include <sstream>
#include <string>
#include <vector>

#include "cnotforge/cnf.hpp"
#include "cnotforge/sat_encode.hpp"
#include "cnotforge/solver.hpp"

namespace cnotforge {

/// Prenex QBF with the fixed block shape of the compact encoding: the whole
/// plan sits in the leading existential block, one universal block holds the
/// binary row selector R, and the inner existentials hold the one-hot row
/// variables plus one symbolic matrix row per time step.
struct QbfInstance {
  struct Block {
    bool existential = true;
    std::vector<int> vars;
  };

  int var_count = 0;
  std::vector<Block> prefix;
  std::vector<std::vector<int>> clauses;
  VarMap varmap;
  int k = 0;
  int n = 0;
  Variant variant = Variant::S;
  Metric metric = Metric::Count;
  ParityMatrix target{1};

  void add_clause(std::vector<int> lits) {
    if (lits.empty())
      throw std::logic_error("QbfInstance: empty clause generated");
    clauses.push_back(std::move(lits));
  }

  const std::vector<int>& outer_vars() const { return prefix.at(0).vars; }
};

namespace detail {

inline int log2_ceil(int n) {
  int b = 0;
  while ((1 << b) < n) ++b;
  return b;
}

}  // namespace detail

/// Compact encoding for the strong variants: actions quantify over k steps,
/// matrix rows collapse into one symbolic row selected by the universal R.
/// Variables grow linearly per time step (vs quadratic in the SAT encoding),
/// clauses quadratically (vs cubic).
inline QbfInstance encode_qbf(const ParityMatrix& m, int k, Variant variant,
                              Metric metric, const CouplingGraph& cp,
                              const EncodeOptions& opts = {}) {
  if (variant != Variant::S && variant != Variant::SR)
    throw std::invalid_argument(
        "encode_qbf: weak variants are not offered in QBF");
  detail::check_encode_args(m, k, variant, cp);
  int n = m.size();
  QbfInstance inst;
  inst.k = k;
  inst.n = n;
  inst.variant = variant;
  inst.metric = metric;
  inst.target = m;

  auto pairs = detail::update_pairs(n, variant, cp);

  // Outer existential block: the plan variables for every time step, with
  // the cardinality auxiliaries they generate.
  for (int t = 0; t < k; ++t) {
    if (metric == Metric::Count) {
      for (int q = 0; q < n; ++q) inst.varmap.fresh(detail::sym("ctrl", t, q));
      for (int q = 0; q < n; ++q) inst.varmap.fresh(detail::sym("tgt", t, q));
    } else {
      for (const auto& [i, j] : pairs)
        inst.varmap.fresh(detail::sym("cnot", t, i, j));
      for (int q = 0; q < n; ++q) inst.varmap.fresh(detail::sym("tgt", t, q));
    }
  }
  auto ctrl = [&](int t, int q) {
    return inst.varmap.id(detail::sym("ctrl", t, q));
  };
  auto tgt = [&](int t, int q) {
    return inst.varmap.id(detail::sym("tgt", t, q));
  };
  auto cnot = [&](int t, int i, int j) {
    return inst.varmap.id(detail::sym("cnot", t, i, j));
  };

  for (int t = 0; t < k; ++t) {
    if (metric == Metric::Count) {
      std::vector<int> cvars, tvars;
      for (int q = 0; q < n; ++q) {
        cvars.push_back(ctrl(t, q));
        tvars.push_back(tgt(t, q));
      }
      detail::exactly_one(inst, cvars, "ctrl" + std::to_string(t));
      detail::exactly_one(inst, tvars, "tgt" + std::to_string(t));
      for (int q = 0; q < n; ++q)
        inst.add_clause({-ctrl(t, q), -tgt(t, q)});
      // Restriction written as a clause per blocked pair; the printed
      // conjunction form would block every action at once.
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && !cp.allows(i, j))
            inst.add_clause({-ctrl(t, i), -tgt(t, j)});
    } else {
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
        if (all.empty()) {
          int x = inst.varmap.fresh("aux[contradiction]");
          inst.add_clause({x});
          inst.add_clause({-x});
        } else {
          detail::at_least_one(inst, all);
        }
      }
      for (int j = 0; j < n; ++j) {
        std::vector<int> sources{-tgt(t, j)};
        for (const auto& [i, j2] : pairs) {
          if (j2 != j) continue;
          sources.push_back(cnot(t, i, j));
          inst.add_clause({-cnot(t, i, j), tgt(t, j)});
        }
        inst.add_clause(std::move(sources));
      }
    }
  }
  QbfInstance::Block outer{true, {}};
  for (int v = 1; v <= inst.varmap.count(); ++v) outer.vars.push_back(v);
  inst.prefix.push_back(std::move(outer));

  // Universal block: binary row selector.
  int bits = detail::log2_ceil(n);
  QbfInstance::Block universal{false, {}};
  for (int b = 0; b < bits; ++b)
    universal.vars.push_back(inst.varmap.fresh("R[" + std::to_string(b) + "]"));
  if (bits > 0) inst.prefix.push_back(std::move(universal));

  // Inner existential block: one-hot row variables, then the symbolic
  // matrix row per time step.
  int inner_first = inst.varmap.count() + 1;
  std::vector<int> rvar(n);
  for (int i = 0; i < n; ++i)
    rvar[i] = inst.varmap.fresh("r[" + std::to_string(i) + "]");
  auto bin_clause = [&](int code) {
    std::vector<int> clause;
    for (int b = 0; b < bits; ++b) {
      int rb = inst.varmap.id("R[" + std::to_string(b) + "]");
      clause.push_back(((code >> b) & 1) ? -rb : rb);
    }
    return clause;
  };
  for (int i = 0; i < n; ++i) {
    auto cl = bin_clause(i);
    cl.push_back(rvar[i]);
    inst.add_clause(std::move(cl));
  }
  // Codes past n never select a row; pin them to a fixed one-hot value so
  // the exactly-one stays satisfiable.
  for (int dead = n; dead < (1 << bits); ++dead) {
    auto cl = bin_clause(dead);
    cl.push_back(rvar[0]);
    inst.add_clause(std::move(cl));
  }
  detail::exactly_one(inst, rvar, "r");

  std::vector<std::vector<int>> mc(k + 1, std::vector<int>(n));
  for (int t = 0; t <= k; ++t)
    for (int i = 0; i < n; ++i)
      mc[t][i] = inst.varmap.fresh(detail::sym("mc", t, i));

  QbfInstance::Block inner{true, {}};
  for (int v = inner_first; v <= inst.varmap.count(); ++v)
    inner.vars.push_back(v);
  inst.prefix.push_back(std::move(inner));

  // Initial state: the symbolic row of the identity is the one-hot row.
  for (int i = 0; i < n; ++i) {
    inst.add_clause({-rvar[i], mc[0][i]});
    inst.add_clause({rvar[i], -mc[0][i]});
  }
  // Goal state per matrix entry, guarded by the row selector.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inst.add_clause({-rvar[i], m.get(i, j) ? mc[k][j] : -mc[k][j]});

  // Transitions: the row-indexed constraints with the row index dropped.
  for (int t = 0; t < k; ++t) {
    if (metric == Metric::Count) {
      for (const auto& [i, j] : pairs) {
        int ci = ctrl(t, i), tj = tgt(t, j);
        inst.add_clause({-ci, -tj, -mc[t][i], mc[t][j], mc[t + 1][j]});
        inst.add_clause({-ci, -tj, -mc[t][i], -mc[t][j], -mc[t + 1][j]});
        inst.add_clause({-ci, -tj, mc[t][i], -mc[t][j], mc[t + 1][j]});
        inst.add_clause({-ci, -tj, mc[t][i], mc[t][j], -mc[t + 1][j]});
      }
    } else {
      for (const auto& [i, j] : pairs) {
        int a = cnot(t, i, j);
        inst.add_clause({-a, -mc[t][i], mc[t][j], mc[t + 1][j]});
        inst.add_clause({-a, -mc[t][i], -mc[t][j], -mc[t + 1][j]});
        inst.add_clause({-a, mc[t][i], -mc[t][j], mc[t + 1][j]});
        inst.add_clause({-a, mc[t][i], mc[t][j], -mc[t + 1][j]});
      }
    }
    for (int i = 0; i < n; ++i) {
      inst.add_clause({tgt(t, i), -mc[t][i], mc[t + 1][i]});
      inst.add_clause({tgt(t, i), mc[t][i], -mc[t + 1][i]});
    }
  }

  inst.var_count = inst.varmap.count();
  return inst;
}

/// QDIMACS text, with the same variable-map comment lines as the DIMACS
/// emitter. Adjacent blocks of the same quantifier are merged.
inline std::string emit_qdimacs(const QbfInstance& inst) {
  std::ostringstream os;
  for (int v = 1; v <= inst.varmap.count(); ++v)
    os << "c var " << v << " = " << inst.varmap.symbol(v) << "\n";
  os << "p cnf " << inst.var_count << " " << inst.clauses.size() << "\n";
  std::vector<QbfInstance::Block> merged;
  for (const auto& b : inst.prefix) {
    if (b.vars.empty()) continue;
    if (!merged.empty() && merged.back().existential == b.existential)
      merged.back().vars.insert(merged.back().vars.end(), b.vars.begin(),
                                b.vars.end());
    else
      merged.push_back(b);
  }
  for (const auto& b : merged) {
    os << (b.existential ? "e" : "a");
    for (int v : b.vars) os << " " << v;
    os << " 0\n";
  }
  for (const auto& cl : inst.clauses) {
    for (int lit : cl) os << lit << " ";
    os << "0\n";
  }
  return os.str();
}

/// Expands the universal block over all row codes: outer variables are
/// shared, everything inner is copied per code, universal literals collapse
/// to constants. The result is satisfiable exactly when the QBF is true,
/// which makes it both the no-external-solver fallback and the semantic
/// cross-check against the flat SAT encoding.
inline CnfInstance expand_universals(const QbfInstance& q) {
  if (q.n > 8)
    throw std::invalid_argument("expand_universals: n > 8 exceeds the budget");
  CnfInstance out;
  out.k = q.k;
  out.n = q.n;
  out.variant = q.variant;
  out.metric = q.metric;

  // Split variables by block kind.
  enum class Kind { Outer, Universal, Inner };
  std::vector<Kind> kind(q.var_count + 1, Kind::Outer);
  bool seen_universal = false;
  for (const auto& b : q.prefix) {
    for (int v : b.vars) {
      if (!b.existential) {
        kind[v] = Kind::Universal;
      } else {
        kind[v] = seen_universal ? Kind::Inner : Kind::Outer;
      }
    }
    if (!b.existential) seen_universal = true;
  }
  std::vector<int> universal_vars;
  for (int v = 1; v <= q.var_count; ++v)
    if (kind[v] == Kind::Universal) universal_vars.push_back(v);

  // Outer variables keep their ids (and symbols).
  for (int v = 1; v <= q.var_count; ++v)
    out.varmap.fresh(kind[v] == Kind::Outer
                         ? q.varmap.symbol(v)
                         : q.varmap.symbol(v) + "@unused");
  int codes = 1 << universal_vars.size();
  for (int code = 0; code < codes; ++code) {
    std::vector<int> copy_id(q.var_count + 1, 0);
    for (int v = 1; v <= q.var_count; ++v)
      if (kind[v] == Kind::Inner)
        copy_id[v] =
            out.varmap.fresh(q.varmap.symbol(v) + "@R=" + std::to_string(code));
    for (const auto& cl : q.clauses) {
      std::vector<int> lits;
      bool satisfied = false;
      for (int lit : cl) {
        int v = lit > 0 ? lit : -lit;
        switch (kind[v]) {
          case Kind::Outer:
            lits.push_back(lit);
            break;
          case Kind::Universal: {
            int b = static_cast<int>(std::find(universal_vars.begin(),
                                               universal_vars.end(), v) -
                                     universal_vars.begin());
            bool value = (code >> b) & 1;
            if (value == (lit > 0)) satisfied = true;
            break;
          }
          case Kind::Inner:
            lits.push_back(lit > 0 ? copy_id[v] : -copy_id[v]);
            break;
        }
      }
      if (satisfied) continue;
      if (lits.empty()) {
        int x = out.varmap.fresh("aux[contradiction]");
        out.add_clause({x});
        out.add_clause({-x});
        continue;
      }
      out.add_clause(std::move(lits));
    }
  }
  out.var_count = out.varmap.count();
  return out;
}

/// Reads the plan out of a winning outer assignment (all plan variables sit
/// in the leading block) and replay-verifies it before returning; a failure
/// signals a corrupt solver certificate.
inline Plan decode_outer(const std::vector<bool>& model,
                         const QbfInstance& inst) {
  int n = inst.n;
  auto truth = [&](const std::string& s) {
    int id = inst.varmap.id(s);
    return id < static_cast<int>(model.size()) && model[id];
  };
  Plan plan;
  for (int t = 0; t < inst.k; ++t) {
    if (inst.metric == Metric::Count) {
      int c = -1, g = -1;
      for (int q = 0; q < n; ++q) {
        if (truth(detail::sym("ctrl", t, q))) {
          if (c != -1)
            throw SolverError("decode_outer: two control columns set");
          c = q;
        }
        if (truth(detail::sym("tgt", t, q))) {
          if (g != -1)
            throw SolverError("decode_outer: two target columns set");
          g = q;
        }
      }
      if (c < 0 || g < 0)
        throw SolverError("decode_outer: step without control/target");
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
            throw SolverError("decode_outer: overlapping CNOTs in one layer");
          touched[i] = touched[j] = true;
          layer.emplace_back(i, j);
        }
      if (!layer.empty()) plan.steps.push_back(std::move(layer));
    }
  }
  if (replay(n, plan) != inst.target)
    throw SolverError("decode_outer: plan does not replay to the target");
  return plan;
}

/// Optimal search over the QBF route. With an external solver the instance
/// goes out as QDIMACS; without one, universal expansion feeds the SAT
/// solver. When a true instance comes back without a usable outer
/// assignment, plan extraction falls back to the SAT encoding at the
/// proven-optimal bound.
inline FindResult find_optimum_qbf(const ParityMatrix& m, Variant variant,
                                   Metric metric, const CouplingGraph& cp,
                                   const std::optional<SolverHandle>& qbf,
                                   const SolverHandle& sat_fallback,
                                   double budget_s,
                                   const EncodeOptions& opts = {}) {
  if (!is_full_rank(m))
    throw std::invalid_argument("find_optimum_qbf: matrix is not full rank");
  int cap = detail::search_cap(m, variant, cp);
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(budget_s);
  for (int k = 0; k <= cap; ++k) {
    double remain = std::chrono::duration<double>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
    if (remain <= 0.0) return {std::nullopt, k, SearchStatus::Timeout};
    QbfInstance inst = encode_qbf(m, k, variant, metric, cp, opts);
    if (qbf) {
      SolverHandle h = *qbf;
      h.time_limit_s = remain;
      QbfResult res = solve_qbf(h, emit_qdimacs(inst), inst.var_count);
      if (res.status == QbfStatus::Timeout)
        return {std::nullopt, k, SearchStatus::Timeout};
      if (res.status == QbfStatus::False) continue;
      if (res.outer_model) {
        try {
          Plan plan = decode_outer(*res.outer_model, inst);
          return {std::move(plan), k, SearchStatus::Optimal};
        } catch (const SolverError&) {
          // Partial or garbled certificate; fall through to the SAT path.
        }
      }
      double rem2 = std::chrono::duration<double>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
      if (rem2 <= 0.0) return {std::nullopt, k, SearchStatus::Timeout};
      CnfInstance flat = metric == Metric::Count
                             ? encode_count(m, k, variant, cp)
                             : encode_depth(m, k, variant, cp, opts);
      SolverHandle sh = sat_fallback;
      sh.time_limit_s = rem2;
      SolveResult sres = solve_cnf(sh, flat);
      if (sres.status != SolveStatus::Sat)
        throw SolverError(
            "QBF solver reported true but the SAT cross-check did not confirm");
      Plan plan = decode(sres.model, flat);
      if (replay(m.size(), plan) != m)
        throw SolverError("decoded plan does not replay to the target matrix");
      return {std::move(plan), k, SearchStatus::Optimal};
    }
    CnfInstance expanded = expand_universals(inst);
    SolverHandle sh = sat_fallback;
    sh.time_limit_s = remain;
    SolveResult res = solve_cnf(sh, expanded);
    if (res.status == SolveStatus::Timeout)
      return {std::nullopt, k, SearchStatus::Timeout};
    if (res.status == SolveStatus::Unsat) continue;
    Plan plan = decode_outer(res.model, inst);
    return {std::move(plan), k, SearchStatus::Optimal};
  }
  throw std::logic_error(
      "find_optimum_qbf: no bound up to the synthesized cap was satisfiable");
}

}  // namespace cnotforge
