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

#include <sys/resource.h>

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cnotforge/circuit.hpp"
#include "cnotforge/oracle.hpp"
#include "cnotforge/qbf_encode.hpp"
#include "cnotforge/sat_encode.hpp"

namespace cnotforge {

namespace detail {

/// Symbolic parity propagation over one circuit. Wire values are XOR
/// combinations of input symbols and opaque-gate output symbols; cx and swap
/// are linear, opaque gates introduce fresh symbols at matched anchors.
class ParityTracker {
public:
  explicit ParityTracker(int n) : wires_(n) {
    for (int i = 0; i < n; ++i) wires_[i] = {i};
  }

  void cx(int c, int t) { xor_into(wires_[t], wires_[c]); }
  void swap(int a, int b) { std::swap(wires_[a], wires_[b]); }

  const std::vector<int>& wire(int w) const { return wires_[w]; }
  void assign(int w, int symbol) { wires_[w] = {symbol}; }

private:
  // Sorted symbol lists; XOR is a sorted symmetric difference.
  static void xor_into(std::vector<int>& dst, const std::vector<int>& src) {
    std::vector<int> out;
    out.reserve(dst.size() + src.size());
    size_t i = 0, j = 0;
    while (i < dst.size() && j < src.size()) {
      if (dst[i] < src[j])
        out.push_back(dst[i++]);
      else if (src[j] < dst[i])
        out.push_back(src[j++]);
      else {
        ++i;
        ++j;
      }
    }
    out.insert(out.end(), dst.begin() + i, dst.end());
    out.insert(out.end(), src.begin() + j, src.end());
    dst = std::move(out);
  }

  std::vector<std::vector<int>> wires_;
};

}  // namespace detail

/// Semantic equivalence of two circuits up to the recorded output
/// relabeling: CNOT (and swap) segments are compared as linear maps, and the
/// j-th non-CNOT gates of both circuits must agree on name, parameters and
/// the symbolic parities feeding them. Independent of how the optimizer
/// sliced the circuit.
inline bool verify(const Circuit& original, const Circuit& result,
                   const Permutation& output_perm) {
  if (original.n != result.n || output_perm.size() != original.n) return false;
  int n = original.n;
  detail::ParityTracker a(n), b(n);
  int next_symbol = n;

  auto opaque_like = [](const Gate& g) {
    return !g.is_cnot() && g.name != "swap";
  };
  std::vector<const Gate*> a_opaque, b_opaque;
  for (const auto& g : original.gates)
    if (opaque_like(g)) a_opaque.push_back(&g);
  for (const auto& g : result.gates)
    if (opaque_like(g)) b_opaque.push_back(&g);
  if (a_opaque.size() != b_opaque.size()) return false;

  // Advance one circuit up to (and including) its next opaque anchor.
  auto advance = [&](detail::ParityTracker& st, const std::vector<Gate>& gates,
                     size_t& pos) -> const Gate* {
    while (pos < gates.size()) {
      const Gate& g = gates[pos++];
      if (g.is_cnot()) {
        st.cx(g.qubits[0], g.qubits[1]);
      } else if (g.name == "swap") {
        st.swap(g.qubits[0], g.qubits[1]);
      } else {
        return &g;
      }
    }
    return nullptr;
  };

  size_t pa = 0, pb = 0;
  for (;;) {
    const Gate* ga = advance(a, original.gates, pa);
    const Gate* gb = advance(b, result.gates, pb);
    if (!ga && !gb) break;
    if (!ga || !gb) return false;
    if (ga->name != gb->name || ga->params != gb->params ||
        ga->ctext != gb->ctext || ga->qubits.size() != gb->qubits.size())
      return false;
    for (size_t i = 0; i < ga->qubits.size(); ++i)
      if (a.wire(ga->qubits[i]) != b.wire(gb->qubits[i])) return false;
    // Measure and barrier leave wire values alone; anything else produces
    // unknown-but-equal outputs on the matched operands.
    if (ga->name != "measure" && ga->name != "barrier") {
      for (size_t i = 0; i < ga->qubits.size(); ++i) {
        a.assign(ga->qubits[i], next_symbol);
        b.assign(gb->qubits[i], next_symbol);
        ++next_symbol;
      }
    }
  }
  for (int c = 0; c < n; ++c)
    if (a.wire(c) != b.wire(output_perm(c))) return false;
  return true;
}

enum class Backend { Sat, Qbf, Oracle };

inline std::string to_string(Backend b) {
  switch (b) {
    case Backend::Sat: return "sat";
    case Backend::Qbf: return "qbf";
    case Backend::Oracle: return "oracle";
  }
  return "?";
}

struct SynthOptions {
  Variant variant = Variant::S;
  Metric metric = Metric::Count;
  Backend backend = Backend::Sat;
  std::optional<CouplingGraph> coupling;   // required for restricted variants
  double budget_s = 600.0;                 // wall clock per matrix/slice
  std::optional<SolverHandle> sat_solver;  // absent: built-in solver
  std::optional<SolverHandle> qbf_solver;  // absent: universal expansion
  EncodeOptions encode;
};

/// One matrix through the selected backend.
inline FindResult synthesize_matrix(const ParityMatrix& m,
                                    const SynthOptions& o) {
  if (is_restricted(o.variant) && !o.coupling)
    throw std::invalid_argument(
        "restricted synthesis needs a coupling graph");
  const CouplingGraph cp = is_restricted(o.variant)
                               ? *o.coupling
                               : CouplingGraph::complete(m.size());
  SolverHandle sat =
      o.sat_solver ? *o.sat_solver : SolverHandle::builtin_sat(o.budget_s);
  switch (o.backend) {
    case Backend::Sat:
      return find_optimum(m, o.variant, o.metric, cp, sat, o.budget_s,
                          o.encode);
    case Backend::Qbf:
      return find_optimum_qbf(m, o.variant, o.metric, cp, o.qbf_solver, sat,
                              o.budget_s, o.encode);
    case Backend::Oracle: {
      static ExactOracle oracle;
      Plan p = oracle.plan(m, o.variant, o.metric, cp);
      int bound = o.metric == Metric::Count ? p.gate_count() : p.depth();
      return {std::move(p), bound, SearchStatus::Optimal};
    }
  }
  throw std::logic_error("unreachable");
}

struct SliceRecord {
  int index = 0;
  int n_cnots_before = 0;
  int n_cnots_after = 0;
  int bound = -1;
  std::string status;  // "optimal" or "timeout"
  double wall_time_s = 0.0;
};

struct PeepholeResult {
  Circuit circuit;
  Permutation output_perm{std::vector<int>{0}};
  std::vector<SliceRecord> report;
  Metrics before;
  Metrics after;
  double peak_rss_mb = 0.0;  // this process plus reaped solver children
};

namespace detail {

/// Memory limits are advisory only; the report records what the platform
/// exposes.
inline double peak_rss_mb() {
  rusage self{}, children{};
  getrusage(RUSAGE_SELF, &self);
  getrusage(RUSAGE_CHILDREN, &children);
  return static_cast<double>(std::max(self.ru_maxrss, children.ru_maxrss)) /
         1024.0;
}

}  // namespace detail

/// Slice-and-replace optimization: every maximal CNOT subcircuit is
/// resynthesized under its own budget; slices that time out stay untouched.
/// Weak permutations relabel everything downstream and compose into the
/// returned output permutation. Weak+restricted is rejected: a permutation
/// in one slice can break the connections of later slices.
inline PeepholeResult optimize(const Circuit& c, const SynthOptions& opts,
                               int jobs = 1) {
  if (opts.variant == Variant::WR)
    throw std::invalid_argument(
        "peephole optimization does not support the weak restricted variant: "
        "a slice permutation invalidates later slices' restrictions");
  if (opts.backend == Backend::Qbf && is_weak(opts.variant))
    throw std::invalid_argument("the QBF backend covers the strong variants only");
  if (is_restricted(opts.variant) && !opts.coupling)
    throw std::invalid_argument("restricted synthesis needs a coupling graph");
  if (opts.coupling && opts.coupling->size() != c.n)
    throw std::invalid_argument("coupling graph size does not match circuit");

  auto slices = slice(c);
  std::vector<Replacement> replacements(slices.size(),
                                        Replacement{{}, Permutation::identity(c.n)});
  std::vector<SliceRecord> records(slices.size());

  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= slices.size()) break;
      const auto& sl = slices[i];
      SliceRecord rec;
      rec.index = static_cast<int>(i);
      rec.n_cnots_before = static_cast<int>(sl.cnot_part.size());
      auto t0 = std::chrono::steady_clock::now();
      if (sl.cnot_part.empty()) {
        rec.n_cnots_after = 0;
        rec.bound = 0;
        rec.status = "optimal";
        replacements[i] = identity_replacement(sl, c.n);
      } else {
        ParityMatrix target = ParityMatrix::identity(c.n);
        for (const auto& g : sl.cnot_part)
          target.apply_cnot(g.qubits[0], g.qubits[1]);
        FindResult found = synthesize_matrix(target, opts);
        if (found.status == SearchStatus::Optimal) {
          WirePlan wire = realize_plan(c.n, *found.plan);
          Replacement rep{{}, wire.output_perm};
          for (const auto& step : wire.steps)
            for (const auto& [ctrl, tgt] : step)
              rep.gates.push_back(Gate{"cx", {ctrl, tgt}, {}, ""});
          rec.n_cnots_after = static_cast<int>(rep.gates.size());
          rec.bound = found.bound;
          rec.status = "optimal";
          replacements[i] = std::move(rep);
        } else {
          rec.n_cnots_after = rec.n_cnots_before;
          rec.bound = -1;
          rec.status = "timeout";
          replacements[i] = identity_replacement(sl, c.n);
        }
      }
      rec.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      records[i] = std::move(rec);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  auto [stitched, out_perm] = stitch(c, slices, replacements);
  if (!verify(c, stitched, out_perm))
    throw SolverError("peephole postcondition failed: result does not verify");

  PeepholeResult result;
  result.before = metrics(c);
  result.after = metrics(stitched);
  result.circuit = std::move(stitched);
  result.output_perm = out_perm;
  result.report = std::move(records);
  result.peak_rss_mb = detail::peak_rss_mb();
  return result;
}

}  // namespace cnotforge
