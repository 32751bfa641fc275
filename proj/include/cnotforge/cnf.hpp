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

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cnotforge/coupling.hpp"
#include "cnotforge/plan.hpp"

namespace cnotforge {

enum class Variant { S, W, SR, WR };
enum class Metric { Count, Depth };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::S: return "s";
    case Variant::W: return "w";
    case Variant::SR: return "sr";
    case Variant::WR: return "wr";
  }
  return "?";
}

inline std::string to_string(Metric m) {
  return m == Metric::Count ? "count" : "depth";
}

inline bool is_weak(Variant v) { return v == Variant::W || v == Variant::WR; }
inline bool is_restricted(Variant v) {
  return v == Variant::SR || v == Variant::WR;
}

/// Bidirectional map between solver variable ids (1-based) and symbols.
class VarMap {
public:
  int fresh(const std::string& symbol) {
    int id = static_cast<int>(symbols_.size()) + 1;
    symbols_.push_back(symbol);
    by_symbol_.emplace(symbol, id);
    return id;
  }

  int id(const std::string& symbol) const {
    auto it = by_symbol_.find(symbol);
    if (it == by_symbol_.end())
      throw std::out_of_range("VarMap: unknown symbol " + symbol);
    return it->second;
  }

  bool has(const std::string& symbol) const {
    return by_symbol_.count(symbol) > 0;
  }

  const std::string& symbol(int id) const { return symbols_.at(id - 1); }
  int count() const { return static_cast<int>(symbols_.size()); }

private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> by_symbol_;
};

struct CnfInstance {
  int var_count = 0;
  std::vector<std::vector<int>> clauses;
  VarMap varmap;
  int k = 0;
  int n = 0;
  Variant variant = Variant::S;
  Metric metric = Metric::Count;

  void add_clause(std::vector<int> lits) {
    if (lits.empty())
      throw std::logic_error("CnfInstance: empty clause generated");
    clauses.push_back(std::move(lits));
  }
};

namespace detail {

/// Cardinality constraints over a literal group: pairwise for small groups,
/// sequential-counter (ladder) above, with auxiliaries registered in the
/// varmap. The 6-variable crossover keeps small groups propagation-strong
/// without blowing up clause counts on wide instances.
constexpr int kPairwiseLimit = 6;

template <typename Inst>
void at_most_one(Inst& inst, const std::vector<int>& lits,
                 const std::string& tag) {
  int m = static_cast<int>(lits.size());
  if (m <= 1) return;
  if (m <= kPairwiseLimit) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        inst.add_clause({-lits[i], -lits[j]});
    return;
  }
  // s[i] = "some literal with index <= i is true"
  std::vector<int> s(m - 1);
  for (int i = 0; i + 1 < m; ++i)
    s[i] = inst.varmap.fresh("aux[" + tag + "][" + std::to_string(i) + "]");
  inst.var_count = inst.varmap.count();
  inst.add_clause({-lits[0], s[0]});
  for (int i = 1; i + 1 < m; ++i) {
    inst.add_clause({-lits[i], s[i]});
    inst.add_clause({-s[i - 1], s[i]});
    inst.add_clause({-s[i - 1], -lits[i]});
  }
  inst.add_clause({-s[m - 2], -lits[m - 1]});
}

template <typename Inst>
void at_least_one(Inst& inst, const std::vector<int>& lits) {
  inst.add_clause(lits);
}

template <typename Inst>
void exactly_one(Inst& inst, const std::vector<int>& lits,
                 const std::string& tag) {
  at_least_one(inst, lits);
  at_most_one(inst, lits, tag);
}

}  // namespace detail

/// DIMACS with "c var <id> = <symbol>" comment lines for the variable map.
inline std::string emit_dimacs(const CnfInstance& inst) {
  std::ostringstream os;
  for (int v = 1; v <= inst.varmap.count(); ++v)
    os << "c var " << v << " = " << inst.varmap.symbol(v) << "\n";
  os << "p cnf " << inst.var_count << " " << inst.clauses.size() << "\n";
  for (const auto& cl : inst.clauses) {
    for (int lit : cl) os << lit << " ";
    os << "0\n";
  }
  return os.str();
}

/// True iff every clause has a satisfied literal under the assignment
/// (values indexed by variable, entry 0 unused).
inline bool check_model(const std::vector<std::vector<int>>& clauses,
                        const std::vector<bool>& values) {
  for (const auto& cl : clauses) {
    bool sat = false;
    for (int lit : cl) {
      int v = lit > 0 ? lit : -lit;
      if (v >= static_cast<int>(values.size())) continue;
      if (values[v] == (lit > 0)) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace cnotforge
