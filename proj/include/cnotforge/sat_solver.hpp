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
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cnotforge {

/// DPLL search with watched-literal unit propagation, first-UIP clause
/// learning, activity-ordered decisions and Luby restarts. Small and
/// self-contained; used as the fallback when no external solver is
/// configured and for differential testing.
class SatSolver {
public:
  enum class Result { Sat, Unsat, Timeout };
  using Clock = std::chrono::steady_clock;

  explicit SatSolver(int var_count)
      : nvars_(var_count),
        values_(var_count, kUnassigned),
        level_(var_count, 0),
        reason_(var_count, -1),
        activity_(var_count, 0.0),
        phase_(var_count, false),
        seen_(var_count, false),
        watches_(2 * static_cast<size_t>(var_count)) {}

  /// Clause in DIMACS literals. Tautologies are dropped, duplicates merged.
  void add_clause(const std::vector<int>& dimacs) {
    std::vector<int> lits;
    lits.reserve(dimacs.size());
    for (int dl : dimacs) {
      int v = dl > 0 ? dl : -dl;
      if (v < 1 || v > nvars_)
        throw std::invalid_argument("SatSolver: literal out of range");
      lits.push_back(2 * (v - 1) + (dl < 0 ? 1 : 0));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (size_t i = 0; i + 1 < lits.size(); ++i)
      if ((lits[i] ^ 1) == lits[i + 1]) return;  // tautology
    if (lits.empty()) {
      root_conflict_ = true;
      return;
    }
    if (lits.size() == 1) {
      pending_units_.push_back(lits[0]);
      return;
    }
    attach(std::move(lits));
  }

  Result solve(std::optional<Clock::time_point> deadline = std::nullopt) {
    if (root_conflict_) return Result::Unsat;
    for (int u : pending_units_) {
      if (lit_false(u)) return Result::Unsat;
      if (!lit_true(u)) enqueue(u, -1);
    }
    pending_units_.clear();
    if (propagate() >= 0) return Result::Unsat;

    int64_t conflicts_until_restart = restart_base_;
    int luby_index = 1;
    for (;;) {
      int confl = propagate();
      if (confl >= 0) {
        ++conflicts_;
        if (current_level() == 0) return Result::Unsat;
        std::vector<int> learnt;
        int back_level = analyze(confl, learnt);
        backtrack(back_level);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          int ci = attach(std::move(learnt));
          enqueue(clauses_[ci].lits[0], ci);
        }
        decay_activities();
        if (--conflicts_until_restart <= 0) {
          conflicts_until_restart = restart_base_ * luby(++luby_index);
          backtrack(0);
        }
        if ((conflicts_ & 0x3ff) == 0 && deadline &&
            Clock::now() > *deadline)
          return Result::Timeout;
      } else {
        int v = pick_branch_var();
        if (v < 0) return Result::Sat;
        trail_lim_.push_back(static_cast<int>(trail_.size()));
        enqueue(2 * v + (phase_[v] ? 0 : 1), -1);
      }
    }
  }

  /// Truth values indexed by variable (entry 0 unused); unassigned vars are
  /// reported false.
  std::vector<bool> model() const {
    std::vector<bool> m(nvars_ + 1, false);
    for (int v = 0; v < nvars_; ++v) m[v + 1] = values_[v] == 1;
    return m;
  }

  int64_t conflicts() const { return conflicts_; }

private:
  static constexpr int8_t kUnassigned = -1;

  struct Clause {
    std::vector<int> lits;
  };

  static int var_of(int lit) { return lit >> 1; }

  bool lit_true(int lit) const {
    int8_t v = values_[var_of(lit)];
    return v != kUnassigned && v == ((lit & 1) ? 0 : 1);
  }
  bool lit_false(int lit) const {
    int8_t v = values_[var_of(lit)];
    return v != kUnassigned && v == ((lit & 1) ? 1 : 0);
  }
  bool lit_unassigned(int lit) const {
    return values_[var_of(lit)] == kUnassigned;
  }

  int current_level() const { return static_cast<int>(trail_lim_.size()); }

  int attach(std::vector<int> lits) {
    int ci = static_cast<int>(clauses_.size());
    watches_[lits[0]].push_back(ci);
    watches_[lits[1]].push_back(ci);
    clauses_.push_back({std::move(lits)});
    return ci;
  }

  void enqueue(int lit, int reason) {
    int v = var_of(lit);
    values_[v] = (lit & 1) ? 0 : 1;
    level_[v] = current_level();
    reason_[v] = reason;
    phase_[v] = values_[v] == 1;
    trail_.push_back(lit);
  }

  int propagate() {
    while (qhead_ < trail_.size()) {
      int fl = trail_[qhead_++] ^ 1;  // literal that just became false
      auto& ws = watches_[fl];
      size_t i = 0, j = 0;
      while (i < ws.size()) {
        int ci = ws[i++];
        auto& cl = clauses_[ci].lits;
        if (cl[0] == fl) std::swap(cl[0], cl[1]);
        if (lit_true(cl[0])) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (size_t m = 2; m < cl.size(); ++m) {
          if (!lit_false(cl[m])) {
            std::swap(cl[1], cl[m]);
            watches_[cl[1]].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = ci;
        if (lit_false(cl[0])) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          return ci;
        }
        enqueue(cl[0], ci);
      }
      ws.resize(j);
    }
    return -1;
  }

  int analyze(int confl, std::vector<int>& learnt) {
    learnt.push_back(0);  // slot for the asserting literal
    int counter = 0;
    int p = -1;
    int index = static_cast<int>(trail_.size()) - 1;
    do {
      const auto& cl = clauses_[confl].lits;
      for (int q : cl) {
        if (q == p) continue;
        int v = var_of(q);
        if (!seen_[v] && level_[v] > 0) {
          seen_[v] = true;
          bump_activity(v);
          if (level_[v] >= current_level())
            ++counter;
          else
            learnt.push_back(q);
        }
      }
      while (!seen_[var_of(trail_[index])]) --index;
      p = trail_[index--];
      seen_[var_of(p)] = false;
      --counter;
      confl = reason_[var_of(p)];
    } while (counter > 0);
    learnt[0] = p ^ 1;

    int back_level = 0;
    if (learnt.size() > 1) {
      size_t max_i = 1;
      for (size_t i = 2; i < learnt.size(); ++i)
        if (level_[var_of(learnt[i])] > level_[var_of(learnt[max_i])]) max_i = i;
      std::swap(learnt[1], learnt[max_i]);
      back_level = level_[var_of(learnt[1])];
    }
    for (size_t i = 1; i < learnt.size(); ++i) seen_[var_of(learnt[i])] = false;
    return back_level;
  }

  void backtrack(int to_level) {
    if (current_level() <= to_level) return;
    int bound = trail_lim_[to_level];
    for (int i = static_cast<int>(trail_.size()) - 1; i >= bound; --i)
      values_[var_of(trail_[i])] = kUnassigned;
    trail_.resize(bound);
    trail_lim_.resize(to_level);
    qhead_ = trail_.size();
  }

  int pick_branch_var() {
    int best = -1;
    double best_act = -1.0;
    for (int v = 0; v < nvars_; ++v) {
      if (values_[v] == kUnassigned && activity_[v] > best_act) {
        best = v;
        best_act = activity_[v];
      }
    }
    return best;
  }

  void bump_activity(int v) {
    activity_[v] += activity_inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      activity_inc_ *= 1e-100;
    }
  }

  void decay_activities() { activity_inc_ /= 0.95; }

  // Sequence 1,1,2,1,1,2,4,1,...
  static int64_t luby(int64_t i) {
    for (;;) {
      int64_t k = 1;
      while (((int64_t(1) << k) - 1) < i) ++k;
      if (((int64_t(1) << k) - 1) == i) return int64_t(1) << (k - 1);
      i -= (int64_t(1) << (k - 1)) - 1;
    }
  }

  int nvars_;
  std::vector<int8_t> values_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<bool> phase_;
  std::vector<bool> seen_;
  std::vector<std::vector<int>> watches_;
  std::vector<Clause> clauses_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::vector<int> pending_units_;
  size_t qhead_ = 0;
  bool root_conflict_ = false;
  int64_t conflicts_ = 0;
  double activity_inc_ = 1.0;
  static constexpr int64_t restart_base_ = 64;
};

}  // namespace cnotforge
