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
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cnotforge {

/// The set CP of ordered (control, target) pairs on which a CNOT may be
/// applied. Immutable after construction.
class CouplingGraph {
public:
  CouplingGraph(int n, std::set<std::pair<int, int>> pairs)
      : n_(n), pairs_(std::move(pairs)) {
    if (n < 1) throw std::invalid_argument("CouplingGraph: n must be >= 1");
    for (const auto& [a, b] : pairs_) {
      if (a == b) throw std::invalid_argument("CouplingGraph: self-pair");
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw std::invalid_argument("CouplingGraph: index out of range");
    }
  }

  static CouplingGraph complete(int n) {
    std::set<std::pair<int, int>> p;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) p.emplace(i, j);
    return CouplingGraph(n, std::move(p));
  }

  static CouplingGraph line(int n) {
    std::set<std::pair<int, int>> p;
    for (int i = 0; i + 1 < n; ++i) {
      p.emplace(i, i + 1);
      p.emplace(i + 1, i);
    }
    return CouplingGraph(n, std::move(p));
  }

  int size() const { return n_; }
  const std::set<std::pair<int, int>>& pairs() const { return pairs_; }
  bool allows(int ctrl, int tgt) const { return pairs_.count({ctrl, tgt}) > 0; }

  bool is_complete() const {
    return static_cast<int>(pairs_.size()) == n_ * (n_ - 1);
  }

  /// Undirected connectivity components of the support graph. Column
  /// additions never mix distinct components, which bounds reachability.
  std::vector<int> components() const {
    std::vector<int> comp(n_);
    for (int i = 0; i < n_; ++i) comp[i] = i;
    // Union-find with path halving.
    auto find = [&](int x) {
      while (comp[x] != x) {
        comp[x] = comp[comp[x]];
        x = comp[x];
      }
      return x;
    };
    for (const auto& [a, b] : pairs_) comp[find(a)] = find(b);
    for (int i = 0; i < n_; ++i) comp[i] = find(i);
    return comp;
  }

  bool is_connected() const {
    auto comp = components();
    return std::all_of(comp.begin(), comp.end(),
                       [&](int c) { return c == comp[0]; });
  }

  /// Pairs seen through a column relabeling: {(p(i), p(j)) : (i,j) in CP}.
  CouplingGraph remapped(const std::vector<int>& p) const {
    std::set<std::pair<int, int>> out;
    for (const auto& [a, b] : pairs_) out.emplace(p.at(a), p.at(b));
    return CouplingGraph(n_, std::move(out));
  }

  std::string emit() const {
    std::ostringstream os;
    os << "n " << n_ << "\n";
    // Undirected edges once, remaining directed pairs with an arrow.
    std::set<std::pair<int, int>> done;
    for (const auto& [a, b] : pairs_) {
      if (done.count({a, b})) continue;
      if (pairs_.count({b, a})) {
        os << a << " " << b << "\n";
        done.emplace(a, b);
        done.emplace(b, a);
      } else {
        os << a << " -> " << b << "\n";
        done.emplace(a, b);
      }
    }
    return os.str();
  }

  friend bool operator==(const CouplingGraph& a, const CouplingGraph& b) {
    return a.n_ == b.n_ && a.pairs_ == b.pairs_;
  }

private:
  int n_;
  std::set<std::pair<int, int>> pairs_;
};

/// Edge-list format: first line "n <count>", then "u v" (undirected, both
/// orders added) or "u -> v" (directed) lines. '#' and blank lines ignored.
inline CouplingGraph parse_coupling(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int n = -1;
  std::set<std::pair<int, int>> pairs;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("coupling file line " + std::to_string(lineno) +
                                ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (n < 0) {
      if (tok != "n") fail("expected header \"n <count>\"");
      if (!(ls >> n) || n < 1) fail("bad qubit count");
      continue;
    }
    int u = 0, v = 0;
    bool directed = false;
    try {
      u = std::stoi(tok);
    } catch (...) {
      fail("malformed edge");
    }
    std::string second;
    if (!(ls >> second)) fail("malformed edge");
    if (second == "->") {
      directed = true;
      if (!(ls >> second)) fail("malformed edge");
    }
    try {
      v = std::stoi(second);
    } catch (...) {
      fail("malformed edge");
    }
    std::string extra;
    if (ls >> extra) fail("trailing tokens");
    if (u == v) fail("self-loop");
    if (u < 0 || v < 0 || u >= n || v >= n) fail("index out of range");
    pairs.emplace(u, v);
    if (!directed) pairs.emplace(v, u);
  }
  if (n < 0) throw std::invalid_argument("coupling file: missing \"n\" header");
  return CouplingGraph(n, std::move(pairs));
}

}  // namespace cnotforge
