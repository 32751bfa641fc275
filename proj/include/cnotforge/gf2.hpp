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
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cnotforge {

/// A bijection on {0..n-1}. map()[i] is the image of i.
class Permutation {
public:
  explicit Permutation(std::vector<int> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (int v : map_) {
      if (v < 0 || v >= static_cast<int>(map_.size()) || seen[v])
        throw std::invalid_argument("Permutation: map is not a bijection");
      seen[v] = true;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> m(n);
    for (int i = 0; i < n; ++i) m[i] = i;
    return Permutation(std::move(m));
  }

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int i) const { return map_.at(i); }
  const std::vector<int>& map() const { return map_; }

  bool is_identity() const {
    for (int i = 0; i < size(); ++i)
      if (map_[i] != i) return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<int> inv(map_.size());
    for (int i = 0; i < size(); ++i) inv[map_[i]] = i;
    return Permutation(std::move(inv));
  }

  /// compose(q, p)(i) = q(p(i)).
  static Permutation compose(const Permutation& q, const Permutation& p) {
    if (q.size() != p.size())
      throw std::invalid_argument("Permutation::compose: size mismatch");
    std::vector<int> m(p.size());
    for (int i = 0; i < p.size(); ++i) m[i] = q(p(i));
    return Permutation(std::move(m));
  }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    return a.map_ == b.map_;
  }
  friend bool operator!=(const Permutation& a, const Permutation& b) {
    return !(a == b);
  }

private:
  std::vector<int> map_;
};

/// n x n bit matrix over GF(2), stored one 64-bit word per column so a
/// column addition is a single XOR. Row r = input-qubit parities, column c
/// = output qubit c. Circuit folds keep it in GL_n(F2); raw bit access is
/// provided for matrices under construction (e.g. file input before the
/// rank check).
class ParityMatrix {
public:
  explicit ParityMatrix(int n) : n_(n), cols_(check_size(n), 0) {}

  static ParityMatrix identity(int n) {
    ParityMatrix m(n);
    for (int i = 0; i < n; ++i) m.cols_[i] = word(1) << i;
    return m;
  }

  template <typename Pairs>
  static ParityMatrix from_gate_list(int n, const Pairs& gates) {
    ParityMatrix m = identity(n);
    for (const auto& [ctrl, tgt] : gates) m.apply_cnot(ctrl, tgt);
    return m;
  }

  static ParityMatrix from_rows(const std::vector<std::vector<int>>& rows) {
    int n = static_cast<int>(rows.size());
    ParityMatrix m(n);
    for (int r = 0; r < n; ++r) {
      if (static_cast<int>(rows[r].size()) != n)
        throw std::invalid_argument("ParityMatrix::from_rows: not square");
      for (int c = 0; c < n; ++c)
        if (rows[r][c]) m.set(r, c, true);
    }
    return m;
  }

  int size() const { return n_; }

  bool get(int r, int c) const {
    check_index(r);
    check_index(c);
    return (cols_[c] >> r) & 1;
  }

  void set(int r, int c, bool v) {
    check_index(r);
    check_index(c);
    if (v)
      cols_[c] |= word(1) << r;
    else
      cols_[c] &= ~(word(1) << r);
  }

  uint64_t column(int c) const {
    check_index(c);
    return cols_[c];
  }

  /// Column tgt ^= column ctrl, i.e. CNOT(ctrl, tgt).
  void apply_cnot(int ctrl, int tgt) {
    check_index(ctrl);
    check_index(tgt);
    if (ctrl == tgt)
      throw std::invalid_argument("apply_cnot: control equals target");
    cols_[tgt] ^= cols_[ctrl];
  }

  friend bool operator==(const ParityMatrix& a, const ParityMatrix& b) {
    return a.n_ == b.n_ && a.cols_ == b.cols_;
  }
  friend bool operator!=(const ParityMatrix& a, const ParityMatrix& b) {
    return !(a == b);
  }

  std::string to_string() const {
    std::string s;
    for (int r = 0; r < n_; ++r) {
      for (int c = 0; c < n_; ++c) {
        s += get(r, c) ? '1' : '0';
        s += (c + 1 == n_) ? '\n' : ' ';
      }
    }
    return s;
  }

private:
  using word = uint64_t;

  static int check_size(int n) {
    if (n < 1) throw std::invalid_argument("ParityMatrix: n must be >= 1");
    if (n > 64) throw std::invalid_argument("ParityMatrix: n > 64 unsupported");
    return n;
  }

  void check_index(int i) const {
    if (i < 0 || i >= n_)
      throw std::out_of_range("ParityMatrix: index out of range");
  }

  int n_;
  std::vector<word> cols_;
};

inline ParityMatrix apply_cnot(ParityMatrix m, int ctrl, int tgt) {
  m.apply_cnot(ctrl, tgt);
  return m;
}

inline bool is_full_rank(const ParityMatrix& m) {
  // Gaussian elimination on a scratch copy of the column words.
  int n = m.size();
  std::vector<uint64_t> cols(n);
  for (int c = 0; c < n; ++c) cols[c] = m.column(c);
  int rank = 0;
  for (int r = 0; r < n; ++r) {
    int pivot = -1;
    for (int c = rank; c < n; ++c) {
      if ((cols[c] >> r) & 1) {
        pivot = c;
        break;
      }
    }
    if (pivot < 0) continue;
    std::swap(cols[rank], cols[pivot]);
    for (int c = 0; c < n; ++c)
      if (c != rank && ((cols[c] >> r) & 1)) cols[c] ^= cols[rank];
    ++rank;
  }
  return rank == n;
}

/// Result column p(c) equals input column c.
inline ParityMatrix permute_columns(const ParityMatrix& m, const Permutation& p) {
  if (p.size() != m.size())
    throw std::invalid_argument("permute_columns: size mismatch");
  ParityMatrix out(m.size());
  for (int c = 0; c < m.size(); ++c)
    for (int r = 0; r < m.size(); ++r)
      if (m.get(r, c)) out.set(r, p(c), true);
  return out;
}

inline ParityMatrix permuted_identity(int n, const Permutation& p) {
  return permute_columns(ParityMatrix::identity(n), p);
}

/// The permutation p with permute_columns(a, p) == b, if one exists.
/// Full-rank columns are pairwise distinct, so matching by exact column
/// equality is unique.
inline std::optional<Permutation> weak_match(const ParityMatrix& a,
                                             const ParityMatrix& b) {
  if (a.size() != b.size()) return std::nullopt;
  int n = a.size();
  std::vector<int> map(n, -1);
  std::vector<bool> used(n, false);
  for (int c = 0; c < n; ++c) {
    int found = -1;
    for (int d = 0; d < n; ++d) {
      if (!used[d] && a.column(c) == b.column(d)) {
        found = d;
        break;
      }
    }
    if (found < 0) return std::nullopt;
    map[c] = found;
    used[found] = true;
  }
  return Permutation(std::move(map));
}

/// Random element of GL_n(F2), generated as a fold of random CNOT gates.
/// Closure under column additions makes this exact (never leaves the group).
inline ParityMatrix random_full_rank(int n, std::mt19937& rng,
                                     int gate_count = -1) {
  if (gate_count < 0) gate_count = 3 * n * n;
  ParityMatrix m = ParityMatrix::identity(n);
  if (n < 2) return m;
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int g = 0; g < gate_count; ++g) {
    int c = pick(rng);
    int t = pick(rng);
    if (c == t) continue;
    m.apply_cnot(c, t);
  }
  return m;
}

}  // namespace cnotforge
