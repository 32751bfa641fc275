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
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnotforge/gf2.hpp"
#include "cnotforge/plan.hpp"

namespace cnotforge {

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line, int col)
      : std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// One gate. "cx" is the only structured gate (exactly two distinct qubits,
/// no params); everything else passes through opaquely with its parameter
/// text kept verbatim. "swap" keeps linear semantics for verification but is
/// otherwise treated as non-CNOT.
struct Gate {
  std::string name;
  std::vector<int> qubits;          // flat indices
  std::vector<std::string> params;  // verbatim parameter text
  std::string ctext;                // classical target of a measure, verbatim

  bool is_cnot() const { return name == "cx"; }

  friend bool operator==(const Gate& a, const Gate& b) {
    return a.name == b.name && a.qubits == b.qubits && a.params == b.params &&
           a.ctext == b.ctext;
  }
};

struct Register {
  std::string name;
  int size = 0;
  friend bool operator==(const Register& a, const Register& b) {
    return a.name == b.name && a.size == b.size;
  }
};

struct Circuit {
  int n = 0;
  std::vector<Gate> gates;
  std::vector<Register> qregs;  // flattened in declaration order
  std::vector<Register> cregs;
  std::optional<Permutation> output_perm;  // trailing relabeling metadata

  int cnot_count() const {
    int c = 0;
    for (const auto& g : gates) c += g.is_cnot() ? 1 : 0;
    return c;
  }

  /// Default single register "q" of the given width.
  static Circuit make(int n) {
    Circuit c;
    c.n = n;
    c.qregs.push_back({"q", n});
    return c;
  }

  std::string qubit_label(int flat) const {
    int off = flat;
    for (const auto& r : qregs) {
      if (off < r.size) return r.name + "[" + std::to_string(off) + "]";
      off -= r.size;
    }
    throw std::out_of_range("qubit index out of range");
  }

  bool gates_equal(const Circuit& o) const {
    return n == o.n && gates == o.gates && qregs == o.qregs &&
           cregs == o.cregs;
  }

  /// Parity matrix of a pure-CNOT circuit.
  ParityMatrix parity_matrix() const {
    ParityMatrix m = ParityMatrix::identity(n);
    for (const auto& g : gates) {
      if (!g.is_cnot())
        throw std::invalid_argument("parity_matrix: non-CNOT gate present");
      m.apply_cnot(g.qubits[0], g.qubits[1]);
    }
    return m;
  }
};

namespace detail {

class QasmLexer {
public:
  explicit QasmLexer(const std::string& text) : text_(text) {}

  struct Token {
    std::string s;
    int line = 0;
    int col = 0;
    bool eof() const { return s.empty(); }
  };

  Token next() {
    skip_space_and_comments();
    Token t{"", line_, col_};
    if (pos_ >= text_.size()) return t;
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        t.s += take();
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '.'))
        t.s += take();
    } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      t.s = "->";
      take();
      take();
    } else if (c == '"') {
      t.s += take();
      while (pos_ < text_.size() && text_[pos_] != '"') t.s += take();
      if (pos_ < text_.size()) t.s += take();
    } else {
      t.s = std::string(1, take());
    }
    return t;
  }

  Token peek() {
    size_t p = pos_;
    int l = line_, c = col_;
    Token t = next();
    pos_ = p;
    line_ = l;
    col_ = c;
    return t;
  }

  /// Raw text until the next ';' (for parameter lists etc.), unconsumed.
  int line() const { return line_; }
  int col() const { return col_; }
  size_t pos() const { return pos_; }
  const std::string& text() const { return text_; }
  char take() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_space_and_comments() {
    for (;;) {
      while (pos_ < text_.size() &&
             std::isspace(static_cast<unsigned char>(text_[pos_])))
        take();
      if (pos_ + 1 < text_.size() && text_[pos_] == '/' &&
          text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') take();
      } else {
        break;
      }
    }
  }

private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

inline std::optional<Permutation> scan_output_perm_comment(
    const std::string& text, int n) {
  const std::string key = "// output_permutation:";
  auto pos = text.rfind(key);
  if (pos == std::string::npos) return std::nullopt;
  auto eol = text.find('\n', pos);
  std::string body = text.substr(pos + key.size(),
                                 eol == std::string::npos ? std::string::npos
                                                          : eol - pos - key.size());
  std::vector<int> map(n, -1);
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto arrow = item.find("->");
    if (arrow == std::string::npos)
      throw std::invalid_argument("malformed output_permutation comment");
    auto num = [](std::string s) {
      s.erase(std::remove_if(s.begin(), s.end(),
                             [](char c) {
                               return !std::isdigit(static_cast<unsigned char>(c));
                             }),
              s.end());
      if (s.empty())
        throw std::invalid_argument("malformed output_permutation comment");
      return std::stoi(s);
    };
    int from = num(item.substr(0, arrow));
    int to = num(item.substr(arrow + 2));
    if (from < 0 || from >= n || to < 0 || to >= n)
      throw std::invalid_argument("output_permutation index out of range");
    map[from] = to;
  }
  return Permutation(map);
}

}  // namespace detail

/// OpenQASM 2.0 subset: header, qreg/creg declarations (qregs flattened into
/// one index space), cx as the structured gate, any other qelib1 application
/// as an opaque gate, measure/barrier/reset preserved. Statements outside the
/// subset (gate definitions, if, non-qelib1 includes, opaque declarations)
/// are rejected with their location.
inline Circuit parse_qasm(const std::string& text) {
  detail::QasmLexer lex(text);
  auto expect = [&](const std::string& s) {
    auto t = lex.next();
    if (t.s != s)
      throw ParseError("expected \"" + s + "\", got \"" + t.s + "\"", t.line,
                       t.col);
  };

  auto t = lex.next();
  if (t.s != "OPENQASM")
    throw ParseError("expected OPENQASM header", t.line, t.col);
  t = lex.next();  // version, e.g. "2" "." "0" came out as "2.0" (digit token)
  if (t.s.empty()) throw ParseError("missing version", t.line, t.col);
  expect(";");

  Circuit circ;
  std::map<std::string, std::pair<int, int>> qreg_at;  // name -> (offset, size)
  std::map<std::string, int> creg_size;

  auto resolve = [&](const std::string& reg, int idx,
                     const detail::QasmLexer::Token& where) {
    auto it = qreg_at.find(reg);
    if (it == qreg_at.end())
      throw ParseError("unknown qreg \"" + reg + "\"", where.line, where.col);
    if (idx < 0 || idx >= it->second.second)
      throw ParseError("qubit index out of range", where.line, where.col);
    return it->second.first + idx;
  };

  struct Arg {
    std::string reg;
    int index = -1;  // -1: whole register
    detail::QasmLexer::Token tok;
  };

  auto parse_arg = [&](detail::QasmLexer::Token first) {
    Arg a;
    a.reg = first.s;
    a.tok = first;
    if (lex.peek().s == "[") {
      lex.next();
      auto num = lex.next();
      try {
        a.index = std::stoi(num.s);
      } catch (...) {
        throw ParseError("expected index", num.line, num.col);
      }
      expect("]");
    }
    return a;
  };

  for (;;) {
    t = lex.next();
    if (t.eof()) break;
    if (t.s == "include") {
      auto file = lex.next();
      if (file.s != "\"qelib1.inc\"")
        throw ParseError("unsupported include " + file.s, file.line, file.col);
      expect(";");
    } else if (t.s == "qreg" || t.s == "creg") {
      bool quantum = t.s == "qreg";
      auto name = lex.next();
      expect("[");
      auto num = lex.next();
      int size = 0;
      try {
        size = std::stoi(num.s);
      } catch (...) {
        throw ParseError("expected register size", num.line, num.col);
      }
      expect("]");
      expect(";");
      if (quantum) {
        if (qreg_at.count(name.s))
          throw ParseError("duplicate qreg", name.line, name.col);
        qreg_at[name.s] = {circ.n, size};
        circ.qregs.push_back({name.s, size});
        circ.n += size;
      } else {
        creg_size[name.s] = size;
        circ.cregs.push_back({name.s, size});
      }
    } else if (t.s == "gate" || t.s == "if" || t.s == "opaque") {
      throw ParseError("unsupported statement \"" + t.s + "\"", t.line, t.col);
    } else if (t.s == "measure") {
      auto q = parse_arg(lex.next());
      expect("->");
      auto c = parse_arg(lex.next());
      expect(";");
      if (!creg_size.count(c.reg))
        throw ParseError("unknown creg \"" + c.reg + "\"", c.tok.line, c.tok.col);
      auto make_ct = [&](int ci) { return c.reg + "[" + std::to_string(ci) + "]"; };
      if (q.index >= 0) {
        if (c.index < 0)
          throw ParseError("measure mixes indexed and whole-register args",
                           c.tok.line, c.tok.col);
        circ.gates.push_back(
            {"measure", {resolve(q.reg, q.index, q.tok)}, {}, make_ct(c.index)});
      } else {
        int qs = qreg_at.count(q.reg) ? qreg_at[q.reg].second : -1;
        if (qs != creg_size[c.reg] || c.index >= 0)
          throw ParseError("measure register sizes differ", q.tok.line,
                           q.tok.col);
        for (int i = 0; i < qs; ++i)
          circ.gates.push_back(
              {"measure", {resolve(q.reg, i, q.tok)}, {}, make_ct(i)});
      }
    } else if (t.s == "barrier") {
      std::vector<int> qs;
      for (;;) {
        auto a = parse_arg(lex.next());
        if (a.index >= 0) {
          qs.push_back(resolve(a.reg, a.index, a.tok));
        } else {
          auto it = qreg_at.find(a.reg);
          if (it == qreg_at.end())
            throw ParseError("unknown qreg \"" + a.reg + "\"", a.tok.line,
                             a.tok.col);
          for (int i = 0; i < it->second.second; ++i)
            qs.push_back(it->second.first + i);
        }
        auto sep = lex.next();
        if (sep.s == ";") break;
        if (sep.s != ",")
          throw ParseError("expected , or ;", sep.line, sep.col);
      }
      circ.gates.push_back({"barrier", qs, {}, ""});
    } else {
      // Gate application: name [ ( params ) ] args ;
      Gate g;
      g.name = t.s;
      if (lex.peek().s == "(") {
        lex.next();
        std::string cur;
        int depth = 1;
        for (;;) {
          auto p = lex.next();
          if (p.eof()) throw ParseError("unterminated parameter list", t.line, t.col);
          if (p.s == "(") ++depth;
          if (p.s == ")") {
            if (--depth == 0) break;
          }
          if (p.s == "," && depth == 1) {
            g.params.push_back(cur);
            cur.clear();
          } else {
            cur += p.s;
          }
        }
        if (!cur.empty() || !g.params.empty()) g.params.push_back(cur);
      }
      std::vector<Arg> args;
      for (;;) {
        auto a = parse_arg(lex.next());
        args.push_back(a);
        auto sep = lex.next();
        if (sep.s == ";") break;
        if (sep.s != ",")
          throw ParseError("expected , or ;", sep.line, sep.col);
      }
      bool broadcast = std::any_of(args.begin(), args.end(),
                                   [](const Arg& a) { return a.index < 0; });
      if (broadcast) {
        if (args.size() != 1)
          throw ParseError("whole-register argument on multi-qubit gate",
                           t.line, t.col);
        auto it = qreg_at.find(args[0].reg);
        if (it == qreg_at.end())
          throw ParseError("unknown qreg \"" + args[0].reg + "\"",
                           args[0].tok.line, args[0].tok.col);
        for (int i = 0; i < it->second.second; ++i) {
          Gate gi = g;
          gi.qubits = {it->second.first + i};
          circ.gates.push_back(std::move(gi));
        }
        continue;
      }
      for (const auto& a : args) g.qubits.push_back(resolve(a.reg, a.index, a.tok));
      for (size_t i = 0; i < g.qubits.size(); ++i)
        for (size_t j = i + 1; j < g.qubits.size(); ++j)
          if (g.qubits[i] == g.qubits[j])
            throw ParseError(g.name == "cx" ? "control equals target"
                                            : "repeated qubit argument",
                             t.line, t.col);
      if (g.name == "CX") g.name = "cx";
      if (g.name == "cx") {
        if (g.qubits.size() != 2)
          throw ParseError("cx takes exactly two qubits", t.line, t.col);
        if (!g.params.empty())
          throw ParseError("cx takes no parameters", t.line, t.col);
      }
      circ.gates.push_back(std::move(g));
    }
  }
  circ.output_perm = detail::scan_output_perm_comment(text, circ.n);
  return circ;
}

inline std::string emit_qasm(const Circuit& c) {
  std::ostringstream os;
  os << "OPENQASM 2.0;\n";
  os << "include \"qelib1.inc\";\n";
  for (const auto& r : c.qregs)
    os << "qreg " << r.name << "[" << r.size << "];\n";
  for (const auto& r : c.cregs)
    os << "creg " << r.name << "[" << r.size << "];\n";
  for (const auto& g : c.gates) {
    os << g.name;
    if (!g.params.empty()) {
      os << "(";
      for (size_t i = 0; i < g.params.size(); ++i)
        os << (i ? "," : "") << g.params[i];
      os << ")";
    }
    for (size_t i = 0; i < g.qubits.size(); ++i)
      os << (i ? ", " : " ") << c.qubit_label(g.qubits[i]);
    if (g.name == "measure") os << " -> " << g.ctext;
    os << ";\n";
  }
  if (c.output_perm && !c.output_perm->is_identity()) {
    os << "// output_permutation:";
    for (int i = 0; i < c.output_perm->size(); ++i)
      os << (i ? ", " : " ") << "q" << i << "->q" << (*c.output_perm)(i);
    os << "\n";
  }
  return os.str();
}

struct Metrics {
  int cnot_count = 0;
  int depth = 0;
  int cnot_depth = 0;
};

/// Depth: longest chain in the shared-qubit dependency DAG. CNOT depth: the
/// same with per-qubit counters that non-CNOT gates propagate (max of
/// operand levels) without incrementing.
inline Metrics metrics(const Circuit& c) {
  Metrics m;
  std::vector<int> level(c.n, 0), cnot_level(c.n, 0);
  for (const auto& g : c.gates) {
    int l = 0, cl = 0;
    for (int q : g.qubits) {
      l = std::max(l, level[q]);
      cl = std::max(cl, cnot_level[q]);
    }
    ++l;
    if (g.is_cnot()) {
      ++cl;
      ++m.cnot_count;
    }
    for (int q : g.qubits) {
      level[q] = l;
      cnot_level[q] = cl;
    }
    m.depth = std::max(m.depth, l);
    m.cnot_depth = std::max(m.cnot_depth, cl);
  }
  return m;
}

/// A maximal CNOT subcircuit followed by the non-CNOT gates assigned to it.
struct Slice {
  std::vector<Gate> cnot_part;
  std::vector<Gate> tail;
};

/// Greedy scan from the top: non-CNOT gates always join the current tail; a
/// CNOT joins the current cnot_part unless it depends, through shared qubits,
/// on something already in the tail — then a new slice starts. Concatenating
/// slices (cnot_part first, then tail) is a topological order of the input.
inline std::vector<Slice> slice(const Circuit& c) {
  std::vector<Slice> out;
  Slice cur;
  std::vector<bool> tainted(c.n, false);
  auto flush = [&]() {
    if (!cur.cnot_part.empty() || !cur.tail.empty()) {
      out.push_back(std::move(cur));
      cur = Slice{};
      std::fill(tainted.begin(), tainted.end(), false);
    }
  };
  for (const auto& g : c.gates) {
    if (g.is_cnot()) {
      bool blocked = std::any_of(g.qubits.begin(), g.qubits.end(),
                                 [&](int q) { return tainted[q]; });
      if (blocked) flush();
      cur.cnot_part.push_back(g);
    } else {
      cur.tail.push_back(g);
      for (int q : g.qubits) tainted[q] = true;
    }
  }
  flush();
  return out;
}

/// A replacement for one slice's cnot_part: gates on the slice's original
/// wire indices plus the column permutation its matrix realizes
/// (fold(gates) == permute_columns(original, perm)).
struct Replacement {
  std::vector<Gate> gates;
  Permutation perm;
};

inline Replacement identity_replacement(const Slice& s, int n) {
  return Replacement{s.cnot_part, Permutation::identity(n)};
}

/// Rebuild the circuit with each cnot_part replaced. After a slice with
/// permutation P, every later gate is relabeled through the accumulated
/// wire map; the composed end-of-circuit permutation is returned alongside.
inline std::pair<Circuit, Permutation> stitch(
    const Circuit& original, const std::vector<Slice>& slices,
    const std::vector<Replacement>& replacements) {
  if (slices.size() != replacements.size())
    throw std::invalid_argument("stitch: one replacement per slice required");
  int n = original.n;
  Circuit out = original;
  out.gates.clear();
  Permutation rho = Permutation::identity(n);  // original wire -> current wire
  for (size_t i = 0; i < slices.size(); ++i) {
    const auto& sl = slices[i];
    const auto& rep = replacements[i];
    ParityMatrix orig = ParityMatrix::identity(n);
    for (const auto& g : sl.cnot_part) orig.apply_cnot(g.qubits[0], g.qubits[1]);
    ParityMatrix got = ParityMatrix::identity(n);
    for (const auto& g : rep.gates) {
      if (!g.is_cnot())
        throw std::invalid_argument("stitch: replacement must be CNOT-only");
      got.apply_cnot(g.qubits[0], g.qubits[1]);
    }
    if (got != permute_columns(orig, rep.perm))
      throw std::invalid_argument(
          "stitch: replacement does not match slice matrix under permutation");
    for (const auto& g : rep.gates) {
      Gate rg = g;
      for (int& q : rg.qubits) q = rho(q);
      out.gates.push_back(std::move(rg));
    }
    rho = Permutation::compose(rho, rep.perm);
    for (const auto& g : sl.tail) {
      Gate rg = g;
      for (int& q : rg.qubits) q = rho(q);
      out.gates.push_back(std::move(rg));
    }
  }
  out.output_perm = rho.is_identity() ? std::nullopt : std::optional(rho);
  return {out, rho};
}

}  // namespace cnotforge
