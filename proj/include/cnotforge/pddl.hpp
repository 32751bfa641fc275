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

#include <cctype>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnotforge/cnf.hpp"
#include "cnotforge/coupling.hpp"
#include "cnotforge/gf2.hpp"
#include "cnotforge/plan.hpp"

namespace cnotforge {

/// Domain file with the matrix predicate and the cnot action whose
/// conditional effects flip the target column per row. The unrestricted
/// variant drops the connected predicate and its precondition.
inline std::string emit_domain(Variant variant) {
  if (variant != Variant::S && variant != Variant::SR)
    throw std::invalid_argument(
        "emit_domain: planning covers the strong variants only");
  bool restricted = variant == Variant::SR;
  std::ostringstream os;
  os << "(define (domain cnot-synthesis)\n";
  os << "  (:requirements :strips :typing :equality :conditional-effects)\n";
  os << "  (:types qubit)\n";
  os << "  (:predicates\n";
  os << "    (m ?r ?c - qubit)";
  if (restricted) os << "(connected ?a ?b - qubit)";
  os << ")\n";
  os << "  (:action cnot\n";
  os << "    :parameters (?c ?t - qubit)\n";
  os << "    :precondition (and\n";
  os << "      (not(= ?c ?t))";
  if (restricted) os << "(connected ?c ?t)";
  os << ")\n";
  os << "    :effect (and\n";
  os << "      (forall(?r - qubit)\n";
  os << "        (when (and (m ?r ?c) (m ?r ?t))\n";
  os << "          (not(m ?r ?t))))\n";
  os << "      (forall(?r - qubit)\n";
  os << "        (when (and (m ?r ?c) (not(m ?r ?t)))\n";
  os << "          (m ?r ?t))))))\n";
  return os.str();
}

/// Problem file: objects q0..q(n-1), closed-world init (diagonal m facts plus
/// the connected facts), and the full matrix as the goal with negative
/// literals for the zero entries.
inline std::string emit_problem(const ParityMatrix& m,
                                const std::optional<CouplingGraph>& cp) {
  int n = m.size();
  if (cp && cp->size() != n)
    throw std::invalid_argument("emit_problem: coupling size mismatch");
  auto q = [](int i) { return "q" + std::to_string(i); };
  std::ostringstream os;
  os << "(define (problem cnot-synthesis-instance)\n";
  os << "  (:domain cnot-synthesis)\n";
  os << "  (:objects";
  for (int i = 0; i < n; ++i) os << " " << q(i);
  os << " - qubit)\n";
  os << "  (:init\n   ";
  for (int i = 0; i < n; ++i) os << " (m " << q(i) << " " << q(i) << ")";
  os << "\n";
  if (cp) {
    for (const auto& [a, b] : cp->pairs())
      os << "    (connected " << q(a) << " " << q(b) << ")\n";
  }
  os << "  )\n";
  os << "  (:goal (and\n";
  for (int r = 0; r < n; ++r) {
    os << "   ";
    for (int c = 0; c < n; ++c) {
      if (m.get(r, c))
        os << " (m " << q(r) << " " << q(c) << ")";
      else
        os << " (not(m " << q(r) << " " << q(c) << "))";
    }
    os << "\n";
  }
  os << "  ))\n";
  os << ")\n";
  return os.str();
}

/// Planner output: "(cnot qC qT)" action lines, case-insensitive; blank
/// lines and ';' comments ignored.
inline Plan parse_plan(const std::string& text) {
  Plan plan;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("plan line " + std::to_string(lineno) + ": " +
                                what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto semi = line.find(';');
    if (semi != std::string::npos) line.erase(semi);
    std::string norm;
    for (char c : line)
      norm += (c == '(' || c == ')') ? ' ' : static_cast<char>(std::tolower(
                                                 static_cast<unsigned char>(c)));
    std::istringstream ls(norm);
    std::string action, a, b, extra;
    if (!(ls >> action)) continue;
    if (action != "cnot") fail("unknown action \"" + action + "\"");
    if (!(ls >> a >> b)) fail("cnot needs two objects");
    if (ls >> extra) fail("trailing tokens");
    auto obj = [&](const std::string& s) {
      if (s.size() < 2 || s[0] != 'q') fail("unknown object \"" + s + "\"");
      for (size_t i = 1; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
          fail("unknown object \"" + s + "\"");
      return std::stoi(s.substr(1));
    };
    plan.steps.push_back({{obj(a), obj(b)}});
  }
  return plan;
}

/// True iff the plan replays from the identity to m and, when a coupling
/// graph is given, uses only permitted pairs.
inline bool validate_plan(const ParityMatrix& m, const Plan& plan,
                          const std::optional<CouplingGraph>& cp) {
  int n = m.size();
  ParityMatrix w = ParityMatrix::identity(n);
  for (const auto& step : plan.steps) {
    if (step.size() != 1) return false;
    auto [c, t] = step[0];
    if (c < 0 || t < 0 || c >= n || t >= n || c == t) return false;
    if (cp && !cp->allows(c, t)) return false;
    w.apply_cnot(c, t);
  }
  return w == m;
}

/// Minimal s-expression reader used to sanity-check emitted PDDL: balanced
/// parentheses and tokenization.
struct Sexpr {
  std::string atom;             // set when leaf
  std::vector<Sexpr> children;  // set when list
  bool is_atom() const { return children.empty() && !atom.empty(); }
};

inline Sexpr parse_sexpr(const std::string& text) {
  size_t pos = 0;
  auto skip = [&]() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  auto rec = [&](auto&& self) -> Sexpr {
    skip();
    if (pos >= text.size())
      throw std::invalid_argument("sexpr: unexpected end of input");
    Sexpr node;
    if (text[pos] == '(') {
      ++pos;
      for (;;) {
        skip();
        if (pos >= text.size())
          throw std::invalid_argument("sexpr: unbalanced parenthesis");
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        node.children.push_back(self(self));
      }
    } else {
      while (pos < text.size() && text[pos] != '(' && text[pos] != ')' &&
             !std::isspace(static_cast<unsigned char>(text[pos])))
        node.atom += text[pos++];
    }
    return node;
  };
  Sexpr root = rec(rec);
  skip();
  if (pos != text.size())
    throw std::invalid_argument("sexpr: trailing input after expression");
  return root;
}

/// Parenthesis-aware token stream, for token-for-token structure checks.
inline std::vector<std::string> sexpr_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&]() {
    if (!cur.empty()) {
      tokens.push_back(cur);
      cur.clear();
    }
  };
  for (char c : text) {
    if (c == '(' || c == ')') {
      flush();
      tokens.push_back(std::string(1, c));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return tokens;
}

}  // namespace cnotforge
