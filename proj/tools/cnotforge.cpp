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

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "cnotforge/cnotforge.hpp"

using namespace cnotforge;
using nlohmann::json;

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitTimeout = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

/// Matrix file: first line "n <count>", then n rows of n space-separated
/// bits.
ParityMatrix parse_matrix_file(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int n = 0;
  if (!(in >> tag >> n) || tag != "n" || n < 1)
    throw UsageError("matrix file must start with \"n <count>\"");
  ParityMatrix m(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      int bit;
      if (!(in >> bit) || (bit != 0 && bit != 1))
        throw UsageError("matrix file: expected " + std::to_string(n * n) +
                         " bits");
      if (bit) m.set(r, c, true);
    }
  if (!is_full_rank(m)) throw UsageError("matrix file: matrix is not full rank");
  return m;
}

bool looks_like_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string first;
  in >> first;
  return first == "n";
}

Variant parse_variant(const std::string& s) {
  if (s == "s") return Variant::S;
  if (s == "w") return Variant::W;
  if (s == "sr") return Variant::SR;
  if (s == "wr") return Variant::WR;
  throw UsageError("unknown variant \"" + s + "\" (expected s|w|sr|wr)");
}

Metric parse_metric(const std::string& s) {
  if (s == "count") return Metric::Count;
  if (s == "depth") return Metric::Depth;
  throw UsageError("unknown metric \"" + s + "\" (expected count|depth)");
}

Backend parse_backend(const std::string& s) {
  if (s == "sat") return Backend::Sat;
  if (s == "qbf") return Backend::Qbf;
  if (s == "oracle") return Backend::Oracle;
  throw UsageError("unknown backend \"" + s + "\" (expected sat|qbf|oracle)");
}

struct SynthFlags {
  std::string input;
  std::string variant = "s";
  std::string metric = "count";
  std::string backend = "sat";
  std::string coupling_file;
  int line_n = 0;
  int complete_n = 0;
  double timeout_s = 600.0;
  bool emit_swaps = false;
  std::string output;
  std::string report;
  std::string sat_cmd;
  std::string qbf_cmd;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--input", input, "QASM or matrix file")->required();
    cmd.add_option("--variant", variant, "s|w|sr|wr");
    cmd.add_option("--metric", metric, "count|depth");
    cmd.add_option("--backend", backend, "sat|qbf|oracle");
    cmd.add_option("--coupling", coupling_file, "coupling graph edge list");
    cmd.add_option("--line", line_n, "line coupling graph on N qubits");
    cmd.add_option("--complete", complete_n,
                   "complete coupling graph on N qubits");
    cmd.add_option("--timeout", timeout_s, "budget in seconds");
    cmd.add_flag("--emit-swaps", emit_swaps,
                 "materialize the output permutation as trailing swaps");
    cmd.add_option("--output", output, "output QASM file");
    cmd.add_option("--report", report, "JSON report file");
    cmd.add_option("--sat-cmd", sat_cmd, "external SAT solver command");
    cmd.add_option("--qbf-cmd", qbf_cmd, "external QBF solver command");
  }

  SynthOptions to_options(int n) const {
    SynthOptions o;
    o.variant = parse_variant(variant);
    o.metric = parse_metric(metric);
    o.backend = parse_backend(backend);
    o.budget_s = timeout_s;
    if (!coupling_file.empty())
      o.coupling = parse_coupling(read_file(coupling_file));
    else if (line_n > 0)
      o.coupling = CouplingGraph::line(line_n);
    else if (complete_n > 0)
      o.coupling = CouplingGraph::complete(complete_n);
    if (is_restricted(o.variant)) {
      if (!o.coupling)
        throw UsageError(
            "restricted variants need --coupling, --line or --complete");
      if (o.coupling->size() != n)
        throw UsageError("coupling graph has " +
                         std::to_string(o.coupling->size()) +
                         " qubits, instance has " + std::to_string(n));
    } else if (o.coupling) {
      throw UsageError("variants s and w are unrestricted; drop the coupling flag");
    }
    std::string sat = sat_cmd;
    if (sat.empty())
      if (const char* env = std::getenv("CNOTFORGE_SAT_CMD")) sat = env;
    if (!sat.empty())
      o.sat_solver = SolverHandle{SolverHandle::Kind::Sat, sat, timeout_s, ""};
    std::string qbf = qbf_cmd;
    if (qbf.empty())
      if (const char* env = std::getenv("CNOTFORGE_QBF_CMD")) qbf = env;
    if (!qbf.empty())
      o.qbf_solver = SolverHandle{SolverHandle::Kind::Qbf, qbf, timeout_s, ""};
    return o;
  }
};

struct SynthInput {
  ParityMatrix matrix{1};
  std::optional<Circuit> circuit;
};

SynthInput load_input(const std::string& path) {
  std::string text = read_file(path);
  SynthInput in;
  if (looks_like_matrix(text)) {
    in.matrix = parse_matrix_file(text);
  } else {
    Circuit c = parse_qasm(text);
    in.matrix = c.parity_matrix();
    in.circuit = std::move(c);
  }
  return in;
}

/// Append swap gates realizing the output permutation, leaving a strongly
/// equivalent circuit.
void materialize_swaps(Circuit& c, const Permutation& perm) {
  int n = perm.size();
  std::vector<int> wire_of(n);  // wire currently holding logical output i
  for (int i = 0; i < n; ++i) wire_of[i] = perm(i);
  std::vector<int> logical_at(n);
  for (int i = 0; i < n; ++i) logical_at[wire_of[i]] = i;
  for (int want = 0; want < n; ++want) {
    int w = wire_of[want];
    if (w == want) continue;
    c.gates.push_back(Gate{"swap", {w, want}, {}, ""});
    int displaced = logical_at[want];
    std::swap(logical_at[w], logical_at[want]);
    wire_of[want] = want;
    wire_of[displaced] = w;
  }
  c.output_perm.reset();
}

Circuit plan_to_circuit(int n, const Plan& plan, bool emit_swaps) {
  WirePlan wire = realize_plan(n, plan);
  Circuit c = Circuit::make(n);
  for (const auto& step : wire.steps)
    for (const auto& [ctrl, tgt] : step)
      c.gates.push_back(Gate{"cx", {ctrl, tgt}, {}, ""});
  if (!wire.output_perm.is_identity()) c.output_perm = wire.output_perm;
  if (emit_swaps && c.output_perm) materialize_swaps(c, wire.output_perm);
  return c;
}

json metrics_json(const Metrics& m) {
  return json{{"cnot_count", m.cnot_count},
              {"depth", m.depth},
              {"cnot_depth", m.cnot_depth}};
}

json permutation_json(const Permutation& p) {
  json arr = json::array();
  for (int v : p.map()) arr.push_back(v);
  return arr;
}

int cmd_synth(const SynthFlags& flags, std::optional<int> fixed_k) {
  SynthInput in = load_input(flags.input);
  int n = in.matrix.size();
  SynthOptions opts = flags.to_options(n);
  auto t0 = std::chrono::steady_clock::now();

  FindResult found;
  if (fixed_k) {
    if (opts.backend == Backend::Oracle)
      throw UsageError("--k fixed-bound mode works with sat or qbf backends");
    const CouplingGraph cp =
        opts.coupling ? *opts.coupling : CouplingGraph::complete(n);
    if (opts.backend == Backend::Qbf) {
      if (is_weak(opts.variant))
        throw UsageError("weak variants are not offered in QBF");
      QbfInstance q =
          encode_qbf(in.matrix, *fixed_k, opts.variant, opts.metric, cp);
      auto res = builtin_sat(expand_universals(q), opts.budget_s);
      if (res.status == SolveStatus::Timeout) return kExitTimeout;
      if (res.status == SolveStatus::Unsat) {
        std::cout << "unsatisfiable at k=" << *fixed_k << "\n";
        return kExitVerifyFailed;
      }
      found = {decode_outer(res.model, q), *fixed_k, SearchStatus::Optimal};
    } else {
      CnfInstance inst =
          opts.metric == Metric::Count
              ? encode_count(in.matrix, *fixed_k, opts.variant, cp)
              : encode_depth(in.matrix, *fixed_k, opts.variant, cp);
      SolverHandle sat = opts.sat_solver
                             ? *opts.sat_solver
                             : SolverHandle::builtin_sat(opts.budget_s);
      sat.time_limit_s = opts.budget_s;
      auto res = solve_cnf(sat, inst);
      if (res.status == SolveStatus::Timeout) return kExitTimeout;
      if (res.status == SolveStatus::Unsat) {
        std::cout << "unsatisfiable at k=" << *fixed_k << "\n";
        return kExitVerifyFailed;
      }
      Plan plan = decode(res.model, inst);
      if (replay(n, plan) != in.matrix)
        throw SolverError("decoded plan does not replay to the target");
      found = {std::move(plan), *fixed_k, SearchStatus::Optimal};
    }
  } else {
    found = synthesize_matrix(in.matrix, opts);
  }
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (found.status == SearchStatus::Timeout) {
    std::cout << "timeout after k=" << found.bound << " without a plan\n";
    return kExitTimeout;
  }

  Circuit out = plan_to_circuit(n, *found.plan, flags.emit_swaps);
  std::cout << (fixed_k ? "satisfiable" : "optimal") << " CNOT "
            << (opts.metric == Metric::Count ? "count" : "depth") << ": "
            << found.bound << "\n";
  if (in.circuit) {
    Permutation p =
        out.output_perm ? *out.output_perm : Permutation::identity(n);
    if (!verify(*in.circuit, out, p))
      throw SolverError("internal check failed: output does not verify");
  }
  std::string text = emit_qasm(out);
  if (flags.output.empty())
    std::cout << text;
  else
    write_file(flags.output, text);
  if (!flags.report.empty()) {
    json rep{{"input", flags.input},
             {"n", n},
             {"variant", flags.variant},
             {"metric", flags.metric},
             {"backend", flags.backend},
             {"bound", found.bound},
             {"status", "optimal"},
             {"wall_time_s", wall},
             {"cnot_count", out.cnot_count()}};
    rep["output_permutation"] = permutation_json(
        out.output_perm ? *out.output_perm : Permutation::identity(n));
    write_file(flags.report, rep.dump(2) + "\n");
  }
  return 0;
}

int cmd_peephole(const SynthFlags& flags, int jobs) {
  Circuit c = parse_qasm(read_file(flags.input));
  SynthOptions opts = flags.to_options(c.n);
  PeepholeResult res = optimize(c, opts, jobs);

  Circuit out = res.circuit;
  if (flags.emit_swaps && out.output_perm)
    materialize_swaps(out, *out.output_perm);

  auto print_row = [](const char* name, int before, int after) {
    std::cout << name << ": " << before << " -> " << after << "\n";
  };
  print_row("cnot_count", res.before.cnot_count, res.after.cnot_count);
  print_row("depth", res.before.depth, res.after.depth);
  print_row("cnot_depth", res.before.cnot_depth, res.after.cnot_depth);
  int timeouts = 0;
  for (const auto& rec : res.report)
    if (rec.status == "timeout") ++timeouts;
  if (timeouts > 0)
    std::cout << timeouts << " slice(s) timed out and were kept\n";

  if (!flags.output.empty())
    write_file(flags.output, emit_qasm(out));
  else
    std::cout << emit_qasm(out);

  if (!flags.report.empty()) {
    json slices = json::array();
    for (const auto& rec : res.report)
      slices.push_back(json{{"index", rec.index},
                            {"n_cnots_before", rec.n_cnots_before},
                            {"n_cnots_after", rec.n_cnots_after},
                            {"bound", rec.bound},
                            {"status", rec.status},
                            {"wall_time_s", rec.wall_time_s}});
    json rep{{"input", flags.input},
             {"variant", flags.variant},
             {"metric", flags.metric},
             {"backend", flags.backend},
             {"before", metrics_json(res.before)},
             {"after", metrics_json(res.after)},
             {"output_permutation", permutation_json(res.output_perm)},
             {"peak_rss_mb", res.peak_rss_mb},
             {"slices", slices}};
    write_file(flags.report, rep.dump(2) + "\n");
  }
  return 0;
}

int cmd_encode(const SynthFlags& flags, const std::string& format,
               std::optional<int> k) {
  SynthInput in = load_input(flags.input);
  int n = in.matrix.size();
  SynthOptions opts = flags.to_options(n);
  const CouplingGraph cp =
      opts.coupling ? *opts.coupling : CouplingGraph::complete(n);
  if (flags.output.empty()) throw UsageError("--output is required for encode");

  if (format == "dimacs") {
    if (!k) throw UsageError("--format dimacs needs --k");
    CnfInstance inst = opts.metric == Metric::Count
                           ? encode_count(in.matrix, *k, opts.variant, cp)
                           : encode_depth(in.matrix, *k, opts.variant, cp);
    write_file(flags.output, emit_dimacs(inst));
    std::cout << "wrote " << flags.output << " (" << inst.var_count
              << " vars, " << inst.clauses.size() << " clauses)\n";
    return 0;
  }
  if (format == "qdimacs") {
    if (is_weak(opts.variant))
      throw UsageError("weak variants are not offered in QBF");
    if (!k) throw UsageError("--format qdimacs needs --k");
    QbfInstance q = encode_qbf(in.matrix, *k, opts.variant, opts.metric, cp);
    write_file(flags.output, emit_qdimacs(q));
    std::cout << "wrote " << flags.output << " (" << q.var_count << " vars, "
              << q.clauses.size() << " clauses)\n";
    return 0;
  }
  if (format == "pddl") {
    if (is_weak(opts.variant))
      throw UsageError("weak variants have no planning encoding");
    std::string domain = emit_domain(opts.variant);
    std::string problem = emit_problem(
        in.matrix,
        opts.variant == Variant::SR ? std::optional(cp) : std::nullopt);
    write_file(flags.output + ".domain.pddl", domain);
    write_file(flags.output + ".problem.pddl", problem);
    std::cout << "wrote " << flags.output << ".domain.pddl and "
              << flags.output << ".problem.pddl\n";
    return 0;
  }
  throw UsageError("unknown format \"" + format + "\"");
}

int cmd_verify(const std::string& original_path,
               const std::string& optimized_path,
               const std::string& coupling_file) {
  Circuit original = parse_qasm(read_file(original_path));
  Circuit optimized = parse_qasm(read_file(optimized_path));
  Permutation perm = optimized.output_perm
                         ? *optimized.output_perm
                         : Permutation::identity(optimized.n);
  bool ok = verify(original, optimized, perm);
  if (!coupling_file.empty()) {
    CouplingGraph cp = parse_coupling(read_file(coupling_file));
    for (const auto& g : optimized.gates) {
      if (g.is_cnot() && !cp.allows(g.qubits[0], g.qubits[1])) ok = false;
      if (g.name == "swap" && !cp.allows(g.qubits[0], g.qubits[1]) &&
          !cp.allows(g.qubits[1], g.qubits[0]))
        ok = false;
    }
  }
  std::cout << (ok ? "equivalent" : "not equivalent")
            << (optimized.output_perm ? " (weak, relabeled outputs)"
                                      : " (strong)")
            << "\n";
  return ok ? 0 : kExitVerifyFailed;
}

/// Utility: run the built-in solver on a DIMACS file with the standard exit
/// code and output contract, so the binary itself can stand in as an
/// external solver in tests and pipelines.
int cmd_solve(const std::string& path, double timeout_s) {
  std::istringstream in(read_file(path));
  std::string line;
  int vars = -1;
  std::vector<std::vector<int>> clauses;
  std::vector<int> clause;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == 'e' || line[0] == 'a')
      continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, cnf;
      long nclauses = 0;
      ls >> p >> cnf >> vars >> nclauses;
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        clauses.push_back(clause);
        clause.clear();
      } else {
        clause.push_back(lit);
      }
    }
  }
  if (vars < 0) throw UsageError("not a DIMACS file: missing p-line");
  SatSolver solver(vars);
  for (const auto& cl : clauses) solver.add_clause(cl);
  auto deadline = SatSolver::Clock::now() +
                  std::chrono::duration_cast<SatSolver::Clock::duration>(
                      std::chrono::duration<double>(timeout_s));
  switch (solver.solve(deadline)) {
    case SatSolver::Result::Sat: {
      auto model = solver.model();
      std::cout << "s SATISFIABLE\nv";
      for (int v = 1; v <= vars; ++v) std::cout << " " << (model[v] ? v : -v);
      std::cout << " 0\n";
      return 10;
    }
    case SatSolver::Result::Unsat:
      std::cout << "s UNSATISFIABLE\n";
      return 20;
    case SatSolver::Result::Timeout:
      std::cout << "s UNKNOWN\n";
      return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal CNOT circuit resynthesis"};
  app.require_subcommand(1);

  SynthFlags synth_flags;
  int synth_k = -1;
  auto* synth = app.add_subcommand("synth", "resynthesize one matrix/circuit");
  synth_flags.add_to(*synth);
  synth->add_option("--k", synth_k, "fixed-bound mode: solve this k only");

  SynthFlags peep_flags;
  int jobs = 1;
  auto* peep =
      app.add_subcommand("peephole", "slice-and-replace circuit optimization");
  peep_flags.add_to(*peep);
  peep->add_option("--jobs", jobs, "concurrent slice solves");

  SynthFlags enc_flags;
  std::string enc_format;
  int enc_k = -1;
  auto* enc = app.add_subcommand("encode", "write solver input files");
  enc_flags.add_to(*enc);
  enc->add_option("--format", enc_format, "dimacs|qdimacs|pddl")->required();
  enc->add_option("--k", enc_k, "bound for dimacs/qdimacs");

  std::string verify_original, verify_optimized, verify_coupling;
  auto* ver = app.add_subcommand("verify", "check circuit equivalence");
  ver->add_option("--original", verify_original)->required();
  ver->add_option("--optimized", verify_optimized)->required();
  ver->add_option("--coupling", verify_coupling);

  std::string solve_input;
  double solve_timeout = 600.0;
  auto* sol = app.add_subcommand("solve", "run the built-in solver on DIMACS");
  sol->add_option("--input", solve_input)->required();
  sol->add_option("--timeout", solve_timeout);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed())
      return cmd_synth(synth_flags,
                       synth_k >= 0 ? std::optional(synth_k) : std::nullopt);
    if (peep->parsed()) {
      if (parse_variant(peep_flags.variant) == Variant::WR)
        throw UsageError(
            "peephole optimization does not support variant wr: a slice "
            "permutation invalidates later slices' restrictions");
      return cmd_peephole(peep_flags, jobs);
    }
    if (enc->parsed())
      return cmd_encode(enc_flags, enc_format,
                        enc_k >= 0 ? std::optional(enc_k) : std::nullopt);
    if (ver->parsed())
      return cmd_verify(verify_original, verify_optimized, verify_coupling);
    if (sol->parsed()) return cmd_solve(solve_input, solve_timeout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitUsage;
}
