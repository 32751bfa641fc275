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

#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cnotforge/circuit.hpp"
#include "helpers.hpp"

using namespace cnotforge;
using namespace cnotforge::testing;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(CNOTFORGE_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp_path(const std::string& name) {
  return "/tmp/cnotforge_cli_" + name;
}

void put(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* example_file() {
  static std::string path = [] {
    std::string p = tmp_path("example.qasm");
    put(p, example_qasm());
    return p;
  }();
  return path.c_str();
}

}  // namespace

TEST_CASE("synth reports the optimal counts of the worked example") {
  SUBCASE("weak") {
    std::string out_file = tmp_path("weak.qasm");
    auto r = run_cli(std::string("synth --input ") + example_file() +
                     " --variant w --output " + out_file);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("optimal CNOT count: 2") != std::string::npos);
    Circuit synthesized = parse_qasm(slurp(out_file));
    CHECK(synthesized.cnot_count() == 2);
    REQUIRE(synthesized.output_perm.has_value());

    auto v = run_cli(std::string("verify --original ") + example_file() +
                     " --optimized " + out_file);
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("equivalent (weak, relabeled outputs)") !=
          std::string::npos);
  }

  SUBCASE("strong restricted on the line") {
    auto r = run_cli(std::string("synth --input ") + example_file() +
                     " --variant sr --line 4 --output " + tmp_path("sr.qasm"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("optimal CNOT count: 8") != std::string::npos);
  }

  SUBCASE("identity matrix file gives an empty circuit") {
    std::string m = tmp_path("id.matrix");
    put(m, "n 3\n1 0 0\n0 1 0\n0 0 1\n");
    auto r = run_cli("synth --input " + m + " --output " + tmp_path("id.qasm"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("optimal CNOT count: 0") != std::string::npos);
    CHECK(parse_qasm(slurp(tmp_path("id.qasm"))).gates.empty());
  }

  SUBCASE("emit-swaps produces a strongly equivalent circuit") {
    std::string out_file = tmp_path("swaps.qasm");
    auto r = run_cli(std::string("synth --input ") + example_file() +
                     " --variant w --emit-swaps --output " + out_file);
    CHECK(r.exit_code == 0);
    std::string text = slurp(out_file);
    CHECK(text.find("swap") != std::string::npos);
    CHECK(text.find("output_permutation") == std::string::npos);
    auto v = run_cli(std::string("verify --original ") + example_file() +
                     " --optimized " + out_file);
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("(strong)") != std::string::npos);
  }

  SUBCASE("fixed-bound mode") {
    auto unsat = run_cli(std::string("synth --input ") + example_file() +
                         " --k 2 --output " + tmp_path("k2.qasm"));
    CHECK(unsat.exit_code == 1);
    CHECK(unsat.out.find("unsatisfiable at k=2") != std::string::npos);
    auto sat = run_cli(std::string("synth --input ") + example_file() +
                       " --k 3 --output " + tmp_path("k3.qasm"));
    CHECK(sat.exit_code == 0);
    CHECK(sat.out.find("satisfiable CNOT count: 3") != std::string::npos);
  }

  SUBCASE("the binary serves as its own external solver") {
    auto r = run_cli(std::string("synth --input ") + example_file() +
                     " --variant w --sat-cmd \"" + CNOTFORGE_CLI_PATH +
                     " solve --input {file}\" --output " +
                     tmp_path("ext.qasm"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("optimal CNOT count: 2") != std::string::npos);
  }
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("synth").exit_code == 2);
  CHECK(run_cli(std::string("synth --input ") + example_file() +
                " --variant zz")
            .exit_code == 2);
  CHECK(run_cli(std::string("synth --input ") + example_file() +
                " --variant sr")
            .exit_code == 2);  // missing coupling
  CHECK(run_cli(std::string("synth --input ") + example_file() +
                " --variant w --line 4")
            .exit_code == 2);  // coupling with an unrestricted variant
  CHECK(run_cli("peephole --input " + std::string(example_file()) +
                " --variant wr --line 4")
            .exit_code == 2);
}

TEST_CASE("peephole command") {
  std::string in_file = tmp_path("mixed.qasm");
  put(in_file,
      "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[4];\n" +
          std::string("cx q[3], q[1];\ncx q[1], q[3];\ncx q[1], q[0];\n") +
          "t q[2];\ncx q[3], q[1];\ncx q[1], q[0];\ncx q[3], q[1];\n");
  std::string out_file = tmp_path("mixed_out.qasm");
  std::string report_file = tmp_path("mixed_report.json");
  auto r = run_cli("peephole --input " + in_file + " --variant w --output " +
                   out_file + " --report " + report_file + " --jobs 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("cnot_count: 6 -> 2") != std::string::npos);

  auto rep = nlohmann::json::parse(slurp(report_file));
  CHECK(rep["before"]["cnot_count"] == 6);
  CHECK(rep["after"]["cnot_count"] == 2);
  CHECK(rep["slices"].size() >= 1);
  for (const auto& s : rep["slices"]) CHECK(s["status"] == "optimal");

  auto v = run_cli("verify --original " + in_file + " --optimized " + out_file);
  CHECK(v.exit_code == 0);
}

TEST_CASE("encode command") {
  SUBCASE("pddl writes a domain and problem pair") {
    std::string base = tmp_path("enc");
    auto r = run_cli(std::string("encode --input ") + example_file() +
                     " --variant sr --line 4 --format pddl --output " + base);
    CHECK(r.exit_code == 0);
    std::string domain = slurp(base + ".domain.pddl");
    std::string problem = slurp(base + ".problem.pddl");
    CHECK(domain.find("connected ?c ?t") != std::string::npos);
    CHECK(problem.find("(m q1 q0)") != std::string::npos);
  }

  SUBCASE("dimacs at k 0 for the identity has no action variables") {
    std::string m = tmp_path("id2.matrix");
    put(m, "n 2\n1 0\n0 1\n");
    std::string out = tmp_path("id2.cnf");
    auto r = run_cli("encode --input " + m + " --format dimacs --k 0 --output " +
                     out);
    CHECK(r.exit_code == 0);
    std::string text = slurp(out);
    CHECK(text.find("ctrl") == std::string::npos);
    CHECK(text.find("p cnf 4") != std::string::npos);
  }

  SUBCASE("qdimacs rejects weak variants") {
    auto r = run_cli(std::string("encode --input ") + example_file() +
                     " --variant w --format qdimacs --k 2 --output " +
                     tmp_path("w.qdimacs"));
    CHECK(r.exit_code == 2);
    auto p = run_cli(std::string("encode --input ") + example_file() +
                     " --variant w --format pddl --output " + tmp_path("w"));
    CHECK(p.exit_code == 2);
  }

  SUBCASE("qdimacs for the strong variant round-trips through solve") {
    std::string out = tmp_path("s.qdimacs");
    auto r = run_cli(std::string("encode --input ") + example_file() +
                     " --format qdimacs --k 3 --output " + out);
    CHECK(r.exit_code == 0);
    CHECK(slurp(out).find("\na ") != std::string::npos);
  }
}

TEST_CASE("verify command") {
  std::string strong_file = tmp_path("strong3.qasm");
  put(strong_file, emit_qasm(gates_to_circuit(4, example_strong_3())));
  auto ok = run_cli(std::string("verify --original ") + example_file() +
                    " --optimized " + strong_file);
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("equivalent (strong)") != std::string::npos);

  std::string empty_file = tmp_path("empty.qasm");
  put(empty_file, "OPENQASM 2.0;\nqreg q[4];\n");
  auto bad = run_cli(std::string("verify --original ") + example_file() +
                     " --optimized " + empty_file);
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.find("not equivalent") != std::string::npos);

  SUBCASE("coupling compliance") {
    std::string coupling = tmp_path("line4.graph");
    put(coupling, "n 4\n0 1\n1 2\n2 3\n");
    std::string line_file = tmp_path("line8.qasm");
    put(line_file, emit_qasm(gates_to_circuit(4, example_line_8())));
    CHECK(run_cli(std::string("verify --original ") + example_file() +
                  " --optimized " + line_file + " --coupling " + coupling)
              .exit_code == 0);
    // The 3-gate strong circuit uses pair (3,1), not on the line.
    CHECK(run_cli(std::string("verify --original ") + example_file() +
                  " --optimized " + strong_file + " --coupling " + coupling)
              .exit_code == 1);
  }

  SUBCASE("parse failures exit 2") {
    std::string junk = tmp_path("junk.qasm");
    put(junk, "this is not qasm\n");
    CHECK(run_cli(std::string("verify --original ") + example_file() +
                  " --optimized " + junk)
              .exit_code == 2);
  }
}

TEST_CASE("repeated runs produce identical circuits") {
  std::string out1 = tmp_path("det1.qasm");
  std::string out2 = tmp_path("det2.qasm");
  for (const auto& out : {out1, out2}) {
    auto r = run_cli(std::string("synth --input ") + example_file() +
                     " --variant w --output " + out);
    REQUIRE(r.exit_code == 0);
  }
  CHECK(slurp(out1) == slurp(out2));
}

TEST_CASE("solve command follows the DIMACS contract") {
  std::string sat_file = tmp_path("sat.cnf");
  put(sat_file, "p cnf 2 2\n1 -2 0\n2 0\n");
  auto sat = run_cli("solve --input " + sat_file);
  CHECK(sat.exit_code == 10);
  CHECK(sat.out.find("s SATISFIABLE") != std::string::npos);
  CHECK(sat.out.find("v ") != std::string::npos);

  std::string unsat_file = tmp_path("unsat.cnf");
  put(unsat_file, "p cnf 1 2\n1 0\n-1 0\n");
  auto unsat = run_cli("solve --input " + unsat_file);
  CHECK(unsat.exit_code == 20);
  CHECK(unsat.out.find("s UNSATISFIABLE") != std::string::npos);
}
