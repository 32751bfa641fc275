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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnotforge/cnf.hpp"
#include "cnotforge/sat_solver.hpp"

namespace cnotforge {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SolveStatus { Sat, Unsat, Timeout };

struct SolveResult {
  SolveStatus status = SolveStatus::Timeout;
  std::vector<bool> model;  // indexed by variable; empty unless Sat
};

/// External solver descriptor. An empty command means the built-in solver
/// (SAT only). The command is whitespace-split; a "{file}" token is replaced
/// by the instance path, otherwise the path is appended.
struct SolverHandle {
  enum class Kind { Sat, Qbf };
  Kind kind = Kind::Sat;
  std::string command;
  double time_limit_s = 600.0;
  std::string mem_note;  // advisory only; not enforced on the child

  bool is_builtin() const { return command.empty(); }

  static SolverHandle builtin_sat(double time_limit_s = 600.0) {
    return SolverHandle{Kind::Sat, "", time_limit_s, ""};
  }
};

namespace detail {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs argv with a wall-clock limit. The child gets its own process group
/// and the whole group is killed on expiry, so no orphans survive a timeout.
inline ProcessResult run_process(const std::vector<std::string>& argv,
                                 double timeout_s) {
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw SolverError("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw SolverError("fork() failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    std::fprintf(stderr, "exec failed: %s\n", std::strerror(errno));
    _exit(127);
  }
  setpgid(pid, pid);
  close(out_pipe[1]);
  close(err_pipe[1]);

  ProcessResult res;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(timeout_s);
  struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
  bool open_fd[2] = {true, true};
  char buf[4096];
  while (open_fd[0] || open_fd[1]) {
    auto remain = std::chrono::duration_cast<std::chrono::milliseconds>(
                      deadline - std::chrono::steady_clock::now())
                      .count();
    if (remain <= 0) {
      res.timed_out = true;
      kill(-pid, SIGKILL);
    }
    int rc = poll(fds, 2, res.timed_out ? 100 : static_cast<int>(
                                              std::min<long long>(remain, 200)));
    if (rc < 0 && errno != EINTR) break;
    for (int i = 0; i < 2; ++i) {
      if (!open_fd[i]) continue;
      if (fds[i].revents & (POLLIN | POLLHUP)) {
        ssize_t got = read(fds[i].fd, buf, sizeof(buf));
        if (got > 0) {
          (i == 0 ? res.out : res.err).append(buf, static_cast<size_t>(got));
        } else {
          open_fd[i] = false;
          fds[i].fd = -1;
        }
      }
    }
    if (res.timed_out && !open_fd[0] && !open_fd[1]) break;
  }
  close(out_pipe[0]);
  close(err_pipe[0]);
  // Both pipes are closed; wait out the remaining budget, then kill the
  // whole process group rather than block forever.
  int status = 0;
  for (;;) {
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid || done < 0) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      res.timed_out = true;
      kill(-pid, SIGKILL);
      waitpid(pid, &status, 0);
      break;
    }
    usleep(2000);
  }
  if (res.timed_out)
    res.exit_code = -1;
  else if (WIFEXITED(status))
    res.exit_code = WEXITSTATUS(status);
  else
    res.exit_code = -2;
  return res;
}

inline std::vector<std::string> command_argv(const std::string& command,
                                             const std::string& file) {
  std::vector<std::string> argv;
  std::istringstream in(command);
  std::string tok;
  bool substituted = false;
  while (in >> tok) {
    auto pos = tok.find("{file}");
    if (pos != std::string::npos) {
      tok.replace(pos, 6, file);
      substituted = true;
    }
    argv.push_back(tok);
  }
  if (argv.empty()) throw SolverError("empty solver command");
  if (!substituted) argv.push_back(file);
  return argv;
}

class TempFile {
public:
  explicit TempFile(const std::string& contents, const char* suffix) {
    std::string tmpl = "/tmp/cnotforge-XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    int fd = mkstemp(buf.data());
    if (fd < 0) throw SolverError("mkstemp failed");
    path_ = std::string(buf.data()) + suffix;
    close(fd);
    // Keep the suffixed name; some solvers sniff extensions.
    std::rename(buf.data(), path_.c_str());
    std::ofstream out(path_);
    out << contents;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

/// Values from "v"/"V" lines, indexed by variable. Missing vars stay false.
inline std::vector<bool> parse_value_lines(const std::string& out,
                                           int var_count) {
  std::vector<bool> model(var_count + 1, false);
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || (line[0] != 'v' && line[0] != 'V')) continue;
    std::istringstream ls(line.substr(1));
    long lit = 0;
    while (ls >> lit) {
      if (lit == 0) continue;
      long v = lit > 0 ? lit : -lit;
      if (v <= var_count) model[static_cast<size_t>(v)] = lit > 0;
    }
  }
  return model;
}

}  // namespace detail

/// Built-in DPLL fallback, guarded to small instances.
inline SolveResult builtin_sat(const CnfInstance& inst,
                               double time_limit_s = 600.0) {
  if (inst.var_count > 4000)
    throw std::invalid_argument("builtin_sat: instance above 4000-variable guard");
  SatSolver solver(inst.var_count);
  for (const auto& cl : inst.clauses) solver.add_clause(cl);
  auto deadline = SatSolver::Clock::now() +
                  std::chrono::duration_cast<SatSolver::Clock::duration>(
                      std::chrono::duration<double>(time_limit_s));
  switch (solver.solve(deadline)) {
    case SatSolver::Result::Sat: {
      auto model = solver.model();
      if (!check_model(inst.clauses, model))
        throw SolverError("builtin_sat produced a bad model");
      return {SolveStatus::Sat, std::move(model)};
    }
    case SatSolver::Result::Unsat:
      return {SolveStatus::Unsat, {}};
    case SatSolver::Result::Timeout:
      return {SolveStatus::Timeout, {}};
  }
  throw SolverError("unreachable");
}

/// Writes DIMACS, runs the solver, maps exit code 10/20 to sat/unsat. Every
/// model is checked against the clause list before being returned.
inline SolveResult solve_cnf(const SolverHandle& h, const CnfInstance& inst) {
  if (h.kind != SolverHandle::Kind::Sat)
    throw std::invalid_argument("solve_cnf: handle is not a SAT solver");
  if (h.is_builtin()) return builtin_sat(inst, h.time_limit_s);
  detail::TempFile file(emit_dimacs(inst), ".cnf");
  auto argv = detail::command_argv(h.command, file.path());
  auto proc = detail::run_process(argv, h.time_limit_s);
  if (proc.timed_out) return {SolveStatus::Timeout, {}};
  if (proc.exit_code == 10) {
    auto model = detail::parse_value_lines(proc.out, inst.var_count);
    if (!check_model(inst.clauses, model))
      throw SolverError("external SAT solver model fails the model check:\n" +
                        proc.err);
    return {SolveStatus::Sat, std::move(model)};
  }
  if (proc.exit_code == 20) return {SolveStatus::Unsat, {}};
  throw SolverError("SAT solver protocol error (exit " +
                    std::to_string(proc.exit_code) + ")\nstderr: " + proc.err);
}

enum class QbfStatus { True, False, Timeout };

struct QbfResult {
  QbfStatus status = QbfStatus::Timeout;
  std::optional<std::vector<bool>> outer_model;  // by variable, when emitted
};

/// QDIMACS in, exit code 10 (true) / 20 (false) out; an outer assignment is
/// picked up from any V-lines the solver prints.
inline QbfResult solve_qbf(const SolverHandle& h, const std::string& qdimacs,
                           int var_count) {
  if (h.kind != SolverHandle::Kind::Qbf)
    throw std::invalid_argument("solve_qbf: handle is not a QBF solver");
  if (h.is_builtin())
    throw std::invalid_argument("solve_qbf: no built-in QBF solver");
  detail::TempFile file(qdimacs, ".qdimacs");
  auto argv = detail::command_argv(h.command, file.path());
  auto proc = detail::run_process(argv, h.time_limit_s);
  if (proc.timed_out) return {QbfStatus::Timeout, std::nullopt};
  if (proc.exit_code == 10) {
    QbfResult r{QbfStatus::True, std::nullopt};
    if (proc.out.find("\nV") != std::string::npos ||
        proc.out.rfind("V", 0) == 0 ||
        proc.out.find("\nv") != std::string::npos)
      r.outer_model = detail::parse_value_lines(proc.out, var_count);
    return r;
  }
  if (proc.exit_code == 20) return {QbfStatus::False, std::nullopt};
  throw SolverError("QBF solver protocol error (exit " +
                    std::to_string(proc.exit_code) + ")\nstderr: " + proc.err);
}

}  // namespace cnotforge
