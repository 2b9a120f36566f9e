// SPDX-License-Identifier: Apache-2.0
#include "qsc/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace qsc {

std::string rat_to_smt(const Rat& r) {
  bool neg = r.sign() < 0;
  Rat a = r.abs();
  std::string body =
      a.is_integer() ? a.num().get_str() : "(/ " + a.num().get_str() + " " + a.den().get_str() + ")";
  return neg ? "(- " + body + ")" : body;
}

std::string poly_to_smt(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (auto& [m, c] : p.terms()) {
    std::vector<std::string> factors;
    if (!c.is_one() || m.factors.empty()) factors.push_back(rat_to_smt(c));
    for (auto& [s, e] : m.factors)
      for (std::uint32_t k = 0; k < e; ++k) factors.push_back(sym_name(s));
    if (factors.size() == 1) {
      terms.push_back(factors[0]);
    } else {
      std::string t = "(*";
      for (auto& f : factors) t += " " + f;
      terms.push_back(t + ")");
    }
  }
  if (terms.size() == 1) return terms[0];
  std::string out = "(+";
  for (auto& t : terms) out += " " + t;
  return out + ")";
}

SmtScript emit_smtlib(const ConstraintSystem& sys) {
  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic QF_NRA)\n";
  std::vector<std::string> decls;
  for (auto s : sys.unknowns) decls.push_back(sym_name(s));
  for (auto s : sys.lambdas) decls.push_back(sym_name(s));
  std::sort(decls.begin(), decls.end());
  decls.erase(std::unique(decls.begin(), decls.end()), decls.end());
  for (auto& d : decls) os << "(declare-const " << d << " Real)\n";
  for (auto s : sys.lambdas) os << "(assert (>= " << sym_name(s) << " 0))\n";
  for (auto& [ctx, eq] : sys.equations) {
    os << "; " << ctx << "\n";
    os << "(assert (= " << poly_to_smt(eq) << " 0))\n";
  }
  for (auto& sc : sys.sides) {
    os << "; " << sc.tag << "\n";
    os << "(assert (" << (sc.strict ? ">" : ">=") << " " << poly_to_smt(sc.expr) << " 0))\n";
  }
  os << "(check-sat)\n(get-model)\n";
  return {os.str()};
}

namespace {

struct Sexp {
  std::string atom;
  std::vector<Sexp> list;
  bool is_atom = false;
};

size_t parse_sexp(const std::string& s, size_t i, Sexp& out) {
  while (i < s.size() && isspace(static_cast<unsigned char>(s[i]))) ++i;
  if (i >= s.size()) return i;
  if (s[i] == '(') {
    ++i;
    out.is_atom = false;
    for (;;) {
      while (i < s.size() && isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size()) break;
      if (s[i] == ')') {
        ++i;
        break;
      }
      Sexp child;
      i = parse_sexp(s, i, child);
      out.list.push_back(std::move(child));
    }
    return i;
  }
  out.is_atom = true;
  size_t j = i;
  while (j < s.size() && !isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')')
    ++j;
  out.atom = s.substr(i, j - i);
  return j;
}

// Evaluates a model value s-expression to an exact rational; returns false
// for irrational values (root-obj and friends).
bool eval_value(const Sexp& e, Rat& out) {
  if (e.is_atom) {
    auto r = Rat::parse(e.atom);
    if (!r) return false;
    out = *r;
    return true;
  }
  if (e.list.empty()) return false;
  const std::string& head = e.list[0].is_atom ? e.list[0].atom : "";
  if (head == "-" && e.list.size() == 2) {
    Rat v;
    if (!eval_value(e.list[1], v)) return false;
    out = -v;
    return true;
  }
  if (head == "/" && e.list.size() == 3) {
    Rat a, b;
    if (!eval_value(e.list[1], a) || !eval_value(e.list[2], b) || b.is_zero()) return false;
    out = a / b;
    return true;
  }
  return false;  // root-obj etc.
}

}  // namespace

SolveResult run_solver(const SmtScript& script, const std::vector<std::string>& argv,
                       double timeout_sec) {
  SolveResult res;
  auto t0 = std::chrono::steady_clock::now();
  if (argv.empty()) {
    res.reason = "no solver configured";
    return res;
  }
  if (timeout_sec <= 0) {
    res.reason = "timeout";
    return res;
  }

  char path[] = "/tmp/qsc-query-XXXXXX.smt2";
  int fd = mkstemps(path, 5);
  if (fd < 0) {
    res.reason = "cannot create temporary query file";
    return res;
  }
  {
    FILE* f = fdopen(fd, "w");
    fwrite(script.text.data(), 1, script.text.size(), f);
    fclose(f);
  }

  int outpipe[2];
  if (pipe(outpipe) != 0) {
    unlink(path);
    res.reason = "pipe failed";
    return res;
  }
  pid_t pid = fork();
  if (pid < 0) {
    unlink(path);
    res.reason = "fork failed";
    return res;
  }
  if (pid == 0) {
    dup2(outpipe[1], STDOUT_FILENO);
    dup2(outpipe[1], STDERR_FILENO);
    close(outpipe[0]);
    close(outpipe[1]);
    std::vector<char*> cargv;
    for (auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    std::string p(path);
    cargv.push_back(p.data());
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    fprintf(stderr, "exec %s failed: %s\n", cargv[0], strerror(errno));
    _exit(127);
  }
  close(outpipe[1]);

  std::string output;
  bool timed_out = false;
  auto deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(timeout_sec));
  char buf[4096];
  for (;;) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    struct pollfd pfd { outpipe[0], POLLIN, 0 };
    int ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
    int rv = poll(&pfd, 1, std::max(1, std::min(ms, 200)));
    if (rv > 0) {
      ssize_t n = read(outpipe[0], buf, sizeof buf);
      if (n <= 0) break;
      output.append(buf, static_cast<size_t>(n));
    }
  }
  if (timed_out) {
    kill(pid, SIGKILL);
  }
  close(outpipe[0]);
  int wstatus = 0;
  waitpid(pid, &wstatus, 0);
  unlink(path);
  res.wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  if (timed_out) {
    res.reason = "timeout";
    return res;
  }

  // First non-comment line is the verdict.
  std::istringstream is(output);
  std::string line, verdict;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == ';') continue;
    verdict = line;
    break;
  }
  if (verdict.rfind("unsat", 0) == 0) {
    res.status = SolveResult::Status::Unsat;
    return res;
  }
  if (verdict.rfind("sat", 0) != 0) {
    res.reason = output.empty() ? "solver produced no output" : "solver: " + verdict;
    return res;
  }

  // Model: every (define-fun name () Real value).
  auto model_pos = output.find('(', output.find("sat"));
  if (model_pos == std::string::npos) {
    res.reason = "sat without model";
    return res;
  }
  Sexp model;
  parse_sexp(output, model_pos, model);
  bool irrational = false;
  for (auto& item : model.list) {
    if (item.is_atom || item.list.size() < 5) continue;
    if (!item.list[0].is_atom || item.list[0].atom != "define-fun") continue;
    const std::string& name = item.list[1].atom;
    Rat v;
    if (!eval_value(item.list.back(), v)) {
      irrational = true;
      continue;
    }
    res.model[name] = v;
  }
  if (irrational) {
    res.reason = "irrational model";
    res.model.clear();
    return res;
  }
  res.status = SolveResult::Status::Sat;
  return res;
}

SolveResult run_solver_with_rational_retry(const SmtScript& script, const ConstraintSystem& sys,
                                           const std::vector<std::string>& argv,
                                           double timeout_sec, std::string* log) {
  SolveResult r = run_solver(script, argv, timeout_sec);
  if (r.status != SolveResult::Status::Unknown || r.reason != "irrational model") return r;
  if (log) *log += "irrational model observed; retrying on the 2^-20 rational grid\n";
  // Constrain every unknown to k/2^20. Integer reasoning leaves QF_NRA, so
  // the retry uses the solver's full logic.
  std::string text = script.text;
  auto pos = text.find("(set-logic QF_NRA)");
  if (pos != std::string::npos) text.replace(pos, 18, "(set-logic ALL)   ");
  std::ostringstream extra;
  for (auto s : sys.unknowns) {
    const std::string& n = sym_name(s);
    extra << "(declare-const " << n << "_grid Int)\n";
    extra << "(assert (= (* " << n << " 1048576) (to_real " << n << "_grid)))\n";
  }
  auto check = text.find("(check-sat)");
  text.insert(check, extra.str());
  SolveResult r2 = run_solver({text}, argv, timeout_sec);
  if (r2.status == SolveResult::Status::Unsat) {
    // The grid restriction is incomplete; report the original inconclusive.
    r2.status = SolveResult::Status::Unknown;
    r2.reason = "irrational model (grid retry unsat)";
  }
  return r2;
}

}  // namespace qsc
