// Acceptance suite: runs every published criterion end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "lazyref/parser.hpp"
#include "lazyref/pretty.hpp"
#include "lazyref/semantics.hpp"
#include "lazyref/smt.hpp"
#include "lazyref/typecheck.hpp"
#include "testers.hpp"

using namespace lazyref;
using logic::Pred;

namespace {

struct Failure {
  std::string detail;
};

void require(bool cond, const std::string& detail) {
  if (!cond) throw Failure{detail};
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(LAZYREF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

tc::Report check_corpus(const std::string& name,
                        tc::CheckMode mode = tc::CheckMode::Sound,
                        std::vector<tc::QueryRecord>* queries = nullptr) {
  tc::Checker checker(mode);
  tc::Report report = checker.check_program(testers::load_corpus(name));
  if (queries) *queries = checker.queries();
  return report;
}

bool semantically_equal(const Pred& a, const Pred& b, const logic::SortMap& decls) {
  smt::Query q;
  q.decls = decls;
  q.lhs = logic::p_bool(true);
  q.goal = logic::p_iff(a, b);
  return smt::builtin_check(q).valid();
}

Pred conj(const std::vector<Pred>& ps) { return logic::p_and_all(ps); }

// Safe random programs with their reports, shared by criteria 6-8.
struct GeneratedProgram {
  std::string source;
  Program program;
  tc::Report report;
};

const std::vector<GeneratedProgram>& safe_generated() {
  static const std::vector<GeneratedProgram> cache = [] {
    std::vector<GeneratedProgram> out;
    testers::ProgramGen gen(20260810);
    int attempts = 0;
    while (out.size() < 1000 && attempts < 30000) {
      ++attempts;
      std::string src = gen.next();
      auto parsed = parse_program(src);
      if (!std::holds_alternative<Program>(parsed)) continue;
      Program p = std::get<Program>(std::move(parsed));
      tc::Checker checker(tc::CheckMode::Sound);
      tc::Report r = checker.check_program(p);
      if (!r.safe()) continue;
      out.push_back({std::move(src), std::move(p), std::move(r)});
    }
    std::fprintf(stderr, "  [generator] %zu safe programs from %d attempts\n",
                 out.size(), attempts);
    return out;
  }();
  return cache;
}

// ---- criteria -------------------------------------------------------------------

// The two worked subtyping queries: bad is rejected by exactly one invalid
// query equivalent to (x>=0 && y>=0) => (v=y) => (v>0); good is accepted via
// the corresponding valid query with v=y+1.
void criterion1() {
  using namespace logic;
  auto t0 = std::chrono::steady_clock::now();

  std::vector<tc::QueryRecord> bad_queries;
  tc::Report bad = check_corpus("bad.lzr", tc::CheckMode::Sound, &bad_queries);
  require(!bad.safe(), "bad.lzr must be unsafe");
  std::size_t failures = 0;
  for (const auto& e : bad.errors)
    if (e.kind == tc::ErrorKind::SubtypingFailed) ++failures;
  require(failures == 1, "expected exactly one subtyping failure, got " +
                             std::to_string(failures));
  const tc::TypeError& err = bad.errors.front();
  require(err.query != nullptr, "failure carries no query");
  require(err.verdict && err.verdict->invalid(), "verdict must be Invalid");

  logic::SortMap decls{{"x", Sort::Int}, {"y", Sort::Int}, {"v", Sort::Int}};
  Pred paper_hyps = p_and(p_cmp(CmpOp::Ge, p_var("x"), p_int(0)),
                          p_cmp(CmpOp::Ge, p_var("y"), p_int(0)));
  require(semantically_equal(conj(err.query->hyps), paper_hyps, decls),
          "hypotheses differ from x>=0 && y>=0");
  require(semantically_equal(err.query->lhs,
                             p_cmp(CmpOp::Eq, p_var("v"), p_var("y")), decls),
          "lhs differs from v=y");
  require(semantically_equal(err.query->goal,
                             p_cmp(CmpOp::Gt, p_var("v"), p_int(0)), decls),
          "goal differs from v>0");

  std::vector<tc::QueryRecord> good_queries;
  tc::Report good = check_corpus("good.lzr", tc::CheckMode::Sound, &good_queries);
  require(good.safe(), "good.lzr must be safe");
  bool found = false;
  for (const auto& record : good_queries) {
    if (!record.verdict.valid()) continue;
    if (semantically_equal(
            record.query.lhs,
            p_cmp(CmpOp::Eq, p_var("v"),
                  p_arith(ArithOp::Add, p_var("y"), p_int(1))),
            decls) &&
        semantically_equal(record.query.goal,
                           p_cmp(CmpOp::Gt, p_var("v"), p_int(0)), decls) &&
        semantically_equal(conj(record.query.hyps), paper_hyps, decls)) {
      found = true;
      break;
    }
  }
  require(found, "good.lzr lacks the valid v=y+1 query");

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  require(elapsed < 1000,
          "builtin backend took " + std::to_string(elapsed) + " ms (>= 1s)");
}

// One program, three simultaneous facts: eager-naive accepts it, sound mode
// rejects it, and running it lazily crashes.
void criterion2() {
  tc::Report naive = check_corpus("foobar.lzr", tc::CheckMode::EagerNaive);
  require(naive.safe(), "eager-naive must accept foobar.lzr");

  tc::Report sound = check_corpus("foobar.lzr", tc::CheckMode::Sound);
  require(!sound.safe(), "sound mode must reject foobar.lzr");

  Program p = testers::load_corpus("foobar.lzr");
  sem::Outcome out = sem::eval(p.desugar(), sem::Strategy::cbn(), 100000);
  require(out.kind == sem::Outcome::Kind::Crash,
          "call-by-name execution must crash");

  std::string corpus = testers::corpus_file("foobar.lzr");
  require(run_cli("check " + corpus + " --mode eager-naive") == 0,
          "CLI eager-naive exit code");
  require(run_cli("check " + corpus) == 1, "CLI sound exit code");
  require(run_cli("run " + corpus + " --strategy cbn") == 4,
          "CLI run exit code must signal the crash");
}

// fib with the default metric: accepted, and the recursive-call obligation
// matches (n>=0 && n/=0 && n/=1) => (v=n-2) => (v>=0 && v<n).
void criterion3() {
  using namespace logic;
  Program p = testers::load_corpus("fib5.lzr");
  require(!p.decls[0].metric.has_value(), "fib must rely on the default metric");

  std::vector<tc::QueryRecord> queries;
  tc::Report r = check_corpus("fib5.lzr", tc::CheckMode::Sound, &queries);
  require(r.safe(), "fib5.lzr must be safe in sound mode");

  logic::SortMap decls{{"n", Sort::Int}, {"v", Sort::Int}};
  Pred paper_hyps =
      p_and(p_cmp(CmpOp::Ge, p_var("n"), p_int(0)),
            p_and(p_not(p_cmp(CmpOp::Eq, p_var("n"), p_int(0))),
                  p_not(p_cmp(CmpOp::Eq, p_var("n"), p_int(1)))));
  Pred paper_lhs = p_cmp(CmpOp::Eq, p_var("v"),
                         p_arith(ArithOp::Sub, p_var("n"), p_int(2)));
  Pred paper_goal = p_and(p_cmp(CmpOp::Ge, p_var("v"), p_int(0)),
                          p_cmp(CmpOp::Lt, p_var("v"), p_var("n")));
  bool found = false;
  for (const auto& record : queries) {
    if (record.query.decls.size() != 2 || !record.query.decls.count("n") ||
        !record.query.decls.count("v"))
      continue;
    if (semantically_equal(record.query.lhs, paper_lhs, decls) &&
        semantically_equal(conj(record.query.hyps), paper_hyps, decls) &&
        semantically_equal(record.query.goal, paper_goal, decls)) {
      require(record.verdict.valid(), "the n-2 obligation must be valid");
      found = true;
    }
  }
  require(found, "the n-2 recursive-call obligation was not emitted");
}

// ack is accepted with the pair metric and rejected with the single metric,
// failing at the `ack (m-1) 1` reset call.
void criterion4() {
  using namespace logic;
  tc::Report good = check_corpus("ack.lzr");
  require(good.safe(), "ack.lzr with decreases [m, n] must be safe");

  tc::Report bad = check_corpus("ack_bad.lzr");
  require(!bad.safe(), "ack_bad.lzr with decreases [n] must be unsafe");
  bool at_reset_call = false;
  for (const auto& e : bad.errors) {
    if (e.kind != tc::ErrorKind::SubtypingFailed || !e.query) continue;
    // The argument at the failing call is the literal 1.
    if (semantically_equal(e.query->lhs, p_cmp(CmpOp::Eq, p_var("v"), p_int(1)),
                           {{"v", Sort::Int}}))
      at_reset_call = true;
  }
  require(at_reset_call, "rejection must point at the `ack (m-1) 1` argument");
}

// The ghost binder's refinement is embedded and discharges the assertion.
void criterion5() {
  using namespace logic;
  std::vector<tc::QueryRecord> queries;
  tc::Report r = check_corpus("baz.lzr", tc::CheckMode::Sound, &queries);
  require(r.safe(), "baz.lzr must be safe in sound mode");
  bool ghost_used = false;
  for (const auto& record : queries) {
    bool hyp_from_ghost = false;
    for (const auto& h : record.query.hyps)
      if (pred_equal(h, p_cmp(CmpOp::Gt, p_var("x"), p_var("y"))))
        hyp_from_ghost = true;
    if (hyp_from_ghost && record.verdict.valid()) ghost_used = true;
  }
  require(ghost_used, "no valid query used the ghost hypothesis x > y");
}

// Crash-freedom: all corpus and >= 1000 generated programs accepted by the
// sound checker run under CBN without crashing.
void criterion6() {
  const std::size_t fuel = 1000000;
  for (const auto& name : testers::corpus_names()) {
    tc::Report r = check_corpus(name);
    if (!r.safe()) continue;
    Program p = testers::load_corpus(name);
    sem::Outcome out = sem::eval(p.desugar(), sem::Strategy::cbn(), fuel);
    require(out.kind != sem::Outcome::Kind::Crash, name + " crashed");
  }
  const auto& generated = safe_generated();
  require(generated.size() >= 1000,
          "generator produced only " + std::to_string(generated.size()) +
              " safe programs");
  for (const auto& g : generated) {
    sem::Outcome out = sem::eval(g.program.desugar(), sem::Strategy::cbn(), fuel);
    require(out.kind != sem::Outcome::Kind::Crash,
            "generated program crashed despite Safe verdict:\n" + g.source);
  }
}

// Termination: a Safe program whose main has a trivial type reaches a value.
void criterion7() {
  const std::size_t fuel = 1000000;
  auto trivially_typed_main = [](const tc::Report& r) {
    return r.bindings.back().termination == tc::TerminationStatus::Trivial;
  };
  for (const auto& name : testers::corpus_names()) {
    tc::Report r = check_corpus(name);
    if (!r.safe() || !trivially_typed_main(r)) continue;
    Program p = testers::load_corpus(name);
    sem::Outcome out = sem::eval(p.desugar(), sem::Strategy::cbn(), fuel);
    require(out.kind == sem::Outcome::Kind::Value,
            name + " has a trivial main but did not terminate");
  }
  for (const auto& g : safe_generated()) {
    if (!trivially_typed_main(g.report)) continue;
    sem::Outcome out = sem::eval(g.program.desugar(), sem::Strategy::cbn(), fuel);
    require(out.kind == sem::Outcome::Kind::Value,
            "generated trivial main failed to terminate:\n" + g.source);
  }
}

// Optimistic evaluation agrees with CBN on constants; no disagreement over
// the corpus or the generated programs.
void criterion8() {
  std::size_t inconclusive = 0, total = 0;
  for (const auto& name : testers::corpus_names()) {
    Program p = testers::load_corpus(name);
    sem::AgreementReport r = sem::compare_strategies(p.desugar(), 200000);
    ++total;
    if (r.kind == sem::AgreementReport::Kind::Inconclusive) ++inconclusive;
    require(r.kind != sem::AgreementReport::Kind::Disagree,
            name + " disagreed: " + r.detail);
  }
  const auto& generated = safe_generated();
  require(generated.size() >= 1000, "not enough generated programs");
  for (const auto& g : generated) {
    sem::AgreementReport r = sem::compare_strategies(g.program.desugar(), 5000);
    ++total;
    if (r.kind == sem::AgreementReport::Kind::Inconclusive) ++inconclusive;
    require(r.kind != sem::AgreementReport::Kind::Disagree,
            "generated program disagreed (" + r.detail + "):\n" + g.source);
  }
  std::fprintf(stderr, "  [criterion 8] inconclusive %zu of %zu\n", inconclusive,
               total);
}

// Builtin verdicts agree with brute-force enumeration on every corpus query
// bounded to [-8, 8], and with an external solver when one is installed.
void criterion9() {
  std::size_t compared = 0;
  const char* solver_env = std::getenv("LAZYREF_SOLVER");
  bool have_external =
      solver_env || std::system("command -v z3 >/dev/null 2>&1") == 0;
  std::string solver_cmd = solver_env ? solver_env : "z3 -in";
  std::size_t external_compared = 0;

  for (const auto& name : testers::corpus_names()) {
    std::vector<tc::QueryRecord> queries;
    check_corpus(name, tc::CheckMode::Sound, &queries);
    for (const auto& record : queries) {
      smt::Query bounded = testers::bounded_query(record.query, -8, 8);
      auto refutable = testers::enumerate_refutable(bounded, -8, 8, 30000000);
      require(refutable.has_value(), "enumeration grid too large for a query");
      smt::Verdict v = smt::builtin_check(bounded);
      require(v.kind != smt::Verdict::Kind::Unknown,
              "builtin returned unknown on a bounded query from " + name);
      require(v.invalid() == *refutable,
              "builtin disagrees with enumeration on " + name + ":\n" +
                  smt::emit_smtlib(bounded));
      ++compared;

      if (have_external) {
        smt::Verdict ext =
            smt::check_valid(record.query, smt::Backend::external(solver_cmd, 10));
        if (ext.kind != smt::Verdict::Kind::Unknown) {
          smt::Verdict builtin = smt::builtin_check(record.query);
          if (builtin.kind != smt::Verdict::Kind::Unknown) {
            require(builtin.kind == ext.kind,
                    "builtin and external verdicts differ on " + name);
            ++external_compared;
          }
        }
      }
    }
  }
  std::fprintf(stderr, "  [criterion 9] %zu queries cross-checked; external: %s\n",
               compared,
               have_external
                   ? (std::to_string(external_compared) + " compared").c_str()
                   : "skipped (no solver installed)");
}

// No emitted query declares a binder of serious base type.
void criterion10() {
  std::size_t scanned = 0;
  for (const auto& name : testers::corpus_names()) {
    std::vector<tc::QueryRecord> queries;
    check_corpus(name, tc::CheckMode::Sound, &queries);
    for (const auto& record : queries) {
      ++scanned;
      for (const auto& serious : record.query.origin.serious_binders)
        require(!record.query.decls.count(serious),
                name + " declared serious binder '" + serious + "'");
    }
  }
  require(scanned > 0, "no queries were scanned");
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<void()> run;
  };
  const Entry criteria[] = {
      {1, "worked subtyping queries (bad invalid, good valid)", criterion1},
      {2, "unsoundness reproduction (naive safe, sound unsafe, CBN crash)",
       criterion2},
      {3, "fib accepted; recursive obligation matches", criterion3},
      {4, "ack metrics (pair accepted, single rejected)", criterion4},
      {5, "ghost binder discharges the assertion", criterion5},
      {6, "crash-freedom property suite", criterion6},
      {7, "termination property suite", criterion7},
      {8, "optimistic equivalence", criterion8},
      {9, "solver cross-validation", criterion9},
      {10, "serious-binder hygiene", criterion10},
  };
  int failures = 0;
  for (const auto& entry : criteria) {
    try {
      entry.run();
      std::printf("[PASS] criterion %2d: %s\n", entry.id, entry.name);
    } catch (const Failure& f) {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s\n       %s\n", entry.id, entry.name,
                  f.detail.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s\n       unexpected error: %s\n",
                  entry.id, entry.name, e.what());
    }
    std::fflush(stdout);
  }
  return failures;
}
