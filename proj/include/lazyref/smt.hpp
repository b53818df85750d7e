#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lazyref/logic.hpp"

namespace lazyref::smt {

struct QueryOrigin {
  Span span;
  std::string rule;
  // Names bound at serious base type in the environment that produced the
  // query; diagnostic only, used by hygiene checks.
  std::vector<std::string> serious_binders;
};

// A validity obligation: decls |- (/\ hyps) => lhs => goal.
struct Query {
  logic::SortMap decls;
  std::vector<logic::Pred> hyps;
  logic::Pred lhs;
  logic::Pred goal;
  QueryOrigin origin;
};

struct Verdict {
  enum class Kind { Valid, Invalid, Unknown };
  Kind kind = Kind::Unknown;
  logic::Assignment model;  // countermodel for Invalid, verified by evaluation
  std::string reason;       // for Unknown

  bool valid() const { return kind == Kind::Valid; }
  bool invalid() const { return kind == Kind::Invalid; }
};

struct Backend {
  enum class Kind { Builtin, External };
  Kind kind = Kind::Builtin;
  // External command reading SMT-LIB 2 on stdin and printing sat/unsat.
  std::string command;
  int time_limit_s = 10;

  static Backend builtin() { return {}; }
  static Backend external(std::string cmd, int limit_s = 10) {
    return Backend{Kind::External, std::move(cmd), limit_s};
  }
};

// Caps for the builtin procedure; exceeding one yields Unknown.
struct BuiltinLimits {
  std::size_t max_cubes = 4096;
  std::size_t max_constraints = 4000;
};

// Deterministic, byte-stable SMT-LIB 2 rendering of the query in QF_LIA.
std::string emit_smtlib(const Query& q);

// Decides validity via case-split to cubes and Fourier-Motzkin elimination
// with integer tightening. Invalid verdicts carry a countermodel that has
// been verified by evaluation; residual integer incompleteness surfaces as
// Unknown, never as a wrong verdict.
Verdict builtin_check(const Query& q, const BuiltinLimits& limits = {});

// Dispatches on the backend. The external path runs one solver process per
// query over the SMT-LIB 2 text protocol.
Verdict check_valid(const Query& q, const Backend& b);

// True iff the assignment satisfies hyps /\ lhs /\ not goal.
bool model_refutes(const Query& q, const logic::Assignment& model);

}  // namespace lazyref::smt
