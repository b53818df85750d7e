#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lazyref/ast.hpp"
#include "lazyref/smt.hpp"
#include "lazyref/tenv.hpp"

namespace lazyref::tc {

// Sound mode implements the label discipline: serious binders contribute no
// hypotheses and recursive bindings with trivial results are checked in a
// termination-weakened environment. EagerNaive is the deliberately unsound
// baseline that treats every label as trivial and skips the weakening; it
// reproduces standard eager-semantics refinement checking and is
// watermarked in every report.
enum class CheckMode { Sound, EagerNaive };

enum class TerminationStatus { Trivial, Serious, SeriousByAnnotation };

enum class ErrorKind {
  SubtypingFailed,
  WellFormedness,
  TerminationMetric,
  SeriousEscape,
  LetEscape,
  AnnotationMissing,
  SolverUnknown,
};

struct TypeError {
  ErrorKind kind = ErrorKind::WellFormedness;
  Span span;
  std::string rule;
  std::string message;
  std::shared_ptr<smt::Query> query;  // exact query for solver-backed failures
  std::optional<smt::Verdict> verdict;
  std::optional<std::size_t> query_id;  // index into the checker's query log

  std::string render() const;
};

const char* error_kind_name(ErrorKind k);
const char* termination_name(TerminationStatus t);

struct BindingReport {
  std::string name;
  std::string type;
  TerminationStatus termination = TerminationStatus::Trivial;
};

struct QueryRecord {
  smt::Query query;
  smt::Verdict verdict;
};

struct Report {
  CheckMode mode = CheckMode::Sound;
  std::vector<BindingReport> bindings;
  std::vector<TypeError> errors;
  std::size_t query_count = 0;
  std::int64_t solver_ms = 0;

  bool safe() const { return errors.empty(); }
  bool any_unknown() const {
    for (const auto& e : errors)
      if (e.kind == ErrorKind::SolverUnknown) return true;
    return false;
  }
};

// Bidirectional checker for the calculus: well-formedness, subtyping with
// SMT-discharged base implications, synthesis/checking, and the split
// fixpoint rules with default, hinted, and lexicographic metrics.
class Checker {
 public:
  explicit Checker(CheckMode mode = CheckMode::Sound,
                   smt::Backend backend = smt::Backend::builtin());

  Report check_program(const Program& p);

  // Single-judgment entry points.
  std::optional<TypeError> wf(const TEnv& g, const RTypePtr& t);
  std::optional<TypeError> sub(const TEnv& g, const RTypePtr& t1,
                               const RTypePtr& t2, Span sp = {});
  std::variant<RTypePtr, TypeError> synth(const TEnv& g, const ExprPtr& e);
  std::optional<TypeError> check(const TEnv& g, const ExprPtr& e,
                                 const RTypePtr& t);
  std::variant<RTypePtr, TypeError> weaken_rec_type(const RTypePtr& signature,
                                                    const MetricSpec& metric,
                                                    const TEnv& g, Span sp = {});

  // Every query sent to the solver, in emission order.
  const std::vector<QueryRecord>& queries() const { return queries_; }
  CheckMode mode() const { return mode_; }

  struct Raise;  // exception wrapper for internal unwinding

 private:
  bool naive() const { return mode_ == CheckMode::EagerNaive; }
  bool mode_trivial(const RTypePtr& t) const {
    return naive() || is_trivial_type(t);
  }

  TEnv visible_env(const TEnv& g) const;
  logic::SortMap base_decls(const TEnv& g) const;
  std::vector<logic::Pred> hypotheses(const TEnv& g, Span sp);
  logic::Pred pred_of(const ExprPtr& e);
  smt::Verdict discharge(const TEnv& g, logic::Pred lhs, logic::Pred goal,
                         Span sp, const std::string& rule,
                         std::shared_ptr<smt::Query>* out = nullptr);

  std::string push_fresh(TEnv& g, const std::string& preferred, RTypePtr type,
                         ExprPtr* body, RTypePtr* dependent);

  void wf_i(TEnv& g, const RTypePtr& t, Span sp);
  void sub_i(TEnv& g, const RTypePtr& t1, const RTypePtr& t2, Span sp);
  RTypePtr synth_i(TEnv& g, const ExprPtr& e);
  void check_i(TEnv& g, const ExprPtr& e, const RTypePtr& t);
  RTypePtr synth_app(TEnv& g, const ExprPtr& e);
  RTypePtr synth_if(TEnv& g, const IfE& i, Span sp);
  RTypePtr check_fix_i(TEnv& g, const ExprPtr& fix);
  RTypePtr weaken_i(const RTypePtr& signature, const MetricSpec& metric, TEnv& g,
                    Span sp, std::size_t bound_params = SIZE_MAX);
  RTypePtr apply_result(const RFun& arrow, const ExprPtr& arg, Span sp);
  RTypePtr drop_binder_refs(const RTypePtr& t, const std::string& x,
                            bool covariant, Span sp, ErrorKind escape_kind);
  void push_guard(TEnv& g, const ExprPtr& cond, bool negated);
  bool guard_usable(TEnv& g, const ExprPtr& cond, const RTypePtr& cond_type);

  CheckMode mode_;
  smt::Backend backend_;
  std::vector<QueryRecord> queries_;
  std::int64_t solver_us_ = 0;
  std::size_t fresh_counter_ = 0;
  std::set<std::string> weakened_recs_;  // binders typed by the weakened rule
};

// Type-based triviality judgment for the optimistic strategy: a closed term
// is deemed trivial when sound-mode synthesis gives it a trivial type.
std::function<bool(const ExprPtr&)> checker_oracle(
    smt::Backend backend = smt::Backend::builtin());

}  // namespace lazyref::tc
