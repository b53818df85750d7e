#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lazyref/ast.hpp"

namespace lazyref::sem {

// Decides whether a non-value expression should be forced under the
// optimistic strategy. The fuel probe under-approximates semantic
// triviality by running the expression under call-by-name for a bounded
// number of steps; the checker oracle consults a type-based judgment.
// The memo makes an oracle instance single-owner: give each concurrent
// evaluation its own Strategy.
class TrivialityOracle {
 public:
  static TrivialityOracle fuel_probe(std::size_t probe_fuel);
  static TrivialityOracle from_checker(std::function<bool(const ExprPtr&)> judge);

  bool trivial(const ExprPtr& e) const;
  std::size_t probe_fuel() const { return probe_fuel_; }

 private:
  std::size_t probe_fuel_ = 1;
  std::function<bool(const ExprPtr&)> judge_;
  // Shared subterms keep their identity across substitution steps, so a
  // pointer-keyed memo pays off during optimistic runs.
  mutable std::unordered_map<const Expr*, bool> memo_;
};

struct Strategy {
  enum class Kind { CBN, CBV, OPT };
  Kind kind = Kind::CBN;
  std::shared_ptr<TrivialityOracle> oracle;  // OPT only

  static Strategy cbn() { return {Kind::CBN, nullptr}; }
  static Strategy cbv() { return {Kind::CBV, nullptr}; }
  static Strategy opt(TrivialityOracle oracle) {
    return {Kind::OPT, std::make_shared<TrivialityOracle>(std::move(oracle))};
  }
};

// The force predicate: CBN never forces, CBV forces every non-value, OPT
// forces non-values the oracle deems trivial.
bool force(const Strategy& s, const ExprPtr& e);

struct Stepped {
  ExprPtr next;
};
struct AlreadyValue {};
struct Stuck {
  std::string reason;
  bool crashed = false;
};
using StepResult = std::variant<Stepped, AlreadyValue, Stuck>;

// One small step under evaluation contexts C ::= [] | v C | let x = C in e.
// Deterministic: at most one rule applies to a closed term.
StepResult step(const ExprPtr& e, const Strategy& s);

struct Outcome {
  enum class Kind { Value, Crash, FuelExhausted };
  Kind kind = Kind::FuelExhausted;
  ExprPtr value;  // for Value
  std::size_t steps_used = 0;
  std::string detail;
  std::vector<ExprPtr> trace;  // intermediate terms when tracing

  bool is_value() const { return kind == Kind::Value; }
  bool crashed() const { return kind == Kind::Crash; }
};

constexpr std::size_t kDefaultFuel = 100000;

Outcome eval(const ExprPtr& e, const Strategy& s, std::size_t fuel,
             bool want_trace = false);

// True iff e reaches a non-crash value under CBN within probe_fuel steps;
// an under-approximation of semantic triviality.
bool is_trivial_probe(const ExprPtr& e, std::size_t probe_fuel);

// Differential run of CBN against OPT with a fuel-probe oracle. Agreement
// covers matching constant results and matching crashes; terminating at a
// functional value is reported inconclusive since equivalence is only
// claimed for constants.
struct AgreementReport {
  enum class Kind { Agree, Inconclusive, Disagree };
  Kind kind = Kind::Inconclusive;
  Outcome cbn;
  Outcome opt;
  std::string detail;
};

AgreementReport compare_strategies(const ExprPtr& e, std::size_t fuel);

}  // namespace lazyref::sem
