#include "lazyref/semantics.hpp"

#include "lazyref/constants.hpp"
#include "lazyref/pretty.hpp"
#include "lazyref/subst.hpp"

namespace lazyref::sem {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

TrivialityOracle TrivialityOracle::fuel_probe(std::size_t probe_fuel) {
  TrivialityOracle o;
  o.probe_fuel_ = probe_fuel == 0 ? 1 : probe_fuel;
  return o;
}

TrivialityOracle TrivialityOracle::from_checker(
    std::function<bool(const ExprPtr&)> judge) {
  TrivialityOracle o;
  o.judge_ = std::move(judge);
  return o;
}

bool TrivialityOracle::trivial(const ExprPtr& e) const {
  auto it = memo_.find(e.get());
  if (it != memo_.end()) return it->second;
  bool result = judge_ ? judge_(e) : is_trivial_probe(e, probe_fuel_);
  memo_.emplace(e.get(), result);
  return result;
}

bool force(const Strategy& s, const ExprPtr& e) {
  switch (s.kind) {
    case Strategy::Kind::CBN:
      return false;
    case Strategy::Kind::CBV:
      return !is_value(e);
    case Strategy::Kind::OPT:
      return !is_value(e) && s.oracle->trivial(e);
  }
  return false;
}

namespace {

// Steps a subterm in a forced context position; Stepped results are
// rewrapped by the caller, crashes and stuck states abort the whole term.
StepResult step_in_context(const ExprPtr& sub, const Strategy& s,
                           const std::function<ExprPtr(ExprPtr)>& rebuild) {
  StepResult r = step(sub, s);
  if (auto* st = std::get_if<Stepped>(&r)) return Stepped{rebuild(st->next)};
  if (std::holds_alternative<AlreadyValue>(r))
    return Stuck{"context rule applied to a value", false};
  return r;
}

}  // namespace

StepResult step(const ExprPtr& e, const Strategy& s) {
  if (is_value(e)) return AlreadyValue{};
  return std::visit(
      overloaded{
          [&](const VarE& v) -> StepResult {
            return Stuck{"free variable '" + v.name + "'", false};
          },
          [&](const ConE& c) -> StepResult {
            if (std::holds_alternative<CrashTag>(c.val))
              return Stuck{"crash", true};
            return Stuck{"constant cannot step", false};
          },
          [&](const LamE&) -> StepResult { return AlreadyValue{}; },
          [&](const FixE&) -> StepResult { return AlreadyValue{}; },
          [&](const IfE& i) -> StepResult {
            // The condition is always forced; the branch is picked by its
            // boolean value.
            if (auto b = as_bool_value(i.cond))
              return Stepped{*b ? i.then_e : i.else_e};
            if (is_value(i.cond))
              return Stuck{"if condition is not a boolean", false};
            return step_in_context(i.cond, s, [&](ExprPtr c) {
              return mk_if(std::move(c), i.then_e, i.else_e, e->span);
            });
          },
          [&](const LetE& l) -> StepResult {
            if (force(s, l.bound))
              return step_in_context(l.bound, s, [&](ExprPtr b) {
                return mk_let(l.binder, std::move(b), l.body, e->span);
              });
            return Stepped{subst_expr(l.body, l.binder, l.bound)};
          },
          [&](const AppE& a) -> StepResult {
            if (!is_value(a.fn))
              // The function of an application is always needed.
              return step_in_context(a.fn, s, [&](ExprPtr f) {
                return mk_app(std::move(f), a.arg, e->span);
              });
            if (const auto* lam = std::get_if<LamE>(&a.fn->node)) {
              if (force(s, a.arg))
                return step_in_context(a.arg, s, [&](ExprPtr arg) {
                  return mk_app(a.fn, std::move(arg), e->span);
                });
              return Stepped{subst_expr(lam->body, lam->binder, a.arg)};
            }
            if (const auto* fix = std::get_if<FixE>(&a.fn->node)) {
              if (force(s, a.arg))
                return step_in_context(a.arg, s, [&](ExprPtr arg) {
                  return mk_app(a.fn, std::move(arg), e->span);
                });
              ExprPtr unrolled = subst_expr(fix->body, fix->binder, a.arg);
              return Stepped{subst_expr(unrolled, fix->fname, a.fn)};
            }
            // Constant application: the argument is reduced to a value, then
            // the saturated spine steps to the primitive's output.
            auto spine = const_spine(e);
            if (!spine)
              return Stuck{"application of a non-function value", false};
            if (!is_value(a.arg))
              return step_in_context(a.arg, s, [&](ExprPtr arg) {
                return mk_app(a.fn, std::move(arg), e->span);
              });
            if (spine->args.size() != static_cast<std::size_t>(arity(spine->head)))
              return Stuck{"over-applied constant", false};
            auto result = delta_apply(spine->head, spine->args, e->span);
            if (!result)
              return Stuck{"primitive applied outside its sort", false};
            return Stepped{*result};
          }},
      e->node);
}

Outcome eval(const ExprPtr& e, const Strategy& s, std::size_t fuel,
             bool want_trace) {
  Outcome out;
  ExprPtr cur = e;
  if (want_trace) out.trace.push_back(cur);
  for (std::size_t used = 0;; ++used) {
    if (is_value(cur)) {
      out.kind = Outcome::Kind::Value;
      out.value = cur;
      out.steps_used = used;
      return out;
    }
    if (is_crash(cur)) {
      out.kind = Outcome::Kind::Crash;
      out.steps_used = used;
      return out;
    }
    if (used == fuel) {
      out.kind = Outcome::Kind::FuelExhausted;
      out.steps_used = used;
      return out;
    }
    StepResult r = step(cur, s);
    if (auto* st = std::get_if<Stepped>(&r)) {
      cur = st->next;
      if (want_trace) out.trace.push_back(cur);
      continue;
    }
    const auto& stuck = std::get<Stuck>(r);
    out.kind = Outcome::Kind::Crash;
    out.detail = stuck.reason;
    out.steps_used = used;
    return out;
  }
}

bool is_trivial_probe(const ExprPtr& e, std::size_t probe_fuel) {
  return eval(e, Strategy::cbn(), probe_fuel).is_value();
}

AgreementReport compare_strategies(const ExprPtr& e, std::size_t fuel) {
  AgreementReport report;
  report.cbn = eval(e, Strategy::cbn(), fuel);
  report.opt = eval(e, Strategy::opt(TrivialityOracle::fuel_probe(fuel)), fuel);
  const Outcome& n = report.cbn;
  const Outcome& o = report.opt;
  if (n.kind == Outcome::Kind::FuelExhausted ||
      o.kind == Outcome::Kind::FuelExhausted) {
    report.kind = AgreementReport::Kind::Inconclusive;
    report.detail = "fuel exhausted";
    return report;
  }
  if (n.crashed() && o.crashed()) {
    report.kind = AgreementReport::Kind::Agree;
    report.detail = "crash";
    return report;
  }
  if (n.is_value() && o.is_value()) {
    const auto* cn = std::get_if<ConE>(&n.value->node);
    const auto* co = std::get_if<ConE>(&o.value->node);
    if (!cn || !co) {
      // Equivalence is only claimed for constant results.
      report.kind = AgreementReport::Kind::Inconclusive;
      report.detail = "functional value";
      return report;
    }
    if (cn->val == co->val) {
      report.kind = AgreementReport::Kind::Agree;
      report.detail = const_name(cn->val);
      return report;
    }
    report.kind = AgreementReport::Kind::Disagree;
    report.detail =
        "cbn: " + const_name(cn->val) + " vs opt: " + const_name(co->val);
    return report;
  }
  report.kind = AgreementReport::Kind::Disagree;
  report.detail = std::string("cbn: ") + (n.crashed() ? "crash" : "value") +
                  " vs opt: " + (o.crashed() ? "crash" : "value");
  return report;
}

}  // namespace lazyref::sem
