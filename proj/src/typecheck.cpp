#include "lazyref/typecheck.hpp"

#include <chrono>

#include "lazyref/constants.hpp"
#include "lazyref/logic.hpp"
#include "lazyref/pretty.hpp"
#include "lazyref/subst.hpp"

namespace lazyref::tc {

using logic::Pred;

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::SubtypingFailed: return "subtyping-failed";
    case ErrorKind::WellFormedness: return "well-formedness";
    case ErrorKind::TerminationMetric: return "termination-metric";
    case ErrorKind::SeriousEscape: return "serious-escape";
    case ErrorKind::LetEscape: return "let-escape";
    case ErrorKind::AnnotationMissing: return "annotation-missing";
    case ErrorKind::SolverUnknown: return "solver-unknown";
  }
  return "?";
}

const char* termination_name(TerminationStatus t) {
  switch (t) {
    case TerminationStatus::Trivial: return "trivial";
    case TerminationStatus::Serious: return "serious";
    case TerminationStatus::SeriousByAnnotation: return "serious-by-annotation";
  }
  return "?";
}

std::string TypeError::render() const {
  std::string out = pretty(span) + ": [" + rule + "] " + message;
  if (query && verdict && verdict->invalid() && !verdict->model.empty()) {
    out += "; countermodel:";
    for (const auto& [name, value] : verdict->model) {
      out += ' ' + name + '=';
      if (const auto* n = std::get_if<std::int64_t>(&value))
        out += std::to_string(*n);
      else
        out += std::get<bool>(value) ? "true" : "false";
    }
  }
  return out;
}

struct Checker::Raise {
  TypeError err;
};

namespace {
// Restores the environment to a recorded depth even when a rule raises.
struct EnvDepthGuard {
  TEnv& g;
  std::size_t depth;
  explicit EnvDepthGuard(TEnv& env) : g(env), depth(env.size()) {}
  ~EnvDepthGuard() {
    while (g.size() > depth) g.pop();
  }
};

[[noreturn]] void raise(ErrorKind kind, Span sp, std::string rule,
                        std::string message) {
  throw Checker::Raise{
      TypeError{kind, sp, std::move(rule), std::move(message), nullptr,
                std::nullopt, std::nullopt}};
}

const std::string* head_var(const ExprPtr& e) {
  const Expr* cur = e.get();
  while (const auto* app = std::get_if<AppE>(&cur->node)) cur = app->fn.get();
  if (const auto* v = std::get_if<VarE>(&cur->node)) return &v->name;
  return nullptr;
}

bool is_logical(const ExprPtr& e) {
  return std::holds_alternative<Pred>(logic::to_pred(e));
}

// Strict lexicographic decrease as a refinement expression, mirroring
// logic::lex_pred on the expression side.
ExprPtr lex_expr(const std::vector<ExprPtr>& older,
                 const std::vector<ExprPtr>& newer) {
  ExprPtr result;
  for (std::size_t i = 0; i < older.size(); ++i) {
    ExprPtr clause = mk_binop(PrimOp::Lt, newer[i], older[i]);
    for (std::size_t j = i; j > 0; --j)
      clause = mk_binop(PrimOp::And,
                        mk_binop(PrimOp::Eq, newer[j - 1], older[j - 1]), clause);
    result = result ? mk_binop(PrimOp::Or, result, clause) : clause;
  }
  return result;
}
}  // namespace

Checker::Checker(CheckMode mode, smt::Backend backend)
    : mode_(mode), backend_(std::move(backend)) {}

TEnv Checker::visible_env(const TEnv& g) const {
  return naive() ? g : logic::strict_env(g);
}

logic::SortMap Checker::base_decls(const TEnv& g) const {
  logic::SortMap decls;
  TEnv visible = visible_env(g);
  for (const auto& [name, type] : visible.bindings())
    if (const auto* b = as_base(type)) decls[name] = logic::sort_of_base(b->base);
  return decls;
}

std::vector<Pred> Checker::hypotheses(const TEnv& g, Span sp) {
  auto r = logic::embed_env(g);
  if (auto* err = std::get_if<logic::NotLogical>(&r))
    raise(ErrorKind::WellFormedness, sp, "S-Base-Top",
          "environment refinement left the logical fragment: " + err->reason);
  return std::get<std::vector<Pred>>(std::move(r));
}

Pred Checker::pred_of(const ExprPtr& e) {
  auto r = logic::to_pred(e);
  if (auto* err = std::get_if<logic::NotLogical>(&r))
    raise(ErrorKind::WellFormedness, e->span, "S-Base-Top",
          "refinement is not in the logical fragment: " + err->reason);
  return std::get<Pred>(std::move(r));
}

smt::Verdict Checker::discharge(const TEnv& g, Pred lhs, Pred goal, Span sp,
                                const std::string& rule,
                                std::shared_ptr<smt::Query>* out) {
  smt::Query q;
  q.hyps = hypotheses(g, sp);
  q.lhs = std::move(lhs);
  q.goal = std::move(goal);
  q.origin.span = sp;
  q.origin.rule = rule;
  for (const auto& [name, type] : g.bindings())
    if (is_serious_base(type)) q.origin.serious_binders.push_back(name);

  std::set<std::string> used;
  for (const auto& h : q.hyps) logic::collect_pred_vars(h, used);
  logic::collect_pred_vars(q.lhs, used);
  logic::collect_pred_vars(q.goal, used);
  logic::SortMap all = base_decls(g);
  for (const auto& name : used) {
    auto it = all.find(name);
    if (it == all.end())
      raise(ErrorKind::WellFormedness, sp, rule,
            "query mentions '" + name + "', which has no declarable sort");
    q.decls[name] = it->second;
  }
  if (!naive())
    for (const auto& s : q.origin.serious_binders)
      if (q.decls.count(s))
        raise(ErrorKind::WellFormedness, sp, rule,
              "internal: serious binder '" + s + "' leaked into a query");

  auto t0 = std::chrono::steady_clock::now();
  smt::Verdict v = smt::check_valid(q, backend_);
  solver_us_ += std::chrono::duration_cast<std::chrono::microseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  queries_.push_back({q, v});
  if (out) *out = std::make_shared<smt::Query>(std::move(q));
  return v;
}

std::string Checker::push_fresh(TEnv& g, const std::string& preferred,
                                RTypePtr type, ExprPtr* body,
                                RTypePtr* dependent) {
  std::string name = preferred;
  if (name == "_" || g.contains(name)) {
    std::set<std::string> avoid = g.names();
    avoid.insert("_");
    if (body) collect_free_vars(*body, avoid);
    if (dependent) collect_free_vars(*dependent, avoid);
    name = fresh_name(preferred == "_" ? "x" : preferred, avoid);
    if (body && name != preferred) *body = subst_expr(*body, preferred, mk_var(name));
    if (dependent && name != preferred)
      *dependent = subst_type(*dependent, preferred, mk_var(name));
  }
  g.push(name, std::move(type));
  return name;
}

// ---- well-formedness ---------------------------------------------------------

void Checker::wf_i(TEnv& g, const RTypePtr& t, Span sp) {
  std::visit(
      overloaded{
          [&](const RBase& b) {
            if (b.label == Label::Div) {
              if (!is_true_lit(b.refinement))
                raise(ErrorKind::WellFormedness, sp, "WF-Base-Bot",
                      "serious types are unrefined");
              return;
            }
            auto r = logic::to_pred(b.refinement);
            if (auto* err = std::get_if<logic::NotLogical>(&r))
              raise(ErrorKind::WellFormedness, err->span, "WF-Base-Top",
                    "refinement is not in the logical fragment: " + err->reason);
            logic::SortMap decls = base_decls(g);
            decls[b.value_binder] = logic::sort_of_base(b.base);
            auto s = logic::sort_check(decls, std::get<Pred>(r));
            if (auto* err = std::get_if<logic::SortError>(&s))
              raise(ErrorKind::WellFormedness, sp, "WF-Base-Top", err->message);
            if (std::get<logic::Sort>(s) != logic::Sort::Bool)
              raise(ErrorKind::WellFormedness, sp, "WF-Base-Top",
                    "refinement must be boolean-sorted: " + pretty(b.refinement));
          },
          [&](const RFun& f) {
            wf_i(g, f.input, sp);
            RTypePtr output = f.output;
            std::string binder = f.binder;
            if (g.contains(binder) || binder == "_") {
              std::set<std::string> avoid = g.names();
              avoid.insert("_");
              collect_free_vars(output, avoid);
              std::string renamed = fresh_name(binder == "_" ? "x" : binder, avoid);
              output = subst_type(output, binder, mk_var(renamed));
              binder = renamed;
            }
            ScopedBinding bind(g, binder, f.input);
            wf_i(g, output, sp);
          }},
      t->node);
}

// ---- subtyping ------------------------------------------------------------------

void Checker::sub_i(TEnv& g, const RTypePtr& t1, const RTypePtr& t2, Span sp) {
  if (alpha_eq(t1, t2)) return;
  const auto* b1 = as_base(t1);
  const auto* b2 = as_base(t2);
  if (b1 && b2) {
    if (b1->base != b2->base)
      raise(ErrorKind::WellFormedness, sp, "S-Base",
            "base type mismatch: " + pretty(t1) + " vs " + pretty(t2));
    if (b2->label == Label::Div) return;  // any base type fits a serious one
    if (b1->label == Label::Div && !naive())
      raise(ErrorKind::SeriousEscape, sp, "S-Base-Bot",
            "a serious value can only be used at a serious type: " + pretty(t1) +
                " is not a subtype of " + pretty(t2));
    if (is_true_lit(b2->refinement)) return;  // vacuous goal, no query needed

    std::set<std::string> avoid = g.names();
    std::set<std::string> f1 = free_vars(b1->refinement);
    f1.erase(b1->value_binder);
    std::set<std::string> f2 = free_vars(b2->refinement);
    f2.erase(b2->value_binder);
    avoid.insert(f1.begin(), f1.end());
    avoid.insert(f2.begin(), f2.end());
    std::string v = avoid.count(b1->value_binder)
                        ? fresh_name(b1->value_binder, avoid)
                        : b1->value_binder;
    ExprPtr lhs_e = subst_expr(b1->refinement, b1->value_binder, mk_var(v));
    ExprPtr goal_e = subst_expr(b2->refinement, b2->value_binder, mk_var(v));
    ScopedBinding bind(g, v, rt_unrefined(b1->base, Label::Fin));
    std::shared_ptr<smt::Query> query;
    smt::Verdict verdict =
        discharge(g, pred_of(lhs_e), pred_of(goal_e), sp, "S-Base-Top", &query);
    if (verdict.valid()) return;
    TypeError err;
    err.span = sp;
    err.rule = "S-Base-Top";
    err.query = query;
    err.verdict = verdict;
    err.query_id = queries_.size() - 1;
    if (verdict.invalid()) {
      err.kind = ErrorKind::SubtypingFailed;
      err.message = pretty(t1) + " is not a subtype of " + pretty(t2);
    } else {
      err.kind = ErrorKind::SolverUnknown;
      err.message = "solver could not decide subtyping (" + verdict.reason +
                    "): " + pretty(t1) + " <: " + pretty(t2);
    }
    throw Raise{std::move(err)};
  }
  const auto* f1 = as_fun(t1);
  const auto* f2 = as_fun(t2);
  if (f1 && f2) {
    sub_i(g, f2->input, f1->input, sp);
    std::set<std::string> avoid = g.names();
    RTypePtr out1 = f1->output;
    RTypePtr out2 = f2->output;
    collect_free_vars(out1, avoid);
    collect_free_vars(out2, avoid);
    std::string x =
        avoid.count(f2->binder) || f2->binder == "_"
            ? fresh_name(f2->binder == "_" ? "x" : f2->binder, avoid)
            : f2->binder;
    out1 = subst_type(out1, f1->binder, mk_var(x));
    out2 = subst_type(out2, f2->binder, mk_var(x));
    // The binding enters at the stronger (supertype's) input.
    ScopedBinding bind(g, x, f2->input);
    sub_i(g, out1, out2, sp);
    return;
  }
  raise(ErrorKind::WellFormedness, sp, "S-Fun",
        "function/base mismatch: " + pretty(t1) + " vs " + pretty(t2));
}

// ---- application results ---------------------------------------------------------

RTypePtr Checker::drop_binder_refs(const RTypePtr& t, const std::string& x,
                                   bool covariant, Span sp, ErrorKind escape_kind) {
  return std::visit(
      overloaded{
          [&](const RBase& b) -> RTypePtr {
            if (b.value_binder == x) return t;
            std::set<std::string> fv = free_vars(b.refinement);
            if (!fv.count(x)) return t;
            if (!covariant)
              raise(escape_kind, sp, "T-App",
                    "cannot erase the dependency on '" + x +
                        "' in argument position; let-bind the argument and "
                        "annotate it");
            return rt_base(b.value_binder, b.base, b.label, mk_boolc(true));
          },
          [&](const RFun& f) -> RTypePtr {
            RTypePtr input = drop_binder_refs(f.input, x, !covariant, sp,
                                              escape_kind);
            RTypePtr output = f.binder == x
                                  ? f.output
                                  : drop_binder_refs(f.output, x, covariant, sp,
                                                     escape_kind);
            if (input == f.input && output == f.output) return t;
            return rt_fun(f.binder, input, output);
          }},
      t->node);
}

namespace {
// Replaces refinements that fell out of the fragment (a primitive's output
// refinement can go nonlinear after substitution) with true in covariant
// positions.
RTypePtr drop_nonlogical(const RTypePtr& t, bool covariant, Span sp) {
  return std::visit(
      overloaded{
          [&](const RBase& b) -> RTypePtr {
            if (is_true_lit(b.refinement) || is_logical(b.refinement)) return t;
            if (!covariant)
              raise(ErrorKind::SeriousEscape, sp, "T-App",
                    "substituted refinement left the logical fragment in "
                    "argument position");
            return rt_base(b.value_binder, b.base, b.label, mk_boolc(true));
          },
          [&](const RFun& f) -> RTypePtr {
            RTypePtr input = drop_nonlogical(f.input, !covariant, sp);
            RTypePtr output = drop_nonlogical(f.output, covariant, sp);
            if (input == f.input && output == f.output) return t;
            return rt_fun(f.binder, input, output);
          }},
      t->node);
}
}  // namespace

RTypePtr Checker::apply_result(const RFun& arrow, const ExprPtr& arg, Span sp) {
  const std::string& x = arrow.binder;
  RTypePtr out = arrow.output;
  if (!free_vars(out).count(x)) return out;
  if (mode_trivial(arrow.input) && is_logical(arg)) {
    RTypePtr substituted = subst_type(out, x, arg);
    return drop_nonlogical(substituted, true, sp);
  }
  if (!mode_trivial(arrow.input))
    // Well-formedness keeps serious binders out of refinements, so a
    // dependency here means the signature itself is broken.
    raise(ErrorKind::SeriousEscape, sp, "T-App",
          "argument at serious type flows into the result type");
  return drop_binder_refs(out, x, true, sp, ErrorKind::SeriousEscape);
}

// ---- synthesis --------------------------------------------------------------------

RTypePtr Checker::synth_i(TEnv& g, const ExprPtr& e) {
  return std::visit(
      overloaded{
          [&](const VarE& v) -> RTypePtr {
            const RTypePtr* ty = g.lookup(v.name);
            if (!ty)
              raise(ErrorKind::WellFormedness, e->span, "T-Var",
                    "unbound variable '" + v.name + "'");
            const auto* b = as_base(*ty);
            if (b && (naive() || b->label == Label::Fin)) {
              // T-Var-A: the singleton refinement.
              std::string binder = v.name == b->value_binder
                                       ? fresh_name(b->value_binder, {v.name})
                                       : b->value_binder;
              return rt_base(binder, b->base, Label::Fin,
                             mk_binop(PrimOp::Eq, mk_var(binder),
                                      mk_var(v.name), e->span));
            }
            return *ty;  // T-Var-B: not strengthened
          },
          [&](const ConE& c) -> RTypePtr {
            RTypePtr sig = signature_of(c.val);
            if (!sig)
              raise(ErrorKind::WellFormedness, e->span, "T-Const",
                    "the crash constant has no type");
            return sig;
          },
          [&](const LamE& l) -> RTypePtr {
            if (!l.ann)
              raise(ErrorKind::AnnotationMissing, e->span, "T-Fun",
                    "lambda parameter needs a type annotation here");
            wf_i(g, l.ann, e->span);
            ExprPtr body = l.body;
            std::string binder;
            {
              ExprPtr tmp = body;
              binder = push_fresh(g, l.binder, l.ann, &tmp, nullptr);
              body = tmp;
            }
            RTypePtr out;
            {
              struct Pop {
                TEnv& g;
                ~Pop() { g.pop(); }
              } pop{g};
              out = synth_i(g, body);
            }
            RTypePtr arrow = rt_fun(binder, l.ann, out);
            wf_i(g, arrow, e->span);
            return arrow;
          },
          [&](const AppE&) -> RTypePtr { return synth_app(g, e); },
          [&](const LetE& l) -> RTypePtr {
            RTypePtr bound_ty = synth_i(g, l.bound);
            ExprPtr body = l.body;
            std::string binder;
            {
              ExprPtr tmp = body;
              binder = push_fresh(g, l.binder, bound_ty, &tmp, nullptr);
              body = tmp;
            }
            RTypePtr out;
            {
              struct Pop {
                TEnv& g;
                ~Pop() { g.pop(); }
              } pop{g};
              out = synth_i(g, body);
            }
            if (free_vars(out).count(binder)) {
              if (mode_trivial(bound_ty) && is_logical(l.bound))
                out = drop_nonlogical(subst_type(out, binder, l.bound), true,
                                      e->span);
              else
                raise(ErrorKind::LetEscape, e->span, "T-Let",
                      "the type of the body depends on '" + binder +
                          "'; bind it at top level with a signature");
            }
            wf_i(g, out, e->span);
            return out;
          },
          [&](const FixE&) -> RTypePtr { return check_fix_i(g, e); },
          [&](const IfE& i) -> RTypePtr { return synth_if(g, i, e->span); }},
      e->node);
}

RTypePtr Checker::synth_app(TEnv& g, const ExprPtr& e) {
  const auto& a = std::get<AppE>(e->node);
  RTypePtr fn_ty = synth_i(g, a.fn);
  const auto* arrow = as_fun(fn_ty);
  if (!arrow)
    raise(ErrorKind::WellFormedness, e->span, "T-App",
          "cannot apply an expression of type " + pretty(fn_ty));
  const std::string* head = head_var(a.fn);
  bool recursive_call = head && weakened_recs_.count(*head);
  try {
    check_i(g, a.arg, arrow->input);
  } catch (Raise& r) {
    if (recursive_call && r.err.kind == ErrorKind::SubtypingFailed) {
      r.err.rule = "T-Rec-T";
      r.err.message =
          "recursive call argument does not satisfy the termination-weakened "
          "type: " +
          r.err.message;
    }
    throw;
  }
  return apply_result(*arrow, a.arg, e->span);
}

bool Checker::guard_usable(TEnv& g, const ExprPtr& cond,
                           const RTypePtr& cond_type) {
  const auto* b = as_base(cond_type);
  if (!b || b->base != BaseType::Bool) return false;
  if (!naive() && b->label != Label::Fin) return false;
  if (!is_logical(cond)) return false;
  auto visible = base_decls(g);
  for (const auto& v : free_vars(cond))
    if (!visible.count(v)) return false;
  return true;
}

void Checker::push_guard(TEnv& g, const ExprPtr& cond, bool negated) {
  ExprPtr refinement =
      negated ? mk_app(mk_prim(PrimOp::Not, cond->span), cond, cond->span) : cond;
  std::string name = "$g" + std::to_string(fresh_counter_++);
  g.push(std::move(name),
         rt_base("$w", BaseType::Bool, Label::Fin, refinement));
}

RTypePtr Checker::synth_if(TEnv& g, const IfE& i, Span sp) {
  RTypePtr cond_ty = synth_i(g, i.cond);
  const auto* cb = as_base(cond_ty);
  if (!cb || cb->base != BaseType::Bool)
    raise(ErrorKind::WellFormedness, sp, "T-If",
          "if condition must be a boolean, got " + pretty(cond_ty));
  bool serious_cond = !naive() && cb->label == Label::Div;
  bool path = guard_usable(g, i.cond, cond_ty);
  RTypePtr then_ty, else_ty;
  {
    EnvDepthGuard depth(g);
    if (path) push_guard(g, i.cond, false);
    then_ty = synth_i(g, i.then_e);
  }
  {
    EnvDepthGuard depth(g);
    if (path) push_guard(g, i.cond, true);
    else_ty = synth_i(g, i.else_e);
  }
  if (!serious_cond && alpha_eq(then_ty, else_ty)) return then_ty;
  const auto* tb = as_base(then_ty);
  const auto* eb = as_base(else_ty);
  if (tb && eb && tb->base == eb->base) {
    // The condition sits in a forced position: a serious condition makes
    // the whole conditional serious.
    Label l = naive() || (!serious_cond && tb->label == Label::Fin &&
                          eb->label == Label::Fin)
                  ? Label::Fin
                  : Label::Div;
    return rt_unrefined(tb->base, l);
  }
  raise(ErrorKind::WellFormedness, sp, "T-If",
        "branches have incompatible types: " + pretty(then_ty) + " vs " +
            pretty(else_ty));
}

// ---- checking --------------------------------------------------------------------

void Checker::check_i(TEnv& g, const ExprPtr& e, const RTypePtr& t) {
  // error is monomorphized at its use site to the expected type.
  if (auto spine = const_spine(e)) {
    if (const auto* op = std::get_if<PrimOp>(&spine->head);
        op && *op == PrimOp::Error && spine->args.size() == 1) {
      check_i(g, spine->args[0],
              rt_base("v", BaseType::Int, Label::Fin, mk_boolc(false)));
      return;
    }
  }
  if (const auto* l = std::get_if<LamE>(&e->node)) {
    if (const auto* arrow = as_fun(t)) {
      if (l->ann) {
        wf_i(g, l->ann, e->span);
        sub_i(g, arrow->input, l->ann, e->span);
      }
      // Pick the binder before wiring it into the expected output: a
      // shadowing name must not capture variables the output already
      // mentions.
      std::set<std::string> avoid = g.names();
      avoid.insert("_");
      {
        std::set<std::string> in_out = free_vars(arrow->output);
        in_out.erase(arrow->binder);
        avoid.insert(in_out.begin(), in_out.end());
      }
      std::string binder = l->binder;
      ExprPtr body = l->body;
      if (binder == "_" || avoid.count(binder)) {
        collect_free_vars(body, avoid);
        binder = fresh_name(l->binder == "_" ? "x" : l->binder, avoid);
        body = subst_expr(body, l->binder, mk_var(binder));
      }
      RTypePtr out = subst_type(arrow->output, arrow->binder, mk_var(binder));
      ScopedBinding bind(g, binder, arrow->input);
      check_i(g, body, out);
      return;
    }
    raise(ErrorKind::WellFormedness, e->span, "T-Fun",
          "lambda checked against non-function type " + pretty(t));
  }
  if (const auto* i = std::get_if<IfE>(&e->node)) {
    RTypePtr cond_ty = synth_i(g, i->cond);
    const auto* cb = as_base(cond_ty);
    if (!cb || cb->base != BaseType::Bool)
      raise(ErrorKind::WellFormedness, e->span, "T-If",
            "if condition must be a boolean, got " + pretty(cond_ty));
    if (!naive() && cb->label == Label::Div && !is_serious_base(t))
      raise(ErrorKind::SeriousEscape, e->span, "T-If",
            "a serious condition makes the conditional serious; expected " +
                pretty(t));
    bool path = guard_usable(g, i->cond, cond_ty);
    {
      EnvDepthGuard depth(g);
      if (path) push_guard(g, i->cond, false);
      check_i(g, i->then_e, t);
    }
    {
      EnvDepthGuard depth(g);
      if (path) push_guard(g, i->cond, true);
      check_i(g, i->else_e, t);
    }
    return;
  }
  if (const auto* l = std::get_if<LetE>(&e->node)) {
    RTypePtr bound_ty = synth_i(g, l->bound);
    ExprPtr body = l->body;
    {
      ExprPtr tmp = body;
      push_fresh(g, l->binder, bound_ty, &tmp, nullptr);
      body = tmp;
    }
    struct Pop {
      TEnv& g;
      ~Pop() { g.pop(); }
    } pop{g};
    check_i(g, body, t);
    return;
  }
  RTypePtr synthesized = synth_i(g, e);
  sub_i(g, synthesized, t, e->span);
}

// ---- recursion --------------------------------------------------------------------

RTypePtr Checker::weaken_i(const RTypePtr& signature, const MetricSpec& metric,
                           TEnv& g, Span sp, std::size_t bound_params) {
  struct Param {
    std::string name;
    RTypePtr type;
  };
  std::vector<Param> params;
  RTypePtr cursor = signature;
  while (const auto* f = as_fun(cursor)) {
    params.push_back({f->binder, f->input});
    cursor = f->output;
  }
  RTypePtr result = cursor;
  // The weakening may only name parameters the body actually binds.
  std::size_t eligible = std::min(bound_params, params.size());

  auto param_index = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].name == name) return i;
    return std::nullopt;
  };
  auto trivial_int = [&](std::size_t i) {
    const auto* b = as_base(params[i].type);
    return b && b->base == BaseType::Int && b->label == Label::Fin;
  };

  // Resolve the metric to a list of integer expressions over parameters.
  std::vector<ExprPtr> entries;
  switch (metric.kind) {
    case MetricSpec::Kind::Default: {
      std::optional<std::size_t> first;
      for (std::size_t i = 0; i < eligible && !first; ++i)
        if (trivial_int(i)) first = i;
      if (!first)
        raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
              "no parameter of trivial Int type is available as a default "
              "termination metric");
      entries.push_back(mk_var(params[*first].name, sp));
      break;
    }
    case MetricSpec::Kind::ParamIndex: {
      if (metric.param_index >= eligible || !trivial_int(metric.param_index))
        raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
              "termination metric parameter is out of range or not a trivial "
              "Int");
      entries.push_back(mk_var(params[metric.param_index].name, sp));
      break;
    }
    case MetricSpec::Kind::Lex:
      entries = metric.entries;
      break;
  }
  if (entries.empty())
    raise(ErrorKind::TerminationMetric, sp, "T-Rec-T", "empty termination metric");

  // The parameter hosting the weakening is the latest-bound variable of the
  // last metric entry; every entry must be visible at that point.
  std::size_t host = 0;
  bool host_found = false;
  for (const auto& v : free_vars(entries.back())) {
    auto idx = param_index(v);
    if (!idx)
      raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
            "termination metric mentions '" + v + "', which is not a parameter");
    if (!host_found || *idx > host) host = *idx;
    host_found = true;
  }
  if (!host_found)
    raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
          "the last termination metric entry mentions no parameter");
  if (host >= eligible)
    raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
          "the weakened parameter must be bound by the function's leading "
          "lambdas");
  for (const auto& entry : entries) {
    if (!is_logical(entry))
      raise(ErrorKind::TerminationMetric, entry->span, "T-Rec-T",
            "termination metric is not in the logical fragment: " + pretty(entry));
    for (const auto& v : free_vars(entry)) {
      auto idx = param_index(v);
      if (!idx)
        raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
              "termination metric mentions '" + v +
                  "', which is not a parameter");
      if (*idx > host)
        raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
              "termination metric mentions '" + v +
                  "', which is bound after the weakened parameter");
      if (!trivial_int(*idx))
        raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
              "termination metric parameter '" + v +
                  "' is not of trivial Int type");
    }
  }
  if (!trivial_int(host))
    raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
          "the weakened parameter must have trivial Int type");

  // The well-founded order needs nonnegative metrics; each entry must be
  // provably >= 0 under the environment extended with the parameters.
  {
    EnvDepthGuard depth(g);
    for (const auto& p : params) g.push(p.name, p.type);
    for (const auto& entry : entries) {
      smt::Verdict v =
          discharge(g, logic::p_bool(true),
                    logic::p_cmp(logic::CmpOp::Ge, pred_of(entry), logic::p_int(0)),
                    sp, "T-Rec-T(metric)");
      if (!v.valid())
        raise(ErrorKind::TerminationMetric, sp, "T-Rec-T",
              "termination metric '" + pretty(entry) +
                  "' is not provably nonnegative");
    }
  }

  // Fresh copies of the parameters; the host's refinement is conjoined with
  // the strict lexicographic decrease of the new metrics below the old.
  std::set<std::string> avoid = g.names();
  for (const auto& p : params) {
    avoid.insert(p.name);
    collect_free_vars(p.type, avoid);
  }
  collect_free_vars(result, avoid);
  std::vector<std::string> primed;
  for (const auto& p : params) {
    std::string name = fresh_name(p.name + "'", avoid);
    avoid.insert(name);
    primed.push_back(name);
  }

  const auto* host_base = as_base(params[host].type);
  std::string value_binder = host_base->value_binder;
  {
    std::set<std::string> vb_avoid = avoid;
    for (const auto& entry : entries) collect_free_vars(entry, vb_avoid);
    if (vb_avoid.count(value_binder)) value_binder = fresh_name("v", vb_avoid);
  }

  std::vector<ExprPtr> new_entries;
  for (const auto& entry : entries) {
    ExprPtr renamed = entry;
    for (std::size_t j = 0; j < host; ++j)
      renamed = subst_expr(renamed, params[j].name, mk_var(primed[j]));
    renamed = subst_expr(renamed, params[host].name, mk_var(value_binder));
    new_entries.push_back(renamed);
  }
  ExprPtr decrease = lex_expr(entries, new_entries);

  // Rebuild the arrow right to left with primed names substituted through.
  auto primed_type = [&](std::size_t i) {
    RTypePtr ty = params[i].type;
    for (std::size_t j = 0; j < i; ++j)
      ty = subst_type(ty, params[j].name, mk_var(primed[j]));
    return ty;
  };
  RTypePtr out = result;
  for (std::size_t j = 0; j < params.size(); ++j)
    out = subst_type(out, params[j].name, mk_var(primed[j]));
  for (std::size_t i = params.size(); i > 0; --i) {
    std::size_t idx = i - 1;
    RTypePtr input;
    if (idx == host) {
      ExprPtr base_ref = subst_expr(host_base->refinement, host_base->value_binder,
                                    mk_var(value_binder));
      for (std::size_t j = 0; j < host; ++j)
        base_ref = subst_expr(base_ref, params[j].name, mk_var(primed[j]));
      ExprPtr refinement = is_true_lit(base_ref)
                               ? decrease
                               : mk_binop(PrimOp::And, base_ref, decrease);
      input = rt_base(value_binder, BaseType::Int, Label::Fin, refinement);
    } else {
      input = primed_type(idx);
    }
    out = rt_fun(primed[idx], input, out);
  }
  return out;
}

RTypePtr Checker::check_fix_i(TEnv& g, const ExprPtr& e) {
  const auto& f = std::get<FixE>(e->node);
  RTypePtr signature = rt_fun(f.binder, f.param_type, f.result_type);
  wf_i(g, signature, e->span);

  // The weakened recursive type constrains arguments by naming the current
  // parameters, so those names must be exactly what the environment will
  // bind when the body's lambdas are entered. Canonicalize: fresh copies of
  // the signature binders that nothing in scope can collide with, rename
  // the body's leading lambda chain to match, and rebuild the signature
  // around them.
  struct Arrow {
    std::string binder;
    RTypePtr input;
  };
  std::vector<Arrow> arrows;
  RTypePtr cursor = signature;
  while (const auto* a = as_fun(cursor)) {
    arrows.push_back({a->binder, a->input});
    cursor = a->output;
  }
  RTypePtr rho = cursor;

  std::vector<const LamE*> chain;
  const Expr* body_cursor = f.body.get();
  while (chain.size() + 1 < arrows.size()) {
    const auto* lam = std::get_if<LamE>(&body_cursor->node);
    if (!lam) break;
    chain.push_back(lam);
    body_cursor = lam->body.get();
  }
  std::size_t bound_params = 1 + chain.size();
  ExprPtr inner = chain.empty() ? f.body : chain.back()->body;

  std::vector<std::string> old_lam_names{f.binder};
  for (const auto* lam : chain) old_lam_names.push_back(lam->binder);

  // Everything a canonical name could capture: environment names, stray
  // free variables of the signature, outer references inside the body, and
  // the recursive binder. Parameter occurrences themselves are what gets
  // renamed, so they are excluded.
  std::set<std::string> base_avoid = g.names();
  base_avoid.insert("_");
  base_avoid.insert(f.fname);
  collect_free_vars(signature, base_avoid);
  {
    std::set<std::string> inner_free = free_vars(inner);
    for (const auto& name : old_lam_names) inner_free.erase(name);
    base_avoid.insert(inner_free.begin(), inner_free.end());
  }

  std::vector<std::string> canon;
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    std::string base = arrows[i].binder;
    if (base == "_" && i < bound_params && old_lam_names[i] != "_")
      base = old_lam_names[i];
    if (base == "_") base = "x";
    std::set<std::string> avoid = base_avoid;
    for (const auto& chosen : canon) avoid.insert(chosen);
    for (std::size_t j = 0; j < arrows.size(); ++j)
      if (j != i) avoid.insert(arrows[j].binder);
    for (std::size_t j = 0; j < old_lam_names.size(); ++j)
      if (j != i) avoid.insert(old_lam_names[j]);
    canon.push_back(avoid.count(base) ? fresh_name(base + "'", avoid) : base);
  }

  auto canon_input = [&](std::size_t i) {
    RTypePtr ty = arrows[i].input;
    for (std::size_t j = 0; j < i; ++j)
      if (arrows[j].binder != canon[j])
        ty = subst_type(ty, arrows[j].binder, mk_var(canon[j]));
    return ty;
  };
  RTypePtr canon_rho = rho;
  for (std::size_t j = 0; j < arrows.size(); ++j)
    if (arrows[j].binder != canon[j])
      canon_rho = subst_type(canon_rho, arrows[j].binder, mk_var(canon[j]));
  RTypePtr canon_sig = canon_rho;
  for (std::size_t i = arrows.size(); i > 0; --i)
    canon_sig = rt_fun(canon[i - 1], canon_input(i - 1), canon_sig);

  ExprPtr canon_body = inner;
  for (std::size_t i = 0; i < bound_params; ++i)
    if (old_lam_names[i] != canon[i])
      canon_body = subst_expr(canon_body, old_lam_names[i], mk_var(canon[i]));
  for (std::size_t i = bound_params; i > 0; --i)
    canon_body = mk_lam(canon[i - 1], canon_input(i - 1), canon_body, e->span);

  // Declared metrics are written against the source parameter names.
  MetricSpec metric = f.metric.value_or(MetricSpec{});
  for (auto& entry : metric.entries)
    for (std::size_t i = 0; i < bound_params; ++i)
      if (old_lam_names[i] != canon[i] && old_lam_names[i] != "_")
        entry = subst_expr(entry, old_lam_names[i], mk_var(canon[i]));

  bool weaken = !naive() && !is_serious_base(result_base(signature));
  RTypePtr rec_type =
      weaken ? weaken_i(canon_sig, metric, g, e->span, bound_params)
             : canon_sig;  // T-Rec-S keeps the unweakened type

  std::string fname = f.fname;
  if (g.contains(fname) || fname == "_") {
    std::set<std::string> body_avoid = base_avoid;
    for (const auto& chosen : canon) body_avoid.insert(chosen);
    collect_free_vars(canon_body, body_avoid);
    fname = fresh_name(f.fname == "_" ? "f" : f.fname, body_avoid);
    canon_body = subst_expr(canon_body, f.fname, mk_var(fname));
  }
  g.push(fname, rec_type);
  bool inserted = weaken && weakened_recs_.insert(fname).second;
  struct Cleanup {
    TEnv& g;
    std::set<std::string>& recs;
    std::string name;
    bool inserted;
    ~Cleanup() {
      g.pop();
      if (inserted) recs.erase(name);
    }
  } cleanup{g, weakened_recs_, fname, inserted};
  check_i(g, canon_body, canon_sig);
  return signature;
}

// ---- programs ---------------------------------------------------------------------

Report Checker::check_program(const Program& p) {
  Report report;
  report.mode = mode_;
  TEnv g;
  for (const auto& d : p.decls) {
    TerminationStatus status = TerminationStatus::Trivial;
    RTypePtr rightmost = result_base(d.signature);
    if (is_serious_base(rightmost))
      status = d.kind == Decl::Kind::Rec ? TerminationStatus::SeriousByAnnotation
                                         : TerminationStatus::Serious;
    try {
      wf_i(g, d.signature, d.span);
      check_i(g, decl_value(d), d.signature);
    } catch (Raise& r) {
      if (r.err.span.line == 0) r.err.span = d.span;
      report.errors.push_back(std::move(r.err));
    }
    report.bindings.push_back({d.name, pretty(d.signature), status});
    g.push(d.name, d.signature);
  }
  RTypePtr main_ty;
  try {
    if (p.main_sig) {
      wf_i(g, *p.main_sig, p.main_span);
      check_i(g, p.main_expr, *p.main_sig);
      main_ty = *p.main_sig;
    } else {
      main_ty = synth_i(g, p.main_expr);
      // Unannotated main defaults to a serious Int result.
      sub_i(g, main_ty, rt_int_div(), p.main_span);
    }
  } catch (Raise& r) {
    if (r.err.span.line == 0) r.err.span = p.main_span;
    report.errors.push_back(std::move(r.err));
  }
  BindingReport main_report;
  main_report.name = "main";
  main_report.type = main_ty ? pretty(main_ty) : "?";
  main_report.termination = main_ty && is_trivial_type(main_ty)
                                ? TerminationStatus::Trivial
                                : TerminationStatus::Serious;
  report.bindings.push_back(std::move(main_report));
  report.query_count = queries_.size();
  report.solver_ms = solver_us_ / 1000;
  return report;
}

// ---- public wrappers -----------------------------------------------------------------

std::optional<TypeError> Checker::wf(const TEnv& g, const RTypePtr& t) {
  TEnv env = g;
  try {
    wf_i(env, t, Span{});
    return std::nullopt;
  } catch (Raise& r) {
    return r.err;
  }
}

std::optional<TypeError> Checker::sub(const TEnv& g, const RTypePtr& t1,
                                      const RTypePtr& t2, Span sp) {
  TEnv env = g;
  try {
    sub_i(env, t1, t2, sp);
    return std::nullopt;
  } catch (Raise& r) {
    return r.err;
  }
}

std::variant<RTypePtr, TypeError> Checker::synth(const TEnv& g, const ExprPtr& e) {
  TEnv env = g;
  try {
    return synth_i(env, e);
  } catch (Raise& r) {
    return r.err;
  }
}

std::optional<TypeError> Checker::check(const TEnv& g, const ExprPtr& e,
                                        const RTypePtr& t) {
  TEnv env = g;
  try {
    check_i(env, e, t);
    return std::nullopt;
  } catch (Raise& r) {
    return r.err;
  }
}

std::variant<RTypePtr, TypeError> Checker::weaken_rec_type(
    const RTypePtr& signature, const MetricSpec& metric, const TEnv& g, Span sp) {
  TEnv env = g;
  try {
    return weaken_i(signature, metric, env, sp);
  } catch (Raise& r) {
    return r.err;
  }
}

std::function<bool(const ExprPtr&)> checker_oracle(smt::Backend backend) {
  return [backend](const ExprPtr& e) {
    Checker checker(CheckMode::Sound, backend);
    TEnv g;
    auto r = checker.synth(g, e);
    const auto* ty = std::get_if<RTypePtr>(&r);
    return ty && is_trivial_type(*ty);
  };
}

}  // namespace lazyref::tc
