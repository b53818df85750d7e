#include "lazyref/ast.hpp"

#include <cassert>
#include <map>

#include "lazyref/subst.hpp"

namespace lazyref {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

// ---- constructors ---------------------------------------------------------

ExprPtr mk_var(std::string name, Span sp) {
  return std::make_shared<Expr>(Expr{sp, VarE{std::move(name)}});
}
ExprPtr mk_int(std::int64_t v, Span sp) {
  return std::make_shared<Expr>(Expr{sp, ConE{ConstVal{v}}});
}
ExprPtr mk_boolc(bool v, Span sp) {
  return std::make_shared<Expr>(Expr{sp, ConE{ConstVal{v}}});
}
ExprPtr mk_prim(PrimOp op, Span sp) {
  return std::make_shared<Expr>(Expr{sp, ConE{ConstVal{op}}});
}
ExprPtr mk_crash(Span sp) {
  return std::make_shared<Expr>(Expr{sp, ConE{ConstVal{CrashTag{}}}});
}
ExprPtr mk_lam(std::string binder, RTypePtr ann, ExprPtr body, Span sp) {
  return std::make_shared<Expr>(
      Expr{sp, LamE{std::move(binder), std::move(ann), std::move(body)}});
}
ExprPtr mk_app(ExprPtr fn, ExprPtr arg, Span sp) {
  return std::make_shared<Expr>(Expr{sp, AppE{std::move(fn), std::move(arg)}});
}
ExprPtr mk_app2(ExprPtr fn, ExprPtr a, ExprPtr b, Span sp) {
  return mk_app(mk_app(std::move(fn), std::move(a), sp), std::move(b), sp);
}
ExprPtr mk_binop(PrimOp op, ExprPtr a, ExprPtr b, Span sp) {
  return mk_app2(mk_prim(op, sp), std::move(a), std::move(b), sp);
}
ExprPtr mk_let(std::string binder, ExprPtr bound, ExprPtr body, Span sp) {
  return std::make_shared<Expr>(
      Expr{sp, LetE{std::move(binder), std::move(bound), std::move(body)}});
}
ExprPtr mk_fix(std::string fname, std::string binder, RTypePtr param_type,
               RTypePtr result_type, std::optional<MetricSpec> metric,
               ExprPtr body, Span sp) {
  return std::make_shared<Expr>(
      Expr{sp, FixE{std::move(fname), std::move(binder), std::move(param_type),
                    std::move(result_type), std::move(metric), std::move(body)}});
}
ExprPtr mk_if(ExprPtr cond, ExprPtr then_e, ExprPtr else_e, Span sp) {
  return std::make_shared<Expr>(
      Expr{sp, IfE{std::move(cond), std::move(then_e), std::move(else_e)}});
}

RTypePtr rt_base(std::string value_binder, BaseType base, Label label,
                 ExprPtr refinement) {
  // Well-formedness enforces that Div-labeled bases are unrefined; the
  // constructor stays permissive so checkers can reject bad inputs.
  return std::make_shared<RType>(
      RType{RBase{std::move(value_binder), base, label, std::move(refinement)}});
}
RTypePtr rt_fun(std::string binder, RTypePtr input, RTypePtr output) {
  return std::make_shared<RType>(
      RType{RFun{std::move(binder), std::move(input), std::move(output)}});
}
RTypePtr rt_unrefined(BaseType base, Label label) {
  return rt_base("v", base, label, mk_boolc(true));
}
RTypePtr rt_int() { return rt_unrefined(BaseType::Int, Label::Fin); }
RTypePtr rt_bool() { return rt_unrefined(BaseType::Bool, Label::Fin); }
RTypePtr rt_int_div() { return rt_unrefined(BaseType::Int, Label::Div); }
RTypePtr rt_bool_div() { return rt_unrefined(BaseType::Bool, Label::Div); }

// ---- inspection -----------------------------------------------------------

const RBase* as_base(const RTypePtr& t) { return std::get_if<RBase>(&t->node); }
const RFun* as_fun(const RTypePtr& t) { return std::get_if<RFun>(&t->node); }

bool is_serious_base(const RTypePtr& t) {
  const auto* b = as_base(t);
  return b && b->label == Label::Div;
}
bool is_trivial_type(const RTypePtr& t) { return !is_serious_base(t); }

RTypePtr result_base(const RTypePtr& t) {
  RTypePtr cur = t;
  while (const auto* f = as_fun(cur)) cur = f->output;
  return cur;
}

bool is_true_lit(const ExprPtr& e) {
  if (!e) return false;
  const auto* c = std::get_if<ConE>(&e->node);
  if (!c) return false;
  const auto* b = std::get_if<bool>(&c->val);
  return b && *b;
}

bool is_crash(const ExprPtr& e) {
  const auto* c = std::get_if<ConE>(&e->node);
  return c && std::holds_alternative<CrashTag>(c->val);
}

int arity(const ConstVal& c) {
  return std::visit(
      overloaded{[](std::int64_t) { return 0; }, [](bool) { return 0; },
                 [](CrashTag) { return 0; },
                 [](PrimOp op) {
                   switch (op) {
                     case PrimOp::Not:
                     case PrimOp::Error:
                       return 1;
                     default:
                       return 2;
                   }
                 }},
      c);
}

std::string prim_name(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Div: return "/";
    case PrimOp::DivFun: return "div";
    case PrimOp::Lt: return "<";
    case PrimOp::Le: return "<=";
    case PrimOp::Gt: return ">";
    case PrimOp::Ge: return ">=";
    case PrimOp::Eq: return "==";
    case PrimOp::Ne: return "/=";
    case PrimOp::And: return "&&";
    case PrimOp::Or: return "||";
    case PrimOp::Not: return "not";
    case PrimOp::Assert: return "assert";
    case PrimOp::Error: return "error";
  }
  return "?";
}

std::string const_name(const ConstVal& c) {
  return std::visit(
      overloaded{[](std::int64_t n) { return std::to_string(n); },
                 [](bool b) { return std::string(b ? "true" : "false"); },
                 [](PrimOp op) { return prim_name(op); },
                 [](CrashTag) { return std::string("crash"); }},
      c);
}

std::optional<ConstSpine> const_spine(const ExprPtr& e) {
  std::vector<ExprPtr> args;
  ExprPtr cur = e;
  while (const auto* app = std::get_if<AppE>(&cur->node)) {
    args.push_back(app->arg);
    cur = app->fn;
  }
  const auto* c = std::get_if<ConE>(&cur->node);
  if (!c) return std::nullopt;
  std::reverse(args.begin(), args.end());
  return ConstSpine{c->val, std::move(args)};
}

bool is_value(const ExprPtr& e) {
  return std::visit(
      overloaded{[](const VarE&) { return false; },
                 [](const ConE& c) {
                   return !std::holds_alternative<CrashTag>(c.val);
                 },
                 [](const LamE&) { return true; }, [](const FixE&) { return true; },
                 [&](const AppE&) {
                   auto spine = const_spine(e);
                   if (!spine) return false;
                   if (std::holds_alternative<CrashTag>(spine->head)) return false;
                   if (spine->args.size() >=
                       static_cast<std::size_t>(arity(spine->head)))
                     return false;
                   for (const auto& a : spine->args)
                     if (!is_value(a)) return false;
                   return true;
                 },
                 [](const LetE&) { return false; }, [](const IfE&) { return false; }},
      e->node);
}

// ---- free variables -------------------------------------------------------

namespace {
void fv_expr(const ExprPtr& e, std::set<std::string>& bound,
             std::set<std::string>& out);

void fv_type(const RTypePtr& t, std::set<std::string>& bound,
             std::set<std::string>& out) {
  if (!t) return;
  std::visit(overloaded{[&](const RBase& b) {
                          bool fresh = bound.insert(b.value_binder).second;
                          fv_expr(b.refinement, bound, out);
                          if (fresh) bound.erase(b.value_binder);
                        },
                        [&](const RFun& f) {
                          fv_type(f.input, bound, out);
                          bool fresh = bound.insert(f.binder).second;
                          fv_type(f.output, bound, out);
                          if (fresh) bound.erase(f.binder);
                        }},
             t->node);
}

void fv_expr(const ExprPtr& e, std::set<std::string>& bound,
             std::set<std::string>& out) {
  if (!e) return;
  std::visit(
      overloaded{[&](const VarE& v) {
                   if (!bound.count(v.name)) out.insert(v.name);
                 },
                 [&](const ConE&) {},
                 [&](const LamE& l) {
                   fv_type(l.ann, bound, out);
                   bool fresh = bound.insert(l.binder).second;
                   fv_expr(l.body, bound, out);
                   if (fresh) bound.erase(l.binder);
                 },
                 [&](const AppE& a) {
                   fv_expr(a.fn, bound, out);
                   fv_expr(a.arg, bound, out);
                 },
                 [&](const LetE& l) {
                   fv_expr(l.bound, bound, out);
                   bool fresh = bound.insert(l.binder).second;
                   fv_expr(l.body, bound, out);
                   if (fresh) bound.erase(l.binder);
                 },
                 [&](const FixE& f) {
                   fv_type(f.param_type, bound, out);
                   bool fx = bound.insert(f.binder).second;
                   fv_type(f.result_type, bound, out);
                   bool ff = bound.insert(f.fname).second;
                   // Metric entries mention parameters only, which are bound
                   // here or by lambdas inside the body.
                   fv_expr(f.body, bound, out);
                   if (ff) bound.erase(f.fname);
                   if (fx) bound.erase(f.binder);
                 },
                 [&](const IfE& i) {
                   fv_expr(i.cond, bound, out);
                   fv_expr(i.then_e, bound, out);
                   fv_expr(i.else_e, bound, out);
                 }},
      e->node);
}
}  // namespace

void collect_free_vars(const ExprPtr& e, std::set<std::string>& out) {
  std::set<std::string> bound;
  fv_expr(e, bound, out);
}
void collect_free_vars(const RTypePtr& t, std::set<std::string>& out) {
  std::set<std::string> bound;
  fv_type(t, bound, out);
}
std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> out;
  collect_free_vars(e, out);
  return out;
}
std::set<std::string> free_vars(const RTypePtr& t) {
  std::set<std::string> out;
  collect_free_vars(t, out);
  return out;
}

// ---- alpha equivalence ----------------------------------------------------

namespace {
using NameMap = std::map<std::string, std::string>;

bool aeq_expr(const ExprPtr& a, const ExprPtr& b, NameMap& la, NameMap& ra);

bool aeq_name(const std::string& x, const std::string& y, const NameMap& la,
              const NameMap& ra) {
  auto ia = la.find(x);
  auto ib = ra.find(y);
  if (ia != la.end() || ib != ra.end()) {
    if (ia == la.end() || ib == ra.end()) return false;
    return ia->second == ib->second;
  }
  return x == y;
}

struct Bind {
  NameMap& la;
  NameMap& ra;
  std::string x, y;
  std::optional<std::string> oldx, oldy;
  int id;
  Bind(NameMap& la, NameMap& ra, std::string x_, std::string y_, int id_)
      : la(la), ra(ra), x(std::move(x_)), y(std::move(y_)), id(id_) {
    auto tag = "#" + std::to_string(id);
    if (auto it = la.find(x); it != la.end()) oldx = it->second;
    if (auto it = ra.find(y); it != ra.end()) oldy = it->second;
    la[x] = tag;
    ra[y] = tag;
  }
  ~Bind() {
    if (oldx) la[x] = *oldx; else la.erase(x);
    if (oldy) ra[y] = *oldy; else ra.erase(y);
  }
};

thread_local int g_bind_id = 0;

bool aeq_type(const RTypePtr& a, const RTypePtr& b, NameMap& la, NameMap& ra) {
  if (!a || !b) return a == b;
  if (a->node.index() != b->node.index()) return false;
  if (const auto* ba = std::get_if<RBase>(&a->node)) {
    const auto& bb = std::get<RBase>(b->node);
    if (ba->base != bb.base || ba->label != bb.label) return false;
    Bind bind(la, ra, ba->value_binder, bb.value_binder, ++g_bind_id);
    return aeq_expr(ba->refinement, bb.refinement, la, ra);
  }
  const auto& fa = std::get<RFun>(a->node);
  const auto& fb = std::get<RFun>(b->node);
  if (!aeq_type(fa.input, fb.input, la, ra)) return false;
  Bind bind(la, ra, fa.binder, fb.binder, ++g_bind_id);
  return aeq_type(fa.output, fb.output, la, ra);
}

bool aeq_expr(const ExprPtr& a, const ExprPtr& b, NameMap& la, NameMap& ra) {
  if (!a || !b) return a == b;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const VarE& v) {
            return aeq_name(v.name, std::get<VarE>(b->node).name, la, ra);
          },
          [&](const ConE& c) { return c.val == std::get<ConE>(b->node).val; },
          [&](const LamE& l) {
            const auto& r = std::get<LamE>(b->node);
            if ((l.ann == nullptr) != (r.ann == nullptr)) return false;
            if (l.ann && !aeq_type(l.ann, r.ann, la, ra)) return false;
            Bind bind(la, ra, l.binder, r.binder, ++g_bind_id);
            return aeq_expr(l.body, r.body, la, ra);
          },
          [&](const AppE& ap) {
            const auto& r = std::get<AppE>(b->node);
            return aeq_expr(ap.fn, r.fn, la, ra) && aeq_expr(ap.arg, r.arg, la, ra);
          },
          [&](const LetE& l) {
            const auto& r = std::get<LetE>(b->node);
            if (!aeq_expr(l.bound, r.bound, la, ra)) return false;
            Bind bind(la, ra, l.binder, r.binder, ++g_bind_id);
            return aeq_expr(l.body, r.body, la, ra);
          },
          [&](const FixE& f) {
            const auto& r = std::get<FixE>(b->node);
            if (!aeq_type(f.param_type, r.param_type, la, ra)) return false;
            Bind bx(la, ra, f.binder, r.binder, ++g_bind_id);
            if (!aeq_type(f.result_type, r.result_type, la, ra)) return false;
            if (f.metric.has_value() != r.metric.has_value()) return false;
            if (f.metric) {
              if (f.metric->kind != r.metric->kind ||
                  f.metric->param_index != r.metric->param_index ||
                  f.metric->entries.size() != r.metric->entries.size())
                return false;
              for (std::size_t i = 0; i < f.metric->entries.size(); ++i)
                if (!aeq_expr(f.metric->entries[i], r.metric->entries[i], la, ra))
                  return false;
            }
            Bind bf(la, ra, f.fname, r.fname, ++g_bind_id);
            return aeq_expr(f.body, r.body, la, ra);
          },
          [&](const IfE& i) {
            const auto& r = std::get<IfE>(b->node);
            return aeq_expr(i.cond, r.cond, la, ra) &&
                   aeq_expr(i.then_e, r.then_e, la, ra) &&
                   aeq_expr(i.else_e, r.else_e, la, ra);
          }},
      a->node);
}
}  // namespace

bool alpha_eq(const ExprPtr& a, const ExprPtr& b) {
  NameMap la, ra;
  return aeq_expr(a, b, la, ra);
}
bool alpha_eq(const RTypePtr& a, const RTypePtr& b) {
  NameMap la, ra;
  return aeq_type(a, b, la, ra);
}

// ---- programs -------------------------------------------------------------

bool split_signature(const RTypePtr& sig, const std::vector<std::string>& params,
                     std::vector<std::pair<std::string, RTypePtr>>& binds,
                     RTypePtr& result) {
  RTypePtr cur = sig;
  binds.clear();
  for (const auto& p : params) {
    const auto* f = as_fun(cur);
    if (!f) return false;
    binds.emplace_back(p, f->input);
    // Remaining signature refers to the declared binder; rename it to the
    // parameter actually used in the body.
    RTypePtr rest = f->output;
    if (f->binder != p) rest = subst_type(rest, f->binder, mk_var(p));
    cur = rest;
  }
  result = cur;
  return true;
}

ExprPtr decl_value(const Decl& d) {
  std::vector<std::pair<std::string, RTypePtr>> binds;
  RTypePtr result;
  bool ok = split_signature(d.signature, d.params, binds, result);
  assert(ok && "declaration parameter list exceeds signature arrows");
  (void)ok;
  if (d.kind == Decl::Kind::Rec) {
    ExprPtr body = d.body;
    for (std::size_t i = binds.size(); i > 1; --i)
      body = mk_lam(binds[i - 1].first, binds[i - 1].second, body, d.span);
    RTypePtr rest = result;
    for (std::size_t i = binds.size(); i > 1; --i)
      rest = rt_fun(binds[i - 1].first, binds[i - 1].second, rest);
    return mk_fix(d.name, binds[0].first, binds[0].second, rest, d.metric, body,
                  d.span);
  }
  ExprPtr body = d.body;
  for (std::size_t i = binds.size(); i > 0; --i)
    body = mk_lam(binds[i - 1].first, binds[i - 1].second, body, d.span);
  return body;
}

ExprPtr Program::desugar() const {
  ExprPtr acc = main_expr;
  for (auto it = decls.rbegin(); it != decls.rend(); ++it)
    acc = mk_let(it->name, decl_value(*it), acc, it->span);
  return acc;
}

}  // namespace lazyref
