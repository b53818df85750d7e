#include "lazyref/logic.hpp"

#include <sstream>
#include <stdexcept>

#include "lazyref/pretty.hpp"
#include "lazyref/subst.hpp"

namespace lazyref::logic {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

Pred p_var(std::string name) {
  return std::make_shared<PredNode>(PredNode{PVar{std::move(name)}});
}
Pred p_int(std::int64_t v) { return std::make_shared<PredNode>(PredNode{PInt{v}}); }
Pred p_bool(bool v) { return std::make_shared<PredNode>(PredNode{PBool{v}}); }
Pred p_cmp(CmpOp op, Pred l, Pred r) {
  return std::make_shared<PredNode>(PredNode{PCmp{op, std::move(l), std::move(r)}});
}
Pred p_arith(ArithOp op, Pred l, Pred r) {
  return std::make_shared<PredNode>(
      PredNode{PArith{op, std::move(l), std::move(r)}});
}
Pred p_mulc(std::int64_t coeff, Pred operand) {
  return std::make_shared<PredNode>(PredNode{PMulC{coeff, std::move(operand)}});
}
Pred p_not(Pred p) { return std::make_shared<PredNode>(PredNode{PNot{std::move(p)}}); }
Pred p_conn(ConnOp op, Pred l, Pred r) {
  return std::make_shared<PredNode>(PredNode{PConn{op, std::move(l), std::move(r)}});
}

Pred p_and_all(const std::vector<Pred>& ps) {
  if (ps.empty()) return p_bool(true);
  Pred acc = ps.front();
  for (std::size_t i = 1; i < ps.size(); ++i) acc = p_and(acc, ps[i]);
  return acc;
}

bool pred_equal(const Pred& a, const Pred& b) {
  if (!a || !b) return a == b;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const PVar& v) { return v.name == std::get<PVar>(b->node).name; },
          [&](const PInt& v) { return v.v == std::get<PInt>(b->node).v; },
          [&](const PBool& v) { return v.v == std::get<PBool>(b->node).v; },
          [&](const PCmp& v) {
            const auto& o = std::get<PCmp>(b->node);
            return v.op == o.op && pred_equal(v.l, o.l) && pred_equal(v.r, o.r);
          },
          [&](const PArith& v) {
            const auto& o = std::get<PArith>(b->node);
            return v.op == o.op && pred_equal(v.l, o.l) && pred_equal(v.r, o.r);
          },
          [&](const PMulC& v) {
            const auto& o = std::get<PMulC>(b->node);
            return v.coeff == o.coeff && pred_equal(v.operand, o.operand);
          },
          [&](const PNot& v) {
            return pred_equal(v.p, std::get<PNot>(b->node).p);
          },
          [&](const PConn& v) {
            const auto& o = std::get<PConn>(b->node);
            return v.op == o.op && pred_equal(v.l, o.l) && pred_equal(v.r, o.r);
          }},
      a->node);
}

namespace {
const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "/=";
  }
  return "?";
}
const char* conn_text(ConnOp op) {
  switch (op) {
    case ConnOp::And: return "&&";
    case ConnOp::Or: return "||";
    case ConnOp::Imp: return "==>";
    case ConnOp::Iff: return "<=>";
  }
  return "?";
}
}  // namespace

std::string to_string(const Pred& p) {
  std::ostringstream os;
  std::visit(
      overloaded{[&](const PVar& v) { os << v.name; },
                 [&](const PInt& v) { os << v.v; },
                 [&](const PBool& v) { os << (v.v ? "true" : "false"); },
                 [&](const PCmp& v) {
                   os << '(' << to_string(v.l) << ' ' << cmp_text(v.op) << ' '
                      << to_string(v.r) << ')';
                 },
                 [&](const PArith& v) {
                   os << '(' << to_string(v.l)
                      << (v.op == ArithOp::Add ? " + " : " - ") << to_string(v.r)
                      << ')';
                 },
                 [&](const PMulC& v) {
                   os << '(' << v.coeff << " * " << to_string(v.operand) << ')';
                 },
                 [&](const PNot& v) { os << "!(" << to_string(v.p) << ')'; },
                 [&](const PConn& v) {
                   os << '(' << to_string(v.l) << ' ' << conn_text(v.op) << ' '
                      << to_string(v.r) << ')';
                 }},
      p->node);
  return os.str();
}

void collect_pred_vars(const Pred& p, std::set<std::string>& out) {
  std::visit(overloaded{[&](const PVar& v) { out.insert(v.name); },
                        [&](const PInt&) {}, [&](const PBool&) {},
                        [&](const PCmp& v) {
                          collect_pred_vars(v.l, out);
                          collect_pred_vars(v.r, out);
                        },
                        [&](const PArith& v) {
                          collect_pred_vars(v.l, out);
                          collect_pred_vars(v.r, out);
                        },
                        [&](const PMulC& v) { collect_pred_vars(v.operand, out); },
                        [&](const PNot& v) { collect_pred_vars(v.p, out); },
                        [&](const PConn& v) {
                          collect_pred_vars(v.l, out);
                          collect_pred_vars(v.r, out);
                        }},
             p->node);
}

// ---- translation ------------------------------------------------------------

namespace {
std::optional<std::int64_t> literal_of(const Pred& p) {
  if (const auto* n = std::get_if<PInt>(&p->node)) return n->v;
  return std::nullopt;
}
}  // namespace

std::variant<Pred, NotLogical> to_pred(const ExprPtr& e) {
  auto bad = [&](std::string reason) -> std::variant<Pred, NotLogical> {
    return NotLogical{std::move(reason) + ": " + pretty(e), e->span};
  };
  if (const auto* v = std::get_if<VarE>(&e->node)) return p_var(v->name);
  if (const auto* c = std::get_if<ConE>(&e->node)) {
    if (const auto* n = std::get_if<std::int64_t>(&c->val)) return p_int(*n);
    if (const auto* b = std::get_if<bool>(&c->val)) return p_bool(*b);
    return bad("constant is not in the logical fragment");
  }
  if (std::holds_alternative<LamE>(e->node)) return bad("lambda in refinement");
  if (std::holds_alternative<LetE>(e->node)) return bad("let in refinement");
  if (std::holds_alternative<FixE>(e->node)) return bad("rec in refinement");
  if (std::holds_alternative<IfE>(e->node)) return bad("if in refinement");

  auto spine = const_spine(e);
  if (!spine) return bad("application of a program function in refinement");
  const auto* op = std::get_if<PrimOp>(&spine->head);
  if (!op || spine->args.size() != static_cast<std::size_t>(arity(spine->head)))
    return bad("application is not a saturated primitive");

  std::vector<Pred> args;
  for (const auto& a : spine->args) {
    auto r = to_pred(a);
    if (auto* err = std::get_if<NotLogical>(&r)) return *err;
    args.push_back(std::get<Pred>(r));
  }

  switch (*op) {
    case PrimOp::Add: return p_arith(ArithOp::Add, args[0], args[1]);
    case PrimOp::Sub: return p_arith(ArithOp::Sub, args[0], args[1]);
    case PrimOp::Mul: {
      auto cl = literal_of(args[0]);
      auto cr = literal_of(args[1]);
      if (cl && cr) return p_int(*cl * *cr);
      if (cl) return p_mulc(*cl, args[1]);
      if (cr) return p_mulc(*cr, args[0]);
      return bad("nonlinear multiplication in refinement");
    }
    case PrimOp::Lt: return p_cmp(CmpOp::Lt, args[0], args[1]);
    case PrimOp::Le: return p_cmp(CmpOp::Le, args[0], args[1]);
    case PrimOp::Gt: return p_cmp(CmpOp::Gt, args[0], args[1]);
    case PrimOp::Ge: return p_cmp(CmpOp::Ge, args[0], args[1]);
    case PrimOp::Eq: return p_cmp(CmpOp::Eq, args[0], args[1]);
    case PrimOp::Ne: return p_cmp(CmpOp::Ne, args[0], args[1]);
    case PrimOp::And: return p_and(args[0], args[1]);
    case PrimOp::Or: return p_or(args[0], args[1]);
    case PrimOp::Not: return p_not(args[0]);
    default:
      return bad("primitive '" + prim_name(*op) + "' is not in the logical fragment");
  }
}

// ---- sorts ------------------------------------------------------------------

std::variant<Sort, SortError> sort_check(const SortMap& decls, const Pred& p) {
  auto rec = [&](const Pred& q) { return sort_check(decls, q); };
  auto want = [&](const Pred& q, Sort s,
                  const char* what) -> std::optional<SortError> {
    auto r = sort_check(decls, q);
    if (auto* err = std::get_if<SortError>(&r)) return *err;
    if (std::get<Sort>(r) != s)
      return SortError{std::string(what) + " expects " +
                       (s == Sort::Int ? "an integer" : "a boolean") + " operand: " +
                       to_string(q)};
    return std::nullopt;
  };
  return std::visit(
      overloaded{
          [&](const PVar& v) -> std::variant<Sort, SortError> {
            auto it = decls.find(v.name);
            if (it == decls.end())
              return SortError{"variable '" + v.name +
                               "' is not declared in the refinement scope"};
            return it->second;
          },
          [&](const PInt&) -> std::variant<Sort, SortError> { return Sort::Int; },
          [&](const PBool&) -> std::variant<Sort, SortError> { return Sort::Bool; },
          [&](const PCmp& c) -> std::variant<Sort, SortError> {
            if (c.op == CmpOp::Eq || c.op == CmpOp::Ne) {
              auto l = rec(c.l);
              if (auto* err = std::get_if<SortError>(&l)) return *err;
              auto r = rec(c.r);
              if (auto* err = std::get_if<SortError>(&r)) return *err;
              if (std::get<Sort>(l) != std::get<Sort>(r))
                return SortError{"equality between different sorts: " +
                                 to_string(c.l) + " vs " + to_string(c.r)};
              return Sort::Bool;
            }
            if (auto err = want(c.l, Sort::Int, "comparison")) return *err;
            if (auto err = want(c.r, Sort::Int, "comparison")) return *err;
            return Sort::Bool;
          },
          [&](const PArith& a) -> std::variant<Sort, SortError> {
            if (auto err = want(a.l, Sort::Int, "arithmetic")) return *err;
            if (auto err = want(a.r, Sort::Int, "arithmetic")) return *err;
            return Sort::Int;
          },
          [&](const PMulC& m) -> std::variant<Sort, SortError> {
            if (auto err = want(m.operand, Sort::Int, "multiplication")) return *err;
            return Sort::Int;
          },
          [&](const PNot& n) -> std::variant<Sort, SortError> {
            if (auto err = want(n.p, Sort::Bool, "negation")) return *err;
            return Sort::Bool;
          },
          [&](const PConn& c) -> std::variant<Sort, SortError> {
            if (auto err = want(c.l, Sort::Bool, "connective")) return *err;
            if (auto err = want(c.r, Sort::Bool, "connective")) return *err;
            return Sort::Bool;
          }},
      p->node);
}

// ---- environment embedding ----------------------------------------------------

TEnv strict_env(const TEnv& g) {
  TEnv out;
  for (const auto& [name, type] : g.bindings())
    if (!is_serious_base(type)) out.push(name, type);
  return out;
}

std::variant<std::vector<Pred>, NotLogical> embed_env(const TEnv& g) {
  std::vector<Pred> out;
  TEnv strict = strict_env(g);
  for (const auto& [name, type] : strict.bindings()) {
    const auto* b = as_base(type);
    if (!b) continue;  // arrows contribute nothing
    if (is_true_lit(b->refinement)) continue;
    ExprPtr renamed = subst_expr(b->refinement, b->value_binder, mk_var(name));
    auto r = to_pred(renamed);
    if (auto* err = std::get_if<NotLogical>(&r)) return *err;
    out.push_back(std::get<Pred>(r));
  }
  return out;
}

// ---- termination orders --------------------------------------------------------

Pred lex_pred(const std::vector<Pred>& older, const std::vector<Pred>& newer) {
  if (older.size() != newer.size() || older.empty())
    throw std::invalid_argument("lex_pred: metric lists must be nonempty and equal");
  Pred result;
  for (std::size_t i = 0; i < older.size(); ++i) {
    Pred clause = p_cmp(CmpOp::Lt, newer[i], older[i]);
    for (std::size_t j = i; j > 0; --j)
      clause = p_and(p_cmp(CmpOp::Eq, newer[j - 1], older[j - 1]), clause);
    result = result ? p_or(result, clause) : clause;
  }
  return result;
}

// ---- evaluation -----------------------------------------------------------------

namespace {
std::int64_t wrap(__int128 v) { return static_cast<std::int64_t>(v); }
}  // namespace

std::optional<Value> eval_pred(const Pred& p, const Assignment& a) {
  auto as_int = [&](const Pred& q) -> std::optional<std::int64_t> {
    auto v = eval_pred(q, a);
    if (!v) return std::nullopt;
    if (const auto* n = std::get_if<std::int64_t>(&*v)) return *n;
    return std::nullopt;
  };
  auto as_bool = [&](const Pred& q) -> std::optional<bool> {
    auto v = eval_pred(q, a);
    if (!v) return std::nullopt;
    if (const auto* b = std::get_if<bool>(&*v)) return *b;
    return std::nullopt;
  };
  return std::visit(
      overloaded{
          [&](const PVar& v) -> std::optional<Value> {
            auto it = a.find(v.name);
            if (it == a.end()) return std::nullopt;
            return it->second;
          },
          [&](const PInt& v) -> std::optional<Value> { return Value{v.v}; },
          [&](const PBool& v) -> std::optional<Value> { return Value{v.v}; },
          [&](const PCmp& c) -> std::optional<Value> {
            if (c.op == CmpOp::Eq || c.op == CmpOp::Ne) {
              auto l = eval_pred(c.l, a);
              auto r = eval_pred(c.r, a);
              if (!l || !r || l->index() != r->index()) return std::nullopt;
              bool eq = *l == *r;
              return Value{c.op == CmpOp::Eq ? eq : !eq};
            }
            auto l = as_int(c.l);
            auto r = as_int(c.r);
            if (!l || !r) return std::nullopt;
            switch (c.op) {
              case CmpOp::Lt: return Value{*l < *r};
              case CmpOp::Le: return Value{*l <= *r};
              case CmpOp::Gt: return Value{*l > *r};
              case CmpOp::Ge: return Value{*l >= *r};
              default: return std::nullopt;
            }
          },
          [&](const PArith& ar) -> std::optional<Value> {
            auto l = as_int(ar.l);
            auto r = as_int(ar.r);
            if (!l || !r) return std::nullopt;
            __int128 res = ar.op == ArithOp::Add
                               ? static_cast<__int128>(*l) + *r
                               : static_cast<__int128>(*l) - *r;
            return Value{wrap(res)};
          },
          [&](const PMulC& m) -> std::optional<Value> {
            auto v = as_int(m.operand);
            if (!v) return std::nullopt;
            return Value{wrap(static_cast<__int128>(m.coeff) * *v)};
          },
          [&](const PNot& n) -> std::optional<Value> {
            auto v = as_bool(n.p);
            if (!v) return std::nullopt;
            return Value{!*v};
          },
          [&](const PConn& c) -> std::optional<Value> {
            auto l = as_bool(c.l);
            auto r = as_bool(c.r);
            if (!l || !r) return std::nullopt;
            switch (c.op) {
              case ConnOp::And: return Value{*l && *r};
              case ConnOp::Or: return Value{*l || *r};
              case ConnOp::Imp: return Value{!*l || *r};
              case ConnOp::Iff: return Value{*l == *r};
            }
            return std::nullopt;
          }},
      p->node);
}

}  // namespace lazyref::logic
