#include "lazyref/pretty.hpp"

#include <sstream>

namespace lazyref {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Precedence levels: 0 lambda/let/if, 1 ||, 2 &&, 3 comparison, 4 additive,
// 5 multiplicative, 6 application, 7 atom.
int prim_prec(PrimOp op) {
  switch (op) {
    case PrimOp::Or: return 1;
    case PrimOp::And: return 2;
    case PrimOp::Lt:
    case PrimOp::Le:
    case PrimOp::Gt:
    case PrimOp::Ge:
    case PrimOp::Eq:
    case PrimOp::Ne: return 3;
    case PrimOp::Add:
    case PrimOp::Sub: return 4;
    case PrimOp::Mul:
    case PrimOp::Div: return 5;
    default: return 6;
  }
}

bool is_infix(PrimOp op) {
  switch (op) {
    case PrimOp::DivFun:
    case PrimOp::Not:
    case PrimOp::Assert:
    case PrimOp::Error: return false;
    default: return true;
  }
}

void pp_expr(std::ostream& os, const ExprPtr& e, int prec);

void pp_paren(std::ostream& os, const ExprPtr& e, int prec, int min_prec) {
  if (prec < min_prec) {
    os << '(';
    pp_expr(os, e, 0);
    os << ')';
  } else {
    pp_expr(os, e, min_prec);
  }
}

void pp_type(std::ostream& os, const RTypePtr& t) {
  std::visit(
      overloaded{[&](const RBase& b) {
                   const char* name = b.base == BaseType::Int ? "Int" : "Bool";
                   if (b.label == Label::Div) {
                     os << '~' << name;
                   } else if (is_true_lit(b.refinement)) {
                     os << name;
                   } else {
                     os << '{' << b.value_binder << ':' << name << " | ";
                     pp_expr(os, b.refinement, 0);
                     os << '}';
                   }
                 },
                 [&](const RFun& f) {
                   std::set<std::string> fv = free_vars(f.output);
                   if (fv.count(f.binder)) os << f.binder << ':';
                   bool paren = as_fun(f.input) != nullptr;
                   if (paren) os << '(';
                   pp_type(os, f.input);
                   if (paren) os << ')';
                   os << " -> ";
                   pp_type(os, f.output);
                 }},
      t->node);
}

void pp_expr(std::ostream& os, const ExprPtr& e, int prec) {
  std::visit(
      overloaded{
          [&](const VarE& v) { os << v.name; },
          [&](const ConE& c) {
            if (const auto* n = std::get_if<std::int64_t>(&c.val)) {
              if (*n < 0)
                os << "(" << *n << ")";
              else
                os << *n;
              return;
            }
            if (const auto* op = std::get_if<PrimOp>(&c.val)) {
              if (is_infix(*op)) {
                os << '(' << prim_name(*op) << ')';
                return;
              }
            }
            os << const_name(c.val);
          },
          [&](const LamE& l) {
            if (prec > 0) os << '(';
            os << '\\' << l.binder;
            if (l.ann) {
              os << ':';
              pp_type(os, l.ann);
            }
            os << ". ";
            pp_expr(os, l.body, 0);
            if (prec > 0) os << ')';
          },
          [&](const AppE&) {
            // Binary primitive spines print infix.
            auto spine = const_spine(e);
            if (spine && spine->args.size() == 2) {
              if (const auto* op = std::get_if<PrimOp>(&spine->head);
                  op && is_infix(*op)) {
                int p = prim_prec(*op);
                if (prec > p) os << '(';
                // Additive and multiplicative chains associate left;
                // comparisons and boolean connectives print fully bracketed
                // operands one level up.
                pp_paren(os, spine->args[0], p, p);
                os << ' ' << prim_name(*op) << ' ';
                pp_paren(os, spine->args[1], p + 1, p + 1);
                if (prec > p) os << ')';
                return;
              }
            }
            const auto& a = std::get<AppE>(e->node);
            if (prec > 6) os << '(';
            pp_paren(os, a.fn, 6, 6);
            os << ' ';
            pp_paren(os, a.arg, 7, 7);
            if (prec > 6) os << ')';
          },
          [&](const LetE& l) {
            if (prec > 0) os << '(';
            os << "let " << l.binder << " = ";
            pp_expr(os, l.bound, 0);
            os << " in ";
            pp_expr(os, l.body, 0);
            if (prec > 0) os << ')';
          },
          [&](const FixE& f) {
            // Display-only; fix terms have no surface expression form.
            if (prec > 0) os << '(';
            os << "rec " << f.fname << ' ' << f.binder << ". ";
            pp_expr(os, f.body, 0);
            if (prec > 0) os << ')';
          },
          [&](const IfE& i) {
            if (prec > 0) os << '(';
            os << "if ";
            pp_expr(os, i.cond, 0);
            os << " then ";
            pp_expr(os, i.then_e, 0);
            os << " else ";
            pp_expr(os, i.else_e, 0);
            if (prec > 0) os << ')';
          }},
      e->node);
}
}  // namespace

std::string pretty(const ExprPtr& e) {
  std::ostringstream os;
  pp_expr(os, e, 0);
  return os.str();
}

std::string pretty(const RTypePtr& t) {
  std::ostringstream os;
  pp_type(os, t);
  return os.str();
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.decls) {
    os << "val " << d.name << " :: ";
    pp_type(os, d.signature);
    os << ";\n";
    if (d.metric && d.metric->kind == MetricSpec::Kind::Lex) {
      os << "decreases " << d.name << " [";
      for (std::size_t i = 0; i < d.metric->entries.size(); ++i) {
        if (i) os << ", ";
        pp_expr(os, d.metric->entries[i], 0);
      }
      os << "];\n";
    }
    os << (d.kind == Decl::Kind::Rec ? "rec " : "let ") << d.name;
    for (const auto& par : d.params) os << ' ' << par;
    os << " = ";
    pp_expr(os, d.body, 0);
    os << ";\n";
  }
  if (p.main_sig) {
    os << "val main :: ";
    pp_type(os, *p.main_sig);
    os << ";\n";
  }
  os << "main = ";
  pp_expr(os, p.main_expr, 0);
  os << '\n';
  return os.str();
}

std::string pretty(const Span& sp) {
  std::ostringstream os;
  os << sp.line << ':' << sp.col;
  return os.str();
}

}  // namespace lazyref
