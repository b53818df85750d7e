#include "lazyref/constants.hpp"

namespace lazyref {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

RTypePtr int_base(ExprPtr refinement) {
  return rt_base("v", BaseType::Int, Label::Fin, std::move(refinement));
}
RTypePtr bool_base(ExprPtr refinement) {
  return rt_base("v", BaseType::Bool, Label::Fin, std::move(refinement));
}

// x:Int -> y:Int -> {v:Int | v = x op y}
RTypePtr arith_sig(PrimOp op) {
  ExprPtr post = mk_binop(PrimOp::Eq, mk_var("v"),
                          mk_binop(op, mk_var("x"), mk_var("y")));
  return rt_fun("x", rt_int(), rt_fun("y", rt_int(), int_base(post)));
}

// x:Int -> y:Int -> {v:Bool | v == (x op y)}
RTypePtr cmp_sig(PrimOp op) {
  ExprPtr post = mk_binop(PrimOp::Eq, mk_var("v"),
                          mk_binop(op, mk_var("x"), mk_var("y")));
  return rt_fun("x", rt_int(), rt_fun("y", rt_int(), bool_base(post)));
}

// x:Bool -> y:Bool -> {v:Bool | v == (x op y)}
RTypePtr boolop_sig(PrimOp op) {
  ExprPtr post = mk_binop(PrimOp::Eq, mk_var("v"),
                          mk_binop(op, mk_var("x"), mk_var("y")));
  return rt_fun("x", rt_bool(), rt_fun("y", rt_bool(), bool_base(post)));
}

RTypePtr prim_signature(PrimOp op) {
  switch (op) {
    case PrimOp::Add:
    case PrimOp::Sub:
    case PrimOp::Mul:
      return arith_sig(op);
    case PrimOp::Div:
      return rt_fun("x", rt_int(),
                    rt_fun("y",
                           int_base(mk_binop(PrimOp::Ne, mk_var("v"), mk_int(0))),
                           rt_int()));
    case PrimOp::DivFun:
      return rt_fun("n", rt_int(),
                    rt_fun("d",
                           int_base(mk_binop(PrimOp::Lt, mk_int(0), mk_var("v"))),
                           rt_int()));
    case PrimOp::Lt:
    case PrimOp::Le:
    case PrimOp::Gt:
    case PrimOp::Ge:
    case PrimOp::Eq:
    case PrimOp::Ne:
      return cmp_sig(op);
    case PrimOp::And:
    case PrimOp::Or:
      return boolop_sig(op);
    case PrimOp::Not:
      return rt_fun("x", rt_bool(),
                    bool_base(mk_binop(PrimOp::Eq, mk_var("v"),
                                       mk_app(mk_prim(PrimOp::Not), mk_var("x")))));
    case PrimOp::Assert:
      return rt_fun("b", bool_base(mk_var("v")),
                    rt_fun("y", rt_int(),
                           int_base(mk_binop(PrimOp::Eq, mk_var("v"), mk_var("y")))));
    case PrimOp::Error:
      return rt_fun("x", int_base(mk_boolc(false)), rt_int_div());
  }
  return nullptr;
}
}  // namespace

RTypePtr signature_of(const ConstVal& c) {
  return std::visit(
      overloaded{[](std::int64_t n) {
                   return int_base(mk_binop(PrimOp::Eq, mk_var("v"), mk_int(n)));
                 },
                 [](bool b) {
                   return bool_base(
                       mk_binop(PrimOp::Eq, mk_var("v"), mk_boolc(b)));
                 },
                 [](PrimOp op) { return prim_signature(op); },
                 [](CrashTag) { return RTypePtr{}; }},
      c);
}

const std::map<std::string, Constant>& const_table() {
  static const std::map<std::string, Constant> table = [] {
    std::map<std::string, Constant> t;
    auto add = [&](ConstVal v) {
      std::string name = const_name(v);
      t.emplace(name, Constant{name, arity(v), signature_of(v), v});
    };
    for (PrimOp op :
         {PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::Div, PrimOp::DivFun,
          PrimOp::Lt, PrimOp::Le, PrimOp::Gt, PrimOp::Ge, PrimOp::Eq, PrimOp::Ne,
          PrimOp::And, PrimOp::Or, PrimOp::Not, PrimOp::Assert, PrimOp::Error})
      add(ConstVal{op});
    add(ConstVal{true});
    add(ConstVal{false});
    return t;
  }();
  return table;
}

std::optional<std::int64_t> as_int_value(const ExprPtr& e) {
  if (const auto* c = std::get_if<ConE>(&e->node))
    if (const auto* n = std::get_if<std::int64_t>(&c->val)) return *n;
  return std::nullopt;
}

std::optional<bool> as_bool_value(const ExprPtr& e) {
  if (const auto* c = std::get_if<ConE>(&e->node))
    if (const auto* b = std::get_if<bool>(&c->val)) return *b;
  return std::nullopt;
}

namespace {
// Two's-complement arithmetic keeps delta total over all Int values.
std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_div(std::int64_t a, std::int64_t b) {
  if (b == -1) return wrap_sub(0, a);
  return a / b;
}
}  // namespace

std::optional<ExprPtr> delta_apply(const ConstVal& head,
                                   const std::vector<ExprPtr>& args, Span sp) {
  const auto* op = std::get_if<PrimOp>(&head);
  if (!op || args.size() != static_cast<std::size_t>(arity(head)))
    return std::nullopt;
  auto int2 = [&](std::size_t i) { return as_int_value(args[i]); };
  auto bool2 = [&](std::size_t i) { return as_bool_value(args[i]); };
  switch (*op) {
    case PrimOp::Add:
    case PrimOp::Sub:
    case PrimOp::Mul:
    case PrimOp::Div:
    case PrimOp::DivFun: {
      auto a = int2(0), b = int2(1);
      if (!a || !b) return std::nullopt;
      switch (*op) {
        case PrimOp::Add: return mk_int(wrap_add(*a, *b), sp);
        case PrimOp::Sub: return mk_int(wrap_sub(*a, *b), sp);
        case PrimOp::Mul: return mk_int(wrap_mul(*a, *b), sp);
        default:
          if (*b == 0) return mk_crash(sp);
          return mk_int(wrap_div(*a, *b), sp);
      }
    }
    case PrimOp::Eq:
    case PrimOp::Ne: {
      // Equality mirrors the logic's overloading over both base sorts.
      if (auto ba = bool2(0)) {
        auto bb = bool2(1);
        if (!bb) return std::nullopt;
        return mk_boolc(*op == PrimOp::Eq ? *ba == *bb : *ba != *bb, sp);
      }
      auto a = int2(0), b = int2(1);
      if (!a || !b) return std::nullopt;
      return mk_boolc(*op == PrimOp::Eq ? *a == *b : *a != *b, sp);
    }
    case PrimOp::Lt:
    case PrimOp::Le:
    case PrimOp::Gt:
    case PrimOp::Ge: {
      auto a = int2(0), b = int2(1);
      if (!a || !b) return std::nullopt;
      bool r = false;
      switch (*op) {
        case PrimOp::Lt: r = *a < *b; break;
        case PrimOp::Le: r = *a <= *b; break;
        case PrimOp::Gt: r = *a > *b; break;
        default: r = *a >= *b; break;
      }
      return mk_boolc(r, sp);
    }
    case PrimOp::And:
    case PrimOp::Or: {
      auto a = bool2(0), b = bool2(1);
      if (!a || !b) return std::nullopt;
      return mk_boolc(*op == PrimOp::And ? (*a && *b) : (*a || *b), sp);
    }
    case PrimOp::Not: {
      auto a = bool2(0);
      if (!a) return std::nullopt;
      return mk_boolc(!*a, sp);
    }
    case PrimOp::Assert: {
      auto a = bool2(0);
      if (!a || !as_int_value(args[1])) return std::nullopt;
      if (!*a) return mk_crash(sp);
      return args[1];
    }
    case PrimOp::Error:
      if (!as_int_value(args[0])) return std::nullopt;
      return mk_crash(sp);
  }
  return std::nullopt;
}

}  // namespace lazyref
