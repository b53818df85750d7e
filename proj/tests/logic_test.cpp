#include <random>

#include "doctest.h"
#include "lazyref/logic.hpp"
#include "lazyref/parser.hpp"
#include "lazyref/smt.hpp"
#include "testers.hpp"

using namespace lazyref;
using namespace lazyref::logic;

namespace {
ExprPtr expr(const std::string& src) {
  auto r = parse_expr_text(src);
  if (auto* err = std::get_if<ParseError>(&r)) FAIL(err->render());
  return std::get<ExprPtr>(r);
}
Pred pred(const std::string& src) {
  auto r = to_pred(expr(src));
  REQUIRE(std::holds_alternative<Pred>(r));
  return std::get<Pred>(r);
}
}  // namespace

TEST_CASE("to_pred translates the logical fragment") {
  Pred p = pred("v == y + 1");
  CHECK(pred_equal(p, p_cmp(CmpOp::Eq, p_var("v"),
                            p_arith(ArithOp::Add, p_var("y"), p_int(1)))));

  Pred q = pred("v <= n && 0 <= v");
  CHECK(pred_equal(q, p_and(p_cmp(CmpOp::Le, p_var("v"), p_var("n")),
                            p_cmp(CmpOp::Le, p_int(0), p_var("v")))));

  // Literal-coefficient multiplication stays linear.
  CHECK(pred_equal(pred("3 * x"), p_mulc(3, p_var("x"))));
}

TEST_CASE("to_pred rejects non-fragment expressions") {
  auto app = mk_app(mk_var("f"), mk_var("v"));
  CHECK(std::holds_alternative<NotLogical>(to_pred(app)));
  CHECK(std::holds_alternative<NotLogical>(to_pred(expr("x * y"))));
  CHECK(std::holds_alternative<NotLogical>(to_pred(expr("x / y"))));
  CHECK(std::holds_alternative<NotLogical>(
      to_pred(expr("let a = 1 in a"))));
  CHECK(std::holds_alternative<NotLogical>(
      to_pred(expr("if true then 1 else 2"))));
}

namespace {
RTypePtr nat_type() {
  return rt_base("v", BaseType::Int, Label::Fin,
                 mk_binop(PrimOp::Le, mk_int(0), mk_var("v")));
}
RTypePtr eq_type(std::int64_t n) {
  return rt_base("v", BaseType::Int, Label::Fin,
                 mk_binop(PrimOp::Eq, mk_var("v"), mk_int(n)));
}
}  // namespace

TEST_CASE("strict_env drops serious base binders only") {
  TEnv g;
  g.push("a", eq_type(0));
  g.push("b", rt_int_div());
  TEnv s = strict_env(g);
  REQUIRE(s.size() == 1);
  CHECK(s.bindings()[0].first == "a");

  TEnv empty;
  CHECK(strict_env(empty).size() == 0);

  TEnv h;
  h.push("n", nat_type());
  h.push("f", rt_fun("x", rt_int(), rt_int_div()));
  TEnv hs = strict_env(h);
  REQUIRE(hs.size() == 2);
  CHECK(hs.bindings()[1].first == "f");
}

TEST_CASE("embed_env renames value binders and skips serious binders") {
  TEnv g;
  g.push("x", nat_type());
  g.push("y", nat_type());
  auto r = embed_env(g);
  auto preds = std::get<std::vector<Pred>>(r);
  REQUIRE(preds.size() == 2);
  CHECK(pred_equal(preds[0], p_cmp(CmpOp::Le, p_int(0), p_var("x"))));
  CHECK(pred_equal(preds[1], p_cmp(CmpOp::Le, p_int(0), p_var("y"))));

  TEnv h;
  h.push("a", eq_type(0));
  h.push("b", rt_int_div());
  auto hr = std::get<std::vector<Pred>>(embed_env(h));
  REQUIRE(hr.size() == 1);
  CHECK(pred_equal(hr[0], p_cmp(CmpOp::Eq, p_var("a"), p_int(0))));

  TEnv arrows;
  arrows.push("g", rt_fun("x", rt_int(), rt_int()));
  CHECK(std::get<std::vector<Pred>>(embed_env(arrows)).empty());
}

TEST_CASE("embedding is stable under strict filtering") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    TEnv g;
    int n = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int i = 0; i < n; ++i) {
      std::string name = "x" + std::to_string(i);
      switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: g.push(name, nat_type()); break;
        case 1: g.push(name, rt_int_div()); break;
        case 2: g.push(name, rt_fun("a", rt_int(), rt_int())); break;
        default: g.push(name, eq_type(i)); break;
      }
    }
    auto direct = std::get<std::vector<Pred>>(embed_env(g));
    auto filtered = std::get<std::vector<Pred>>(embed_env(strict_env(g)));
    REQUIRE(direct.size() == filtered.size());
    for (std::size_t i = 0; i < direct.size(); ++i)
      CHECK(pred_equal(direct[i], filtered[i]));

    // No embedded predicate mentions a serious binder.
    std::set<std::string> serious;
    for (const auto& [name, type] : g.bindings())
      if (is_serious_base(type)) serious.insert(name);
    std::set<std::string> mentioned;
    for (const auto& p : direct) collect_pred_vars(p, mentioned);
    for (const auto& s : serious) CHECK_FALSE(mentioned.count(s));
  }
}

TEST_CASE("sort checking") {
  SortMap decls{{"v", Sort::Int}, {"x", Sort::Int}, {"b", Sort::Bool}};
  CHECK(std::get<Sort>(sort_check(decls, pred("v == x + 1"))) == Sort::Bool);
  CHECK(std::get<Sort>(sort_check(decls, pred("v + 1"))) == Sort::Int);
  CHECK(std::holds_alternative<SortError>(sort_check(decls, pred("b && 3"))));
  CHECK(std::holds_alternative<SortError>(sort_check(decls, pred("undeclared"))));
  // Equality is overloaded over both sorts.
  CHECK(std::get<Sort>(sort_check(decls, pred("b == (x < v)"))) == Sort::Bool);
}

TEST_CASE("lex_pred builds strict lexicographic decrease") {
  Pred single = lex_pred({p_var("x")}, {p_var("x'")});
  CHECK(pred_equal(single, p_cmp(CmpOp::Lt, p_var("x'"), p_var("x"))));

  Pred pair = lex_pred({p_var("m"), p_var("n")}, {p_var("m'"), p_var("n'")});
  Pred expected = p_or(p_cmp(CmpOp::Lt, p_var("m'"), p_var("m")),
                       p_and(p_cmp(CmpOp::Eq, p_var("m'"), p_var("m")),
                             p_cmp(CmpOp::Lt, p_var("n'"), p_var("n"))));
  CHECK(pred_equal(pair, expected));

  CHECK_THROWS(lex_pred({}, {}));
  CHECK_THROWS(lex_pred({p_var("x")}, {p_var("a"), p_var("b")}));
}

TEST_CASE("a tuple cannot lexicographically decrease below itself") {
  // old == new syntactically: the decrease predicate is unsatisfiable.
  smt::Query q;
  q.decls = {{"m", Sort::Int}, {"n", Sort::Int}};
  q.lhs = p_bool(true);
  // Valid(not lex(m,n / m,n)) iff lex(...) is unsatisfiable.
  q.goal = p_not(lex_pred({p_var("m"), p_var("n")}, {p_var("m"), p_var("n")}));
  CHECK(smt::builtin_check(q).valid());
}

TEST_CASE("lex_pred agrees with the lexicographic order on a grid") {
  Pred p = lex_pred({p_var("a"), p_var("b")}, {p_var("c"), p_var("d")});
  for (std::int64_t a = -3; a <= 3; ++a)
    for (std::int64_t b = -3; b <= 3; ++b)
      for (std::int64_t c = -3; c <= 3; ++c)
        for (std::int64_t d = -3; d <= 3; ++d) {
          Assignment env{{"a", a}, {"b", b}, {"c", c}, {"d", d}};
          auto v = eval_pred(p, env);
          REQUIRE(v.has_value());
          bool expected = c < a || (c == a && d < b);
          CHECK(std::get<bool>(*v) == expected);
        }
}
