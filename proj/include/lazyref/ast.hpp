#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace lazyref {

// Half-open byte range plus the 1-based line/column of its start.
struct Span {
  std::uint32_t begin = 0, end = 0;
  std::uint32_t line = 0, col = 0;
};

enum class BaseType { Int, Bool };

// Fin-labeled base types describe expressions that always terminate;
// Div-labeled ones may diverge and must be unrefined.
enum class Label { Fin, Div };

enum class PrimOp {
  Add,
  Sub,
  Mul,
  Div,     // operator `/`, second argument must be nonzero
  DivFun,  // named `div`, second argument must be positive
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  And,
  Or,
  Not,
  Assert,
  Error,
};

// The distinguished untypable constant modeling runtime errors. It is a
// stuck non-value: evaluation aborts when it reaches a forced position.
struct CrashTag {
  friend bool operator==(CrashTag, CrashTag) { return true; }
};

using ConstVal = std::variant<std::int64_t, bool, PrimOp, CrashTag>;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct RType;
using RTypePtr = std::shared_ptr<const RType>;

// Termination metric attached to a recursive binding. Lex entries are
// integer-sorted expressions over the function's parameters.
struct MetricSpec {
  enum class Kind { Default, ParamIndex, Lex };
  Kind kind = Kind::Default;
  std::size_t param_index = 0;
  std::vector<ExprPtr> entries;
};

struct VarE {
  std::string name;
};
struct ConE {
  ConstVal val;
};
struct LamE {
  std::string binder;
  RTypePtr ann;  // may be null when the type is pushed in by checking
  ExprPtr body;
};
struct AppE {
  ExprPtr fn;
  ExprPtr arg;
};
struct LetE {
  std::string binder;
  ExprPtr bound;
  ExprPtr body;
};
// Recursive function over its first parameter; additional parameters are
// nested lambdas in the body. Carries the full signature split into the
// first parameter's type and the remaining result type.
struct FixE {
  std::string fname;
  std::string binder;
  RTypePtr param_type;
  RTypePtr result_type;
  std::optional<MetricSpec> metric;
  ExprPtr body;
};
struct IfE {
  ExprPtr cond;
  ExprPtr then_e;
  ExprPtr else_e;
};

struct Expr {
  Span span;
  std::variant<VarE, ConE, LamE, AppE, LetE, FixE, IfE> node;
};

// Refined base {v:b^l | p} or dependent arrow x:t -> t'.
struct RBase {
  std::string value_binder;
  BaseType base = BaseType::Int;
  Label label = Label::Fin;
  ExprPtr refinement;
};
struct RFun {
  std::string binder;
  RTypePtr input;
  RTypePtr output;
};
struct RType {
  std::variant<RBase, RFun> node;
};

// ---- constructors ---------------------------------------------------------

ExprPtr mk_var(std::string name, Span sp = {});
ExprPtr mk_int(std::int64_t v, Span sp = {});
ExprPtr mk_boolc(bool v, Span sp = {});
ExprPtr mk_prim(PrimOp op, Span sp = {});
ExprPtr mk_crash(Span sp = {});
ExprPtr mk_lam(std::string binder, RTypePtr ann, ExprPtr body, Span sp = {});
ExprPtr mk_app(ExprPtr fn, ExprPtr arg, Span sp = {});
ExprPtr mk_app2(ExprPtr fn, ExprPtr a, ExprPtr b, Span sp = {});
ExprPtr mk_binop(PrimOp op, ExprPtr a, ExprPtr b, Span sp = {});
ExprPtr mk_let(std::string binder, ExprPtr bound, ExprPtr body, Span sp = {});
ExprPtr mk_fix(std::string fname, std::string binder, RTypePtr param_type,
               RTypePtr result_type, std::optional<MetricSpec> metric,
               ExprPtr body, Span sp = {});
ExprPtr mk_if(ExprPtr cond, ExprPtr then_e, ExprPtr else_e, Span sp = {});

RTypePtr rt_base(std::string value_binder, BaseType base, Label label,
                 ExprPtr refinement);
RTypePtr rt_fun(std::string binder, RTypePtr input, RTypePtr output);
RTypePtr rt_int();       // {v:Int^Fin | true}
RTypePtr rt_bool();      // {v:Bool^Fin | true}
RTypePtr rt_int_div();   // {v:Int^Div | true}
RTypePtr rt_bool_div();  // {v:Bool^Div | true}
RTypePtr rt_unrefined(BaseType base, Label label);

// ---- inspection -----------------------------------------------------------

const RBase* as_base(const RTypePtr& t);
const RFun* as_fun(const RTypePtr& t);

// A type is serious iff it is a Div-labeled base; arrows are trivial.
bool is_trivial_type(const RTypePtr& t);
bool is_serious_base(const RTypePtr& t);

// Rightmost codomain of a (possibly curried) arrow, or the type itself.
RTypePtr result_base(const RTypePtr& t);

bool is_true_lit(const ExprPtr& e);
bool is_crash(const ExprPtr& e);
int arity(const ConstVal& c);
std::string const_name(const ConstVal& c);
std::string prim_name(PrimOp op);

// Head constant and collected arguments of an application spine, if the
// head is a constant.
struct ConstSpine {
  ConstVal head;
  std::vector<ExprPtr> args;
};
std::optional<ConstSpine> const_spine(const ExprPtr& e);

// Values: constants (crash excluded), lambdas, fix terms, and partial
// applications of primitive constants to values.
bool is_value(const ExprPtr& e);

void collect_free_vars(const ExprPtr& e, std::set<std::string>& out);
void collect_free_vars(const RTypePtr& t, std::set<std::string>& out);
std::set<std::string> free_vars(const ExprPtr& e);
std::set<std::string> free_vars(const RTypePtr& t);

bool alpha_eq(const ExprPtr& a, const ExprPtr& b);
bool alpha_eq(const RTypePtr& a, const RTypePtr& b);

// ---- programs -------------------------------------------------------------

struct Decl {
  enum class Kind { Let, Rec };
  Kind kind = Kind::Let;
  std::string name;
  Span span;
  RTypePtr signature;
  std::vector<std::string> params;
  ExprPtr body;  // with params still free; lambda-nesting happens on demand
  std::optional<MetricSpec> metric;
};

struct Program {
  std::vector<Decl> decls;
  ExprPtr main_expr;
  std::optional<RTypePtr> main_sig;
  Span main_span;

  // Top-level bindings folded into nested let/fix around main.
  ExprPtr desugar() const;
};

// The binding as a single expression: a fix node for Rec declarations, a
// lambda-nest for Let declarations with parameters.
ExprPtr decl_value(const Decl& d);

// Splits a curried signature into parameter bindings and final result.
// Fails (returns false) when there are fewer arrows than names.
bool split_signature(const RTypePtr& sig, const std::vector<std::string>& params,
                     std::vector<std::pair<std::string, RTypePtr>>& binds,
                     RTypePtr& result);

}  // namespace lazyref
