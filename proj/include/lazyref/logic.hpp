#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lazyref/ast.hpp"
#include "lazyref/tenv.hpp"

namespace lazyref::logic {

enum class Sort { Int, Bool };

struct PredNode;
using Pred = std::shared_ptr<const PredNode>;

struct PVar {
  std::string name;
};
struct PInt {
  std::int64_t v;
};
struct PBool {
  bool v;
};
enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };
struct PCmp {
  CmpOp op;
  Pred l, r;
};
enum class ArithOp { Add, Sub };
struct PArith {
  ArithOp op;
  Pred l, r;
};
// Linear multiplication: a literal coefficient times a term.
struct PMulC {
  std::int64_t coeff;
  Pred operand;
};
struct PNot {
  Pred p;
};
enum class ConnOp { And, Or, Imp, Iff };
struct PConn {
  ConnOp op;
  Pred l, r;
};

struct PredNode {
  std::variant<PVar, PInt, PBool, PCmp, PArith, PMulC, PNot, PConn> node;
};

Pred p_var(std::string name);
Pred p_int(std::int64_t v);
Pred p_bool(bool v);
Pred p_cmp(CmpOp op, Pred l, Pred r);
Pred p_arith(ArithOp op, Pred l, Pred r);
Pred p_mulc(std::int64_t coeff, Pred operand);
Pred p_not(Pred p);
Pred p_conn(ConnOp op, Pred l, Pred r);
inline Pred p_and(Pred l, Pred r) { return p_conn(ConnOp::And, std::move(l), std::move(r)); }
inline Pred p_or(Pred l, Pred r) { return p_conn(ConnOp::Or, std::move(l), std::move(r)); }
inline Pred p_imp(Pred l, Pred r) { return p_conn(ConnOp::Imp, std::move(l), std::move(r)); }
inline Pred p_iff(Pred l, Pred r) { return p_conn(ConnOp::Iff, std::move(l), std::move(r)); }

// Conjunction of a list; empty list is true.
Pred p_and_all(const std::vector<Pred>& ps);

bool pred_equal(const Pred& a, const Pred& b);
std::string to_string(const Pred& p);
void collect_pred_vars(const Pred& p, std::set<std::string>& out);

// ---- translation from refinement expressions --------------------------------

struct NotLogical {
  std::string reason;
  Span span;
};

// Interprets a refinement expression in the logic. Only variables,
// literals, linear arithmetic (multiplication needs a literal operand),
// comparisons, and boolean connectives are admitted.
std::variant<Pred, NotLogical> to_pred(const ExprPtr& e);

// ---- sorts ------------------------------------------------------------------

using SortMap = std::map<std::string, Sort>;

struct SortError {
  std::string message;
};

// Two-sorted checking; equality and disequality are overloaded over both
// sorts, the other comparisons are integer-only.
std::variant<Sort, SortError> sort_check(const SortMap& decls, const Pred& p);

inline Sort sort_of_base(BaseType b) {
  return b == BaseType::Int ? Sort::Int : Sort::Bool;
}

// ---- environment embedding --------------------------------------------------

// Restriction of an environment to trivial binders: serious base bindings
// are dropped, trivial bases and arrows are kept in order.
TEnv strict_env(const TEnv& g);

// Hypotheses contributed by an environment: for each trivial base binding
// x:{v:b|e} in strict_env(g), the predicate e with v renamed to x. Arrow
// bindings and literally-true refinements contribute nothing.
std::variant<std::vector<Pred>, NotLogical> embed_env(const TEnv& g);

// ---- termination orders -----------------------------------------------------

// Strict lexicographic decrease of `newer` below `older`:
//   OR_i ( AND_{j<i} newer_j = older_j  AND  newer_i < older_i ).
// Both lists must be nonempty and of equal length.
Pred lex_pred(const std::vector<Pred>& older, const std::vector<Pred>& newer);

// ---- evaluation ---------------------------------------------------------------

using Value = std::variant<std::int64_t, bool>;
using Assignment = std::map<std::string, Value>;

// Exact evaluation under an assignment; nullopt on unbound variables or
// sort mismatches. Integer arithmetic wraps like the evaluator's constants.
std::optional<Value> eval_pred(const Pred& p, const Assignment& a);

}  // namespace lazyref::logic
