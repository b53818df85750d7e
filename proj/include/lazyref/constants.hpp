#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lazyref/ast.hpp"

namespace lazyref {

// Table entry for a primitive constant: refined signature plus the name
// used to resolve identifiers in source programs.
struct Constant {
  std::string name;
  int arity = 0;
  RTypePtr signature;
  ConstVal val;
};

// Named constants resolvable from source programs. Integer literals are
// handled structurally (see signature_of).
const std::map<std::string, Constant>& const_table();

// Refined signature of any constant. `error` is monomorphized at its use
// site by the checker; standalone it defaults to a serious Int result.
// The crash constant has no type and yields null.
RTypePtr signature_of(const ConstVal& c);

// Evaluation of a saturated constant application. The arguments must be
// values of the constant's base types; a nullopt means the application is
// ill-formed (cannot happen on well-typed terms). Inputs outside the
// constant's domain produce the crash constant.
std::optional<ExprPtr> delta_apply(const ConstVal& head,
                                   const std::vector<ExprPtr>& args, Span sp = {});

// Convenience extractors for constant values.
std::optional<std::int64_t> as_int_value(const ExprPtr& e);
std::optional<bool> as_bool_value(const ExprPtr& e);

}  // namespace lazyref
