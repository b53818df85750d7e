#pragma once

#include <set>
#include <string>

#include "lazyref/ast.hpp"

namespace lazyref {

// A name based on `base` (priming it as needed) that avoids `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

// Capture-avoiding substitution of `a` for free occurrences of `x`.
ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ExprPtr& a);
RTypePtr subst_type(const RTypePtr& t, const std::string& x, const ExprPtr& a);

}  // namespace lazyref
