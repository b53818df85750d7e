#pragma once

#include <string>

#include "lazyref/ast.hpp"

namespace lazyref {

// Surface-syntax rendering. Program output re-parses to an alpha-equivalent
// program; expression output for fix nodes and partially applied operators
// is display-only (those forms arise during evaluation, not in source).
std::string pretty(const ExprPtr& e);
std::string pretty(const RTypePtr& t);
std::string pretty(const Program& p);
std::string pretty(const Span& sp);

}  // namespace lazyref
