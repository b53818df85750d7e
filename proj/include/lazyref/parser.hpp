#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "lazyref/ast.hpp"

namespace lazyref {

struct ParseError {
  enum class Kind { Syntax, Scope, Annotation };
  Kind kind = Kind::Syntax;
  Span span;
  std::string message;
  std::string name;  // offending identifier for Scope errors

  std::string render() const;
};

// Parses a source file into a Program: top-level signatures, optional
// decreases hints, bindings, and the final main expression. Rejects unbound
// names and bindings without signatures. Free identifiers naming primitive
// constants resolve to constant nodes.
std::variant<Program, ParseError> parse_program(std::string_view source);

// Expression-only entry point for tests and tools. Identifiers naming
// primitive constants resolve to constants; other names stay free variables.
std::variant<ExprPtr, ParseError> parse_expr_text(std::string_view source);

}  // namespace lazyref
