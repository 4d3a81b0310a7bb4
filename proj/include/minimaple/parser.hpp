#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "minimaple/ast.hpp"
#include "minimaple/source.hpp"
#include "minimaple/types.hpp"

namespace minimaple {

struct ParseResult {
  std::shared_ptr<const Program> program;  // null when any error was reported
  Diagnostics diagnostics;

  bool ok() const { return program != nullptr; }
};

/// Parses a compilation unit. The parser recovers at statement boundaries so
/// that several syntax errors can be reported from one run.
ParseResult parse_program(std::string_view source);

struct TypeParseResult {
  MaybeType type;
  Diagnostics diagnostics;
};

/// Parses a type: a base name, `list(T)`, `Or(T1,...,Tn)` (n >= 2),
/// `[T1,...,Tn]`, or `proc(T1,...)::T`. The result is normalized.
TypeParseResult parse_type(std::string_view text);

struct ExprListParseResult {
  std::vector<ExprPtr> exprs;
  Diagnostics diagnostics;
};

/// Parses a comma-separated list of literal values (numbers, strings,
/// booleans, brackets of literals, negated numbers). Used for command-line
/// arguments.
ExprListParseResult parse_literal_list(std::string_view text);

}  // namespace minimaple
