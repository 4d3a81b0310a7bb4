// Source rendering and structural dumps of the syntax tree.
#pragma once

#include <string>

#include "minimaple/ast.hpp"

namespace minimaple {

/// Renders a program as MiniMaple source. Output of a parsed program lexes to
/// the same token sequence as the input, except that types are printed in
/// normalized form and comments are dropped.
std::string print_program(const Program& p);
std::string print_expr(const Expr& e);

/// Span-free S-expression rendering used to compare trees structurally.
std::string dump_sexpr(const Program& p);
std::string dump_sexpr(const Expr& e);

}  // namespace minimaple
