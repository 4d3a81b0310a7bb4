// Operator typing shared by the program checker and the formula checker.
#pragma once

#include <string>

#include "minimaple/ast.hpp"
#include "minimaple/types.hpp"

namespace minimaple::rules {

/// Result type of `a op b` for + - * /, or empty when an operand is not
/// numeric. Any `anything` operand makes the result `anything`; `/` always
/// yields float.
MaybeType arithmetic(BinaryOp op, const Type& a, const Type& b);

MaybeType negate(const Type& t);

/// Whether a comparison between the two operand types is well-typed.
bool comparable(BinaryOp op, const Type& a, const Type& b);

bool boolean_like(const Type& t);
bool integer_like(const Type& t);
bool numeric_like(const Type& t);

struct IndexOutcome {
  MaybeType type;
  std::string error;  // set when type is empty
};

/// Type of `base[index]`. A literal integer index selects a tuple slot.
IndexOutcome index(const Type& base, const Type& index, const Expr& index_expr);

/// Element type of a collection iterated by `e in c`, or empty.
MaybeType element_type(const Type& collection);

/// Value of an integer literal expression (possibly negated), if it is one.
std::optional<long long> literal_int(const Expr& e);

}  // namespace minimaple::rules
