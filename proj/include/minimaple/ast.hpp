// Abstract syntax of MiniMaple programs and specification annotations.
//
// Program expressions and specification formulas share one node set.
// Quantifiers, folds and `implies` are only produced when the parser is in
// formula mode (inside `(*@ ... @*)`), so program code never contains them.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minimaple/source.hpp"
#include "minimaple/types.hpp"

namespace minimaple {

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

enum class BinaryOp {
  Add, Sub, Mul, Div,
  Eq, NotEq, Less, LessEq, Greater, GreaterEq,
  And, Or, Implies,
};

enum class UnaryOp { Neg, Not };

const char* to_string(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_arithmetic(BinaryOp op);
bool is_logical(BinaryOp op);

struct IntLit {
  std::string digits;  // decimal, no sign
};

struct FloatLit {
  std::string text;
  double value = 0.0;
};

struct StringLit {
  std::string value;
};

struct BoolLit {
  bool value = false;
};

struct NameRef {
  std::string name;
};

/// `[e1, ..., en]`. Whether a bracket literal denotes a list or a fixed
/// tuple is decided by the type checker from the expected type.
struct ListLit {
  std::vector<ExprPtr> elements;
};

struct Index {
  ExprPtr base;
  ExprPtr index;
};

struct Call {
  std::string callee;
  SourceSpan callee_span;
  std::vector<ExprPtr> args;
};

struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Unary {
  UnaryOp op;
  ExprPtr operand;
};

/// `type(E, T)`.
struct TypeTest {
  ExprPtr subject;
  Type tested;
  SourceSpan type_span;
};

struct Param {
  std::string name;
  Type type;
  bool annotated = false;
  SourceSpan span;
};

/// Procedure contract: `requires`, `global` and `ensures` clauses.
struct AnnotationBlock {
  std::vector<std::string> clause_order;  // as written: "requires", "global", "ensures"
  ExprPtr precondition;   // requires
  bool has_globals = false;
  std::vector<std::string> globals;
  std::vector<SourceSpan> global_spans;
  ExprPtr postcondition;  // ensures
  SourceSpan span;
};

struct LoopAnnotation {
  std::vector<std::string> clause_order;
  ExprPtr invariant;
  ExprPtr decreases;
  SourceSpan span;
};

struct ProcExpr {
  std::vector<Param> params;
  Type return_type;
  bool return_annotated = false;
  Block body;
  std::optional<AnnotationBlock> annotation;
  SourceSpan header_span;  // `proc` through the return type
  bool header_semicolon = false;
  bool short_close = false;  // `end` instead of `end proc`
};

enum class QuantKind { Forall, Exists };

/// `forall(v::T, body)` / `exists(v::T, body)`.
struct Quantified {
  QuantKind kind;
  std::string var;
  Type var_type;
  SourceSpan var_span;
  ExprPtr body;
};

enum class FoldKind { Add, Mul, Min, Max, Seq };

const char* to_string(FoldKind k);

struct Range {
  enum class Kind { Numeric, Member };
  Kind kind = Kind::Numeric;
  std::string var;
  SourceSpan var_span;
  ExprPtr lo;          // Numeric: `var = lo..hi`
  ExprPtr hi;
  ExprPtr collection;  // Member: `var in collection`
};

/// Numerical (`add`, `mul`, `min`, `max`) and sequential (`seq`)
/// quantifiers: `mul(term, range, filter)`.
struct Fold {
  FoldKind kind;
  ExprPtr term;
  Range range;
  ExprPtr filter;  // may be null
};

struct Expr {
  using Node = std::variant<IntLit, FloatLit, StringLit, BoolLit, NameRef, ListLit, Index, Call,
                            Binary, Unary, TypeTest, ProcExpr, Quantified, Fold>;
  SourceSpan span;
  Node node;
  int parens = 0;  // redundant parentheses written around this expression

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }
};

/// Specification formulas are expressions parsed in formula mode.
using Formula = Expr;

struct Assign {
  ExprPtr target;  // NameRef or Index chain rooted at a NameRef
  ExprPtr value;
};

struct IfBranch {
  ExprPtr condition;
  Block body;
  SourceSpan then_span;
};

struct If {
  std::vector<IfBranch> branches;  // `if` followed by each `elif`
  std::optional<Block> else_body;
  SourceSpan else_span;
  bool short_close = false;  // `fi`
};

struct For {
  std::string var;
  SourceSpan var_span;
  ExprPtr from;  // null means 1
  ExprPtr by;    // null means 1
  ExprPtr to;
  Block body;
  std::optional<LoopAnnotation> annotation;
  SourceSpan do_span;
  bool short_close = false;  // `od`
};

struct While {
  ExprPtr condition;
  Block body;
  std::optional<LoopAnnotation> annotation;
  SourceSpan do_span;
  bool short_close = false;
};

struct Return {
  ExprPtr value;
};

struct ExprStmt {
  ExprPtr expr;
};

struct LocalEntry {
  std::string name;
  std::optional<Type> type;
  ExprPtr init;
  SourceSpan span;
};

struct LocalDecl {
  std::vector<LocalEntry> entries;
};

struct GlobalDecl {
  std::vector<std::string> names;
  std::vector<SourceSpan> spans;
};

struct Assert {
  ExprPtr formula;
};

/// Abstract data type declarations in an annotation:
/// `type Name;`, `func f(T1,...)::T;`, `pred p(T1,...);`.
struct AdtDecl {
  enum class Kind { Type, Func, Pred };
  Kind kind = Kind::Type;
  std::string name;
  std::vector<Type> params;
  Type result;
  SourceSpan span;
};

struct SpecDecl {
  std::vector<AdtDecl> decls;
};

struct Stmt {
  using Node = std::variant<Assign, If, For, While, Return, ExprStmt, LocalDecl, GlobalDecl,
                            Assert, SpecDecl>;
  SourceSpan span;
  Node node;
  std::string terminator;  // ";", ":" or empty

  template <class T>
  const T* as() const { return std::get_if<T>(&node); }
  template <class T>
  bool is() const { return std::holds_alternative<T>(node); }
};

/// Short lower-case statement kind used in traces: `assign`, `if`, ...
const char* stmt_kind_name(const Stmt& s);

struct Program {
  Block statements;
};

}  // namespace minimaple
