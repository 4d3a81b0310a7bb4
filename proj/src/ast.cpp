#include "minimaple/ast.hpp"

namespace minimaple {

const char* to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::NotEq: return "<>";
    case BinaryOp::Less: return "<";
    case BinaryOp::LessEq: return "<=";
    case BinaryOp::Greater: return ">";
    case BinaryOp::GreaterEq: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
    case BinaryOp::Implies: return "implies";
  }
  return "?";
}

bool is_comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::NotEq:
    case BinaryOp::Less:
    case BinaryOp::LessEq:
    case BinaryOp::Greater:
    case BinaryOp::GreaterEq:
      return true;
    default:
      return false;
  }
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul || op == BinaryOp::Div;
}

bool is_logical(BinaryOp op) {
  return op == BinaryOp::And || op == BinaryOp::Or || op == BinaryOp::Implies;
}

const char* to_string(FoldKind k) {
  switch (k) {
    case FoldKind::Add: return "add";
    case FoldKind::Mul: return "mul";
    case FoldKind::Min: return "min";
    case FoldKind::Max: return "max";
    case FoldKind::Seq: return "seq";
  }
  return "?";
}

const char* stmt_kind_name(const Stmt& s) {
  struct Names {
    const char* operator()(const Assign&) const { return "assign"; }
    const char* operator()(const If&) const { return "if"; }
    const char* operator()(const For&) const { return "for"; }
    const char* operator()(const While&) const { return "while"; }
    const char* operator()(const Return&) const { return "return"; }
    const char* operator()(const ExprStmt&) const { return "expr"; }
    const char* operator()(const LocalDecl&) const { return "local"; }
    const char* operator()(const GlobalDecl&) const { return "global"; }
    const char* operator()(const Assert&) const { return "assert"; }
    const char* operator()(const SpecDecl&) const { return "spec"; }
  };
  return std::visit(Names{}, s.node);
}

}  // namespace minimaple
