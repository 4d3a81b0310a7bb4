#include "minimaple/printer.hpp"

#include <string>

namespace minimaple {

namespace {

enum Prec : int {
  kImplies = 1,
  kOr,
  kAnd,
  kNot,
  kRel,
  kAdd,
  kMul,
  kNeg,
  kPostfix,
  kAtom,
};

int precedence(const Expr& e) {
  if (const auto* b = e.as<Binary>()) {
    switch (b->op) {
      case BinaryOp::Implies: return kImplies;
      case BinaryOp::Or: return kOr;
      case BinaryOp::And: return kAnd;
      case BinaryOp::Add:
      case BinaryOp::Sub: return kAdd;
      case BinaryOp::Mul:
      case BinaryOp::Div: return kMul;
      default: return kRel;
    }
  }
  if (const auto* u = e.as<Unary>()) return u->op == UnaryOp::Not ? kNot : kNeg;
  if (e.is<Index>()) return kPostfix;
  // A proc expression has no closing delimiter of its own in operator
  // position; treat it as the weakest form so it is parenthesized there.
  if (e.is<ProcExpr>()) return 0;
  return kAtom;
}

class SourcePrinter {
 public:
  std::string take() { return std::move(out_); }

  void block(const Block& b, int indent) {
    for (const auto& s : b) stmt(*s, indent);
  }

  void expr(const Expr& e, int min_prec, int indent) {
    int parens = e.parens;
    if (parens == 0 && precedence(e) < min_prec) parens = 1;
    for (int i = 0; i < parens; ++i) out_ += '(';
    bare(e, indent);
    for (int i = 0; i < parens; ++i) out_ += ')';
  }

 private:
  void line_start(int indent) { out_.append(static_cast<std::size_t>(indent) * 2, ' '); }

  void stmt(const Stmt& s, int indent) {
    line_start(indent);
    std::visit([&](const auto& n) { stmt_node(n, s, indent); }, s.node);
    out_ += s.terminator;
    out_ += '\n';
  }

  void stmt_node(const Assign& a, const Stmt&, int indent) {
    expr(*a.target, kPostfix, indent);
    out_ += " := ";
    expr(*a.value, 0, indent);
  }

  void stmt_node(const If& s, const Stmt&, int indent) {
    for (std::size_t i = 0; i < s.branches.size(); ++i) {
      if (i > 0) line_start(indent);
      out_ += i == 0 ? "if " : "elif ";
      expr(*s.branches[i].condition, 0, indent);
      out_ += " then\n";
      block(s.branches[i].body, indent + 1);
    }
    if (s.else_body) {
      line_start(indent);
      out_ += "else\n";
      block(*s.else_body, indent + 1);
    }
    line_start(indent);
    out_ += s.short_close ? "fi" : "end if";
  }

  void loop_annotation(const std::optional<LoopAnnotation>& ann, int indent) {
    if (!ann) return;
    out_ += "(*@";
    for (const auto& clause : ann->clause_order) {
      out_ += ' ' + clause + ' ';
      expr(clause == "invariant" ? *ann->invariant : *ann->decreases, 0, indent);
      out_ += ';';
    }
    out_ += " @*)\n";
    line_start(indent);
  }

  void stmt_node(const For& s, const Stmt&, int indent) {
    loop_annotation(s.annotation, indent);
    out_ += "for " + s.var;
    if (s.from) {
      out_ += " from ";
      expr(*s.from, 0, indent);
    }
    if (s.by) {
      out_ += " by ";
      expr(*s.by, 0, indent);
    }
    out_ += " to ";
    expr(*s.to, 0, indent);
    out_ += " do\n";
    block(s.body, indent + 1);
    line_start(indent);
    out_ += s.short_close ? "od" : "end do";
  }

  void stmt_node(const While& s, const Stmt&, int indent) {
    loop_annotation(s.annotation, indent);
    out_ += "while ";
    expr(*s.condition, 0, indent);
    out_ += " do\n";
    block(s.body, indent + 1);
    line_start(indent);
    out_ += s.short_close ? "od" : "end do";
  }

  void stmt_node(const Return& s, const Stmt&, int indent) {
    out_ += "return ";
    expr(*s.value, 0, indent);
  }

  void stmt_node(const ExprStmt& s, const Stmt&, int indent) { expr(*s.expr, 0, indent); }

  void stmt_node(const LocalDecl& d, const Stmt&, int indent) {
    out_ += "local ";
    for (std::size_t i = 0; i < d.entries.size(); ++i) {
      if (i) out_ += ", ";
      const auto& e = d.entries[i];
      out_ += e.name;
      if (e.type) out_ += "::" + e.type->str();
      if (e.init) {
        out_ += ":=";
        expr(*e.init, 0, indent);
      }
    }
  }

  void stmt_node(const GlobalDecl& d, const Stmt&, int) {
    out_ += "global ";
    for (std::size_t i = 0; i < d.names.size(); ++i) {
      if (i) out_ += ", ";
      out_ += d.names[i];
    }
  }

  void stmt_node(const Assert& a, const Stmt&, int indent) {
    out_ += "(*@ assert ";
    expr(*a.formula, 0, indent);
    out_ += "; @*)";
  }

  void stmt_node(const SpecDecl& d, const Stmt&, int) {
    out_ += "(*@";
    for (const auto& decl : d.decls) {
      switch (decl.kind) {
        case AdtDecl::Kind::Type:
          out_ += " type " + decl.name + ";";
          break;
        case AdtDecl::Kind::Func:
        case AdtDecl::Kind::Pred: {
          out_ += decl.kind == AdtDecl::Kind::Func ? " func " : " pred ";
          out_ += decl.name + "(";
          for (std::size_t i = 0; i < decl.params.size(); ++i) {
            if (i) out_ += ',';
            out_ += decl.params[i].str();
          }
          out_ += ")";
          if (decl.kind == AdtDecl::Kind::Func) out_ += "::" + decl.result.str();
          out_ += ";";
          break;
        }
      }
    }
    out_ += " @*)";
  }

  void args(const std::vector<ExprPtr>& xs, int indent) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out_ += ", ";
      expr(*xs[i], 0, indent);
    }
  }

  void bare(const Expr& e, int indent) {
    std::visit([&](const auto& n) { node(n, indent); }, e.node);
  }

  void node(const IntLit& n, int) { out_ += n.digits; }
  void node(const FloatLit& n, int) { out_ += n.text; }
  void node(const StringLit& n, int) { out_ += '"' + n.value + '"'; }
  void node(const BoolLit& n, int) { out_ += n.value ? "true" : "false"; }
  void node(const NameRef& n, int) { out_ += n.name; }

  void node(const ListLit& n, int indent) {
    out_ += '[';
    args(n.elements, indent);
    out_ += ']';
  }

  void node(const Index& n, int indent) {
    expr(*n.base, kPostfix, indent);
    out_ += '[';
    expr(*n.index, 0, indent);
    out_ += ']';
  }

  void node(const Call& n, int indent) {
    out_ += n.callee + "(";
    args(n.args, indent);
    out_ += ')';
  }

  void node(const Binary& n, int indent) {
    int p = precedence_of(n.op);
    int lhs_min = p;
    int rhs_min = p + 1;
    if (n.op == BinaryOp::Implies) {
      lhs_min = p + 1;
      rhs_min = p;
    } else if (is_comparison(n.op)) {
      lhs_min = p + 1;
    }
    expr(*n.lhs, lhs_min, indent);
    out_ += ' ';
    out_ += to_string(n.op);
    out_ += ' ';
    expr(*n.rhs, rhs_min, indent);
  }

  static int precedence_of(BinaryOp op) {
    Expr probe;
    probe.node = Binary{op, nullptr, nullptr};
    return precedence(probe);
  }

  void node(const Unary& n, int indent) {
    if (n.op == UnaryOp::Not) {
      out_ += "not ";
      expr(*n.operand, kNot, indent);
    } else {
      out_ += '-';
      expr(*n.operand, kNeg, indent);
    }
  }

  void node(const TypeTest& n, int indent) {
    out_ += "type(";
    expr(*n.subject, 0, indent);
    out_ += ", " + n.tested.str() + ")";
  }

  void node(const ProcExpr& n, int indent) {
    if (n.annotation) {
      const auto& a = *n.annotation;
      out_ += "(*@\n";
      for (const auto& clause : a.clause_order) {
        line_start(indent + 1);
        out_ += clause;
        if (clause == "global") {
          for (std::size_t i = 0; i < a.globals.size(); ++i) out_ += (i ? ", " : " ") + a.globals[i];
        } else {
          out_ += ' ';
          expr(clause == "requires" ? *a.precondition : *a.postcondition, 0, indent + 2);
        }
        out_ += ";\n";
      }
      line_start(indent);
      out_ += "@*)\n";
      line_start(indent);
    }
    out_ += "proc(";
    for (std::size_t i = 0; i < n.params.size(); ++i) {
      if (i) out_ += ", ";
      out_ += n.params[i].name;
      if (n.params[i].annotated) out_ += "::" + n.params[i].type.str();
    }
    out_ += ')';
    if (n.return_annotated) out_ += "::" + n.return_type.str();
    if (n.header_semicolon) out_ += ';';
    out_ += '\n';
    block(n.body, indent + 1);
    line_start(indent);
    out_ += n.short_close ? "end" : "end proc";
  }

  void node(const Quantified& n, int indent) {
    out_ += n.kind == QuantKind::Forall ? "forall(" : "exists(";
    out_ += n.var + "::" + n.var_type.str() + ", ";
    expr(*n.body, 0, indent);
    out_ += ')';
  }

  void node(const Fold& n, int indent) {
    out_ += to_string(n.kind);
    out_ += '(';
    expr(*n.term, 0, indent);
    out_ += ", " + n.range.var;
    if (n.range.kind == Range::Kind::Numeric) {
      out_ += " = ";
      expr(*n.range.lo, kAdd, indent);
      out_ += "..";
      expr(*n.range.hi, kAdd, indent);
    } else {
      out_ += " in ";
      expr(*n.range.collection, kAdd, indent);
    }
    if (n.filter) {
      out_ += ", ";
      expr(*n.filter, 0, indent);
    }
    out_ += ')';
  }

  std::string out_;
};

class SexprPrinter {
 public:
  std::string take() { return std::move(out_); }

  void block(const Block& b) {
    out_ += "(block";
    for (const auto& s : b) {
      out_ += ' ';
      stmt(*s);
    }
    out_ += ')';
  }

  void expr(const Expr* e) {
    if (!e) {
      out_ += "nil";
      return;
    }
    std::visit([&](const auto& n) { node(n); }, e->node);
  }

 private:
  void stmt(const Stmt& s) {
    out_ += "(stmt \"" + s.terminator + "\" ";
    std::visit([&](const auto& n) { snode(n); }, s.node);
    out_ += ')';
  }

  void snode(const Assign& n) {
    out_ += "(assign ";
    expr(n.target.get());
    out_ += ' ';
    expr(n.value.get());
    out_ += ')';
  }
  void snode(const If& n) {
    out_ += n.short_close ? "(if-fi" : "(if";
    for (const auto& b : n.branches) {
      out_ += " (branch ";
      expr(b.condition.get());
      out_ += ' ';
      block(b.body);
      out_ += ')';
    }
    if (n.else_body) {
      out_ += " (else ";
      block(*n.else_body);
      out_ += ')';
    }
    out_ += ')';
  }
  void loop_ann(const std::optional<LoopAnnotation>& a) {
    if (!a) return;
    out_ += " (loop-spec";
    for (const auto& c : a->clause_order) {
      out_ += " (" + c + ' ';
      expr(c == "invariant" ? a->invariant.get() : a->decreases.get());
      out_ += ')';
    }
    out_ += ')';
  }
  void snode(const For& n) {
    out_ += std::string(n.short_close ? "(for-od " : "(for ") + n.var + ' ';
    expr(n.from.get());
    out_ += ' ';
    expr(n.by.get());
    out_ += ' ';
    expr(n.to.get());
    loop_ann(n.annotation);
    out_ += ' ';
    block(n.body);
    out_ += ')';
  }
  void snode(const While& n) {
    out_ += n.short_close ? "(while-od " : "(while ";
    expr(n.condition.get());
    loop_ann(n.annotation);
    out_ += ' ';
    block(n.body);
    out_ += ')';
  }
  void snode(const Return& n) {
    out_ += "(return ";
    expr(n.value.get());
    out_ += ')';
  }
  void snode(const ExprStmt& n) {
    out_ += "(expr ";
    expr(n.expr.get());
    out_ += ')';
  }
  void snode(const LocalDecl& n) {
    out_ += "(local";
    for (const auto& e : n.entries) {
      out_ += " (" + e.name + ' ' + (e.type ? e.type->str() : "-") + ' ';
      expr(e.init.get());
      out_ += ')';
    }
    out_ += ')';
  }
  void snode(const GlobalDecl& n) {
    out_ += "(global";
    for (const auto& name : n.names) out_ += ' ' + name;
    out_ += ')';
  }
  void snode(const Assert& n) {
    out_ += "(assert ";
    expr(n.formula.get());
    out_ += ')';
  }
  void snode(const SpecDecl& n) {
    out_ += "(spec";
    for (const auto& d : n.decls) {
      out_ += " (" + d.name;
      for (const auto& p : d.params) out_ += ' ' + p.str();
      out_ += " -> " + d.result.str() + ')';
    }
    out_ += ')';
  }

  void node(const IntLit& n) { out_ += "(int " + n.digits + ')'; }
  void node(const FloatLit& n) { out_ += "(float " + n.text + ')'; }
  void node(const StringLit& n) { out_ += "(str \"" + n.value + "\")"; }
  void node(const BoolLit& n) { out_ += n.value ? "(bool true)" : "(bool false)"; }
  void node(const NameRef& n) { out_ += "(name " + n.name + ')'; }
  void node(const ListLit& n) {
    out_ += "(list";
    for (const auto& e : n.elements) {
      out_ += ' ';
      expr(e.get());
    }
    out_ += ')';
  }
  void node(const Index& n) {
    out_ += "(index ";
    expr(n.base.get());
    out_ += ' ';
    expr(n.index.get());
    out_ += ')';
  }
  void node(const Call& n) {
    out_ += "(call " + n.callee;
    for (const auto& a : n.args) {
      out_ += ' ';
      expr(a.get());
    }
    out_ += ')';
  }
  void node(const Binary& n) {
    out_ += std::string("(") + to_string(n.op) + ' ';
    expr(n.lhs.get());
    out_ += ' ';
    expr(n.rhs.get());
    out_ += ')';
  }
  void node(const Unary& n) {
    out_ += n.op == UnaryOp::Not ? "(not " : "(neg ";
    expr(n.operand.get());
    out_ += ')';
  }
  void node(const TypeTest& n) {
    out_ += "(type ";
    expr(n.subject.get());
    out_ += ' ' + n.tested.str() + ')';
  }
  void node(const ProcExpr& n) {
    out_ += "(proc (";
    for (std::size_t i = 0; i < n.params.size(); ++i) {
      if (i) out_ += ' ';
      out_ += n.params[i].name + "::" + (n.params[i].annotated ? n.params[i].type.str() : "-");
    }
    out_ += ") " + (n.return_annotated ? n.return_type.str() : std::string("-"));
    if (n.annotation) {
      out_ += " (spec";
      for (const auto& c : n.annotation->clause_order) {
        out_ += " (" + c;
        if (c == "global") {
          for (const auto& g : n.annotation->globals) out_ += ' ' + g;
        } else {
          out_ += ' ';
          expr(c == "requires" ? n.annotation->precondition.get()
                               : n.annotation->postcondition.get());
        }
        out_ += ')';
      }
      out_ += ')';
    }
    out_ += n.header_semicolon ? " ; " : " ";
    block(n.body);
    out_ += n.short_close ? " end)" : " end-proc)";
  }
  void node(const Quantified& n) {
    out_ += std::string(n.kind == QuantKind::Forall ? "(forall " : "(exists ") + n.var +
            "::" + n.var_type.str() + ' ';
    expr(n.body.get());
    out_ += ')';
  }
  void node(const Fold& n) {
    out_ += std::string("(") + to_string(n.kind) + ' ';
    expr(n.term.get());
    out_ += " (" + n.range.var;
    if (n.range.kind == Range::Kind::Numeric) {
      out_ += " = ";
      expr(n.range.lo.get());
      out_ += ' ';
      expr(n.range.hi.get());
    } else {
      out_ += " in ";
      expr(n.range.collection.get());
    }
    out_ += ") ";
    expr(n.filter.get());
    out_ += ')';
  }

  std::string out_;
};

}  // namespace

std::string print_program(const Program& p) {
  SourcePrinter pr;
  pr.block(p.statements, 0);
  return pr.take();
}

std::string print_expr(const Expr& e) {
  SourcePrinter pr;
  pr.expr(e, 0, 0);
  return pr.take();
}

std::string dump_sexpr(const Program& p) {
  SexprPrinter pr;
  pr.block(p.statements);
  return pr.take();
}

std::string dump_sexpr(const Expr& e) {
  SexprPrinter pr;
  pr.expr(&e);
  return pr.take();
}

}  // namespace minimaple
