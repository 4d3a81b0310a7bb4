#include "minimaple/speccheck.hpp"

#include <set>

#include "minimaple/typechecker.hpp"
#include "typing_rules.hpp"

namespace minimaple {

const char* to_string(ClauseKind k) {
  switch (k) {
    case ClauseKind::Requires: return "requires";
    case ClauseKind::Ensures: return "ensures";
    case ClauseKind::Invariant: return "invariant";
    case ClauseKind::Decreases: return "decreases";
    case ClauseKind::Assert: return "assert";
  }
  return "?";
}

namespace {

void collect_decls(const Block& b, SpecSymbols& out);

void collect_decls_expr(const Expr& e, SpecSymbols& out) {
  if (const auto* p = e.as<ProcExpr>()) collect_decls(p->body, out);
}

void collect_decls(const Block& b, SpecSymbols& out) {
  for (const auto& s : b) {
    if (const auto* d = s->as<SpecDecl>()) {
      for (const auto& decl : d->decls) {
        if (decl.kind == AdtDecl::Kind::Type) continue;
        out.functions[decl.name] = {decl.params, decl.result, decl.kind == AdtDecl::Kind::Pred};
      }
    } else if (const auto* a = s->as<Assign>()) {
      collect_decls_expr(*a->value, out);
    } else if (const auto* e = s->as<ExprStmt>()) {
      collect_decls_expr(*e->expr, out);
    } else if (const auto* i = s->as<If>()) {
      for (const auto& br : i->branches) collect_decls(br.body, out);
      if (i->else_body) collect_decls(*i->else_body, out);
    } else if (const auto* f = s->as<For>()) {
      collect_decls(f->body, out);
    } else if (const auto* w = s->as<While>()) {
      collect_decls(w->body, out);
    }
  }
}

bool mentions_abstract(const Type& t) {
  if (t.is(TypeKind::Abstract)) return true;
  for (const auto& c : t.children()) {
    if (mentions_abstract(c)) return true;
  }
  return t.is(TypeKind::Proc) && mentions_abstract(t.proc_return());
}

class FormulaTyper {
 public:
  explicit FormulaTyper(const SpecContext& ctx) : ctx_(ctx), scope_(ctx.scope) {}

  MaybeType type(const Expr& e) {
    return std::visit([&](const auto& n) { return node(n, e); }, e.node);
  }

  Diagnostics take() { return std::move(diags_); }

 private:
  void error(const char* code, std::string msg, const SourceSpan& span) {
    diags_.push_back(make_error(code, std::move(msg), span));
  }

  const Type* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }

  // Bindings refined by assuming `cond` (positive) or its negation.
  void assume(const Expr& cond, bool positive, std::vector<std::pair<std::string, Type>>& out) {
    if (const auto* tt = cond.as<TypeTest>()) {
      const auto* var = tt->subject->as<NameRef>();
      if (!var) return;
      const Type* u = lookup(var->name);
      if (!u) return;
      for (auto it = out.rbegin(); it != out.rend(); ++it) {
        if (it->first == var->name) {
          u = &it->second;
          break;
        }
      }
      NarrowOutcome o = narrow_type(*u, tt->tested);
      MaybeType refined = positive ? o.then_type : o.else_type;
      if (refined) out.emplace_back(var->name, *refined);
      return;
    }
    if (const auto* u = cond.as<Unary>(); u && u->op == UnaryOp::Not) {
      assume(*u->operand, !positive, out);
      return;
    }
    if (const auto* b = cond.as<Binary>()) {
      if ((b->op == BinaryOp::And && positive) || (b->op == BinaryOp::Or && !positive)) {
        assume(*b->lhs, positive, out);
        assume(*b->rhs, positive, out);
      }
    }
  }

  // Types `e` with the refinements implied by `cond` in scope.
  MaybeType under(const Expr& cond, bool positive, const Expr& e) {
    std::vector<std::pair<std::string, Type>> refined;
    assume(cond, positive, refined);
    std::size_t mark = scope_.size();
    scope_.insert(scope_.end(), refined.begin(), refined.end());
    MaybeType t = type(e);
    scope_.resize(mark);
    return t;
  }

  MaybeType node(const IntLit&, const Expr&) { return Type::integer(); }
  MaybeType node(const FloatLit&, const Expr&) { return Type::float_(); }
  MaybeType node(const StringLit&, const Expr&) { return Type::string(); }
  MaybeType node(const BoolLit&, const Expr&) { return Type::boolean(); }

  MaybeType node(const NameRef& n, const Expr& e) {
    if (n.name == "RESULT" && !lookup("RESULT")) {
      if (ctx_.kind == ClauseKind::Ensures && ctx_.result_type) return *ctx_.result_type;
      error("SPEC-RESULT-IN-PRE",
            std::string("RESULT may only appear in ensures clauses, not in a ") +
                to_string(ctx_.kind) + " clause",
            e.span);
      return std::nullopt;
    }
    if (const Type* t = lookup(n.name)) return *t;
    error("SPEC-UNBOUND-NAME", "'" + n.name + "' is not bound in this " +
                                   std::string(to_string(ctx_.kind)) + " clause",
          e.span);
    return std::nullopt;
  }

  MaybeType node(const ListLit& n, const Expr&) {
    std::optional<Type> acc;
    bool ok = true;
    for (const auto& el : n.elements) {
      MaybeType t = type(*el);
      if (!t) {
        ok = false;
        continue;
      }
      acc = acc ? lub(*acc, *t) : *t;
    }
    if (!ok) return std::nullopt;
    return Type::list(acc ? *acc : Type::anything());
  }

  MaybeType node(const Index& n, const Expr&) {
    MaybeType base = type(*n.base);
    MaybeType idx = type(*n.index);
    if (!base || !idx) return std::nullopt;
    rules::IndexOutcome o = rules::index(*base, *idx, *n.index);
    if (!o.type) error("SPEC-TERM-TYPE", o.error, n.index->span);
    return o.type;
  }

  MaybeType node(const Call& n, const Expr& e) {
    std::vector<MaybeType> args;
    for (const auto& a : n.args) args.push_back(type(*a));
    for (const auto& a : args) {
      if (!a) return std::nullopt;
    }
    if (n.callee == "nops") {
      if (args.size() != 1 || !rules::element_type(*args[0])) {
        error("SPEC-TERM-TYPE", "nops expects one list argument", e.span);
        return std::nullopt;
      }
      return Type::integer();
    }
    const SpecSymbols::Signature* sig = nullptr;
    if (ctx_.symbols) {
      auto it = ctx_.symbols->functions.find(n.callee);
      if (it != ctx_.symbols->functions.end()) sig = &it->second;
    }
    if (!sig) {
      error("SPEC-UNBOUND-NAME", "unknown function '" + n.callee + "' in specification",
            n.callee_span);
      return std::nullopt;
    }
    if (sig->params.size() != args.size()) {
      error("SPEC-TERM-TYPE",
            "'" + n.callee + "' expects " + std::to_string(sig->params.size()) +
                " argument(s) but got " + std::to_string(args.size()),
            e.span);
      return std::nullopt;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (!is_subtype(*args[i], sig->params[i])) {
        error("SPEC-TERM-TYPE",
              "argument " + std::to_string(i + 1) + " of '" + n.callee + "' has type " +
                  args[i]->str() + ", expected " + sig->params[i].str(),
              n.args[i]->span);
        return std::nullopt;
      }
    }
    return sig->result;
  }

  MaybeType node(const Binary& n, const Expr& e) {
    const std::string op = to_string(n.op);
    if (is_logical(n.op)) {
      MaybeType l = type(*n.lhs);
      // The right operand is only evaluated when the left one lets it matter.
      MaybeType r = under(*n.lhs, n.op != BinaryOp::Or, *n.rhs);
      if (!l || !r) return std::nullopt;
      if (!rules::boolean_like(*l) || !rules::boolean_like(*r)) {
        error("SPEC-NOT-BOOLEAN",
              "operands of '" + op + "' must be boolean, got " + l->str() + " and " + r->str(),
              e.span);
        return std::nullopt;
      }
      return Type::boolean();
    }
    MaybeType l = type(*n.lhs);
    MaybeType r = type(*n.rhs);
    if (!l || !r) return std::nullopt;
    if (is_comparison(n.op)) {
      if (!rules::comparable(n.op, *l, *r)) {
        error("SPEC-TERM-TYPE",
              "cannot compare " + l->str() + " with " + r->str() + " using '" + op + "'", e.span);
        return std::nullopt;
      }
      return Type::boolean();
    }
    MaybeType t = rules::arithmetic(n.op, *l, *r);
    if (!t) {
      error("SPEC-TERM-TYPE",
            "operands of '" + op + "' must be numbers, got " + l->str() + " and " + r->str(),
            e.span);
    }
    return t;
  }

  MaybeType node(const Unary& n, const Expr& e) {
    MaybeType t = type(*n.operand);
    if (!t) return std::nullopt;
    if (n.op == UnaryOp::Not) {
      if (!rules::boolean_like(*t)) {
        error("SPEC-NOT-BOOLEAN", "operand of 'not' must be boolean, got " + t->str(), e.span);
        return std::nullopt;
      }
      return Type::boolean();
    }
    MaybeType r = rules::negate(*t);
    if (!r) error("SPEC-TERM-TYPE", "operand of '-' must be a number, got " + t->str(), e.span);
    return r;
  }

  MaybeType node(const TypeTest& n, const Expr&) {
    if (!type(*n.subject)) return std::nullopt;
    return Type::boolean();
  }

  MaybeType node(const ProcExpr&, const Expr& e) {
    error("SPEC-TERM-TYPE", "procedures cannot appear in specifications", e.span);
    return std::nullopt;
  }

  MaybeType node(const Quantified& n, const Expr&) {
    scope_.emplace_back(n.var, n.var_type);
    MaybeType body = type(*n.body);
    scope_.pop_back();
    if (!body) return std::nullopt;
    if (!rules::boolean_like(*body)) {
      error("SPEC-NOT-BOOLEAN", "quantified formula has type " + body->str() + ", expected boolean",
            n.body->span);
      return std::nullopt;
    }
    return Type::boolean();
  }

  MaybeType node(const Fold& n, const Expr& e) {
    if (n.kind == FoldKind::Seq && !seq_allowed_) {
      error("SPEC-SEQ-CONTEXT", "seq(...) may only be used as the collection of an 'in' range",
            e.span);
      return std::nullopt;
    }
    seq_allowed_ = false;
    std::optional<Type> var_t;
    if (n.range.kind == Range::Kind::Numeric) {
      MaybeType lo = type(*n.range.lo);
      MaybeType hi = type(*n.range.hi);
      if (!lo || !hi) return std::nullopt;
      if (!rules::integer_like(*lo) || !rules::integer_like(*hi)) {
        error("SPEC-RANGE-TYPE",
              "range bounds must be integers, got " + lo->str() + " and " + hi->str(),
              SourceSpan::cover(n.range.lo->span, n.range.hi->span));
        return std::nullopt;
      }
      var_t = Type::integer();
    } else {
      seq_allowed_ = true;
      MaybeType coll = type(*n.range.collection);
      seq_allowed_ = false;
      if (!coll) return std::nullopt;
      var_t = rules::element_type(*coll);
      if (!var_t) {
        error("SPEC-RANGE-TYPE", "range collection has type " + coll->str() + ", expected a list",
              n.range.collection->span);
        return std::nullopt;
      }
    }

    std::size_t mark = scope_.size();
    scope_.emplace_back(n.range.var, *var_t);
    MaybeType term;
    bool ok = true;
    if (n.filter) {
      MaybeType f = type(*n.filter);
      if (!f) {
        ok = false;
      } else if (!rules::boolean_like(*f)) {
        error("SPEC-NOT-BOOLEAN", "filter has type " + f->str() + ", expected boolean",
              n.filter->span);
        ok = false;
      }
      if (ok) term = under(*n.filter, true, *n.term);
    } else {
      term = type(*n.term);
    }
    scope_.resize(mark);
    if (!ok || !term) return std::nullopt;

    const std::string what = to_string(n.kind);
    switch (n.kind) {
      case FoldKind::Seq:
        return Type::list(*term);
      case FoldKind::Min:
      case FoldKind::Max:
        if (!rules::numeric_like(*term)) break;
        return *term;
      case FoldKind::Add:
      case FoldKind::Mul:
        if (term->is(TypeKind::Anything)) return Type::anything();
        if (is_subtype(*term, Type::integer())) return Type::integer();
        if (is_subtype(*term, Type::float_())) return Type::float_();
        if (is_numeric(*term)) return Type::union_of({Type::integer(), Type::float_()});
        break;
    }
    error("SPEC-TERM-TYPE", what + " needs a numeric term, got " + term->str(), n.term->span);
    return std::nullopt;
  }

  const SpecContext& ctx_;
  std::vector<std::pair<std::string, Type>> scope_;
  Diagnostics diags_;
  bool seq_allowed_ = false;
};

struct FrameUse {
  std::string name;
  SourceSpan span;
};

void assigned_names(const Block& b, std::vector<FrameUse>& out) {
  for (const auto& s : b) {
    if (const auto* a = s->as<Assign>()) {
      const Expr* root = a->target.get();
      while (const auto* ix = root->as<Index>()) root = ix->base.get();
      out.push_back({root->as<NameRef>()->name, root->span});
    } else if (const auto* i = s->as<If>()) {
      for (const auto& br : i->branches) assigned_names(br.body, out);
      if (i->else_body) assigned_names(*i->else_body, out);
    } else if (const auto* f = s->as<For>()) {
      out.push_back({f->var, f->var_span});
      assigned_names(f->body, out);
    } else if (const auto* w = s->as<While>()) {
      assigned_names(w->body, out);
    }
  }
}

bool uses_uninterpreted_rec(const Expr& e, const SpecSymbols& symbols) {
  bool found = false;
  auto visit = [&](const Expr* x) {
    if (x && !found) found = uses_uninterpreted_rec(*x, symbols);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Call>) {
          if (symbols.functions.count(n.callee)) found = true;
          for (const auto& a : n.args) visit(a.get());
        } else if constexpr (std::is_same_v<T, TypeTest>) {
          if (mentions_abstract(n.tested)) found = true;
          visit(n.subject.get());
        } else if constexpr (std::is_same_v<T, Quantified>) {
          if (mentions_abstract(n.var_type)) found = true;
          visit(n.body.get());
        } else if constexpr (std::is_same_v<T, Fold>) {
          visit(n.term.get());
          visit(n.range.lo.get());
          visit(n.range.hi.get());
          visit(n.range.collection.get());
          visit(n.filter.get());
        } else if constexpr (std::is_same_v<T, ListLit>) {
          for (const auto& a : n.elements) visit(a.get());
        } else if constexpr (std::is_same_v<T, Index>) {
          visit(n.base.get());
          visit(n.index.get());
        } else if constexpr (std::is_same_v<T, Binary>) {
          visit(n.lhs.get());
          visit(n.rhs.get());
        } else if constexpr (std::is_same_v<T, Unary>) {
          visit(n.operand.get());
        }
      },
      e.node);
  return found;
}

}  // namespace

SpecSymbols SpecSymbols::collect(const Program& program) {
  SpecSymbols out;
  collect_decls(program.statements, out);
  return out;
}

FormulaResult typecheck_formula(const Formula& f, const SpecContext& ctx) {
  FormulaTyper typer(ctx);
  FormulaResult r;
  r.type = typer.type(f);
  r.diagnostics = typer.take();
  return r;
}

Diagnostics check_clause(const Formula& f, const SpecContext& ctx) {
  FormulaResult r = typecheck_formula(f, ctx);
  if (r.type) {
    if (ctx.kind == ClauseKind::Decreases) {
      if (!rules::numeric_like(*r.type)) {
        r.diagnostics.push_back(make_error(
            "SPEC-TERM-TYPE", "decreases clause has type " + r.type->str() + ", expected a number",
            f.span));
      }
    } else if (!rules::boolean_like(*r.type)) {
      r.diagnostics.push_back(make_error("SPEC-NOT-BOOLEAN",
                                         std::string(to_string(ctx.kind)) + " clause has type " +
                                             r.type->str() + ", expected boolean",
                                         f.span));
    }
  }
  return std::move(r.diagnostics);
}

Diagnostics check_annotation(const ProcExpr& proc, const SpecSymbols& symbols) {
  Diagnostics out;
  if (!proc.annotation) return out;
  const AnnotationBlock& a = *proc.annotation;

  SpecContext ctx;
  ctx.symbols = &symbols;
  for (const auto& p : proc.params) {
    ctx.scope.emplace_back(p.name, p.annotated ? p.type : Type::anything());
  }
  for (const auto& g : a.globals) ctx.scope.emplace_back(g, Type::anything());

  if (a.precondition) {
    ctx.kind = ClauseKind::Requires;
    for (auto& d : check_clause(*a.precondition, ctx)) out.push_back(std::move(d));
  }
  if (a.postcondition) {
    ctx.kind = ClauseKind::Ensures;
    ctx.result_type = proc.return_annotated ? proc.return_type : Type::anything();
    for (auto& d : check_clause(*a.postcondition, ctx)) out.push_back(std::move(d));
  }

  // The global clause is a modifies-frame for the body.
  std::set<std::string> declared_global;
  for (const auto& s : proc.body) {
    if (const auto* g = s->as<GlobalDecl>()) declared_global.insert(g->names.begin(), g->names.end());
  }
  std::set<std::string> clause(a.globals.begin(), a.globals.end());
  std::vector<FrameUse> assigned;
  assigned_names(proc.body, assigned);
  std::set<std::string> reported;
  for (const auto& use : assigned) {
    if (!declared_global.count(use.name) || clause.count(use.name)) continue;
    if (!reported.insert(use.name).second) continue;
    out.push_back(make_error("SPEC-FRAME-VIOLATION",
                             "global '" + use.name +
                                 "' is modified by the body but is missing from the annotation's "
                                 "global clause",
                             use.span));
  }
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    if (declared_global.count(a.globals[i])) continue;
    out.push_back(make_error("SPEC-FRAME-VIOLATION",
                             "'" + a.globals[i] +
                                 "' is listed in the global clause but is not declared global in "
                                 "the procedure body",
                             a.global_spans[i]));
  }
  return out;
}

bool uses_uninterpreted(const Formula& f, const SpecSymbols& symbols) {
  return uses_uninterpreted_rec(f, symbols);
}

}  // namespace minimaple
