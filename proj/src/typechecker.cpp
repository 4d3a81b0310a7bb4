#include "minimaple/typechecker.hpp"

#include <algorithm>
#include <map>

#include "minimaple/speccheck.hpp"
#include "typing_rules.hpp"

namespace minimaple {

// ---- TypeEnv ----------------------------------------------------------------

const Binding* TypeEnv::find(const std::string& name) const {
  for (const auto& b : bindings_) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

Binding* TypeEnv::find(const std::string& name) {
  for (auto& b : bindings_) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

void TypeEnv::set(Binding b) {
  if (Binding* existing = find(b.name)) {
    *existing = std::move(b);
  } else {
    bindings_.push_back(std::move(b));
  }
}

void TypeEnv::set_type(const std::string& name, Type t) {
  if (Binding* b = find(name)) b->type = std::move(t);
}

void TypeEnv::erase(const std::string& name) {
  bindings_.erase(std::remove_if(bindings_.begin(), bindings_.end(),
                                 [&](const Binding& b) { return b.name == name; }),
                  bindings_.end());
}

namespace {

int render_rank(BindingKind k) {
  switch (k) {
    case BindingKind::Param: return 0;
    case BindingKind::Local: return 1;
    case BindingKind::Global: return 2;
    case BindingKind::TopLevel: return 3;
  }
  return 3;
}

std::string render_entries(const std::vector<std::pair<std::string, Type>>& entries) {
  std::string out = "π={";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ", ";
    out += entries[i].first + ":" + entries[i].second.str();
  }
  return out + "}";
}

}  // namespace

std::vector<std::pair<std::string, Type>> TypeEnv::entries() const {
  std::vector<const Binding*> order;
  for (const auto& b : bindings_) order.push_back(&b);
  std::stable_sort(order.begin(), order.end(), [](const Binding* a, const Binding* b) {
    return render_rank(a->kind) < render_rank(b->kind);
  });
  std::vector<std::pair<std::string, Type>> out;
  for (const Binding* b : order) out.emplace_back(b->name, b->type);
  return out;
}

std::string TypeEnv::render() const { return render_entries(entries()); }

bool operator==(const TypeEnv& a, const TypeEnv& b) {
  if (a.local_ != b.local_ || a.bindings_.size() != b.bindings_.size()) return false;
  for (const auto& x : a.bindings_) {
    const Binding* y = b.find(x.name);
    if (!y || y->kind != x.kind || y->type != x.type || y->declared != x.declared) return false;
  }
  return true;
}

TypeEnv merge(const TypeEnv& a, const TypeEnv& b) {
  TypeEnv out(a.local_context());
  // A name missing on one side is an unassigned symbol there. Members keep
  // the left-to-right order of the two sides.
  auto join = [](const Binding& x, const Type& left, const Type& right) {
    Type joined = lub(left, right);
    if (x.declared && !is_subtype(joined, *x.declared)) {
      joined = Type::union_of({left, right});
    }
    return joined;
  };
  for (const auto& x : a.bindings()) {
    Binding m = x;
    const Binding* y = b.find(x.name);
    m.type = join(x, x.type, y ? y->type : Type::symbol());
    out.set(std::move(m));
  }
  for (const auto& y : b.bindings()) {
    if (a.find(y.name)) continue;
    Binding m = y;
    m.type = join(y, Type::symbol(), y.type);
    out.set(std::move(m));
  }
  return out;
}

std::string PiSnapshot::render() const { return render_entries(entries); }

// ---- narrowing ----------------------------------------------------------------

NarrowOutcome narrow_type(const Type& u, const Type& t) {
  NarrowOutcome o;
  o.then_type = meet(u, t);
  o.always_false = !o.then_type.has_value();
  if (is_subtype(u, t)) {
    o.always_true = true;
  } else {
    o.else_type = u.is(TypeKind::Or) ? subtract(u, t) : MaybeType(u);
  }
  return o;
}

namespace {

struct NarrowState {
  std::optional<TypeEnv> then_env;
  std::optional<TypeEnv> else_env;
  Diagnostics diagnostics;
  std::vector<std::string> subjects;  // tested variable of each diagnostic
};

NarrowState narrow_rec(const Expr& cond, const TypeEnv& env) {
  NarrowState r;
  if (const auto* tt = cond.as<TypeTest>()) {
    const auto* var = tt->subject->as<NameRef>();
    const Binding* b = var ? env.find(var->name) : nullptr;
    if (!b) {
      r.then_env = env;
      r.else_env = env;
      return r;
    }
    NarrowOutcome o = narrow_type(b->type, tt->tested);
    if (o.then_type) {
      r.then_env = env;
      r.then_env->set_type(var->name, *o.then_type);
    }
    if (o.else_type) {
      r.else_env = env;
      r.else_env->set_type(var->name, *o.else_type);
    }
    std::string test = "type(" + var->name + ", " + tt->tested.str() + ")";
    if (o.always_true) {
      r.diagnostics.push_back(make_warning(
          "TEST-ALWAYS-TRUE",
          "redundant test " + test + " is always true: " + var->name + " has type " +
              b->type.str(),
          cond.span));
      r.subjects.push_back(var->name);
    } else if (o.always_false) {
      r.diagnostics.push_back(make_warning(
          "TEST-ALWAYS-FALSE",
          "redundant test " + test + " is always false: " + var->name + " has type " +
              b->type.str(),
          cond.span));
      r.subjects.push_back(var->name);
    }
    return r;
  }
  auto absorb = [&](NarrowState& from) {
    for (std::size_t i = 0; i < from.diagnostics.size(); ++i) {
      r.diagnostics.push_back(std::move(from.diagnostics[i]));
      r.subjects.push_back(std::move(from.subjects[i]));
    }
  };
  if (const auto* u = cond.as<Unary>(); u && u->op == UnaryOp::Not) {
    NarrowState inner = narrow_rec(*u->operand, env);
    r.then_env = std::move(inner.else_env);
    r.else_env = std::move(inner.then_env);
    absorb(inner);
    return r;
  }
  if (const auto* b = cond.as<Binary>(); b && (b->op == BinaryOp::And || b->op == BinaryOp::Or)) {
    const bool conj = b->op == BinaryOp::And;
    NarrowState lhs = narrow_rec(*b->lhs, env);
    absorb(lhs);
    // The side that continues into the right operand.
    std::optional<TypeEnv>& carried = conj ? lhs.then_env : lhs.else_env;
    std::optional<TypeEnv>& short_side = conj ? lhs.else_env : lhs.then_env;
    std::optional<TypeEnv> cont;
    bool other_reachable = short_side.has_value();
    if (carried) {
      NarrowState rhs = narrow_rec(*b->rhs, *carried);
      absorb(rhs);
      cont = conj ? std::move(rhs.then_env) : std::move(rhs.else_env);
      other_reachable = other_reachable || (conj ? rhs.else_env : rhs.then_env).has_value();
    }
    std::optional<TypeEnv> other;
    if (other_reachable) other = env;
    if (conj) {
      r.then_env = std::move(cont);
      r.else_env = std::move(other);
    } else {
      r.then_env = std::move(other);
      r.else_env = std::move(cont);
    }
    return r;
  }
  r.then_env = env;
  r.else_env = env;
  return r;
}

}  // namespace

NarrowResult narrow(const Expr& cond, const TypeEnv& env) {
  NarrowState s = narrow_rec(cond, env);
  NarrowResult r;
  r.then_env = std::move(s.then_env);
  r.else_env = std::move(s.else_env);
  r.diagnostics = std::move(s.diagnostics);
  if (r.else_env) {
    for (const auto& b : env.bindings()) {
      const Binding* after = r.else_env->find(b.name);
      if (after && after->type != b.type) r.complemented.insert(b.name);
    }
  }
  return r;
}

// ---- checker --------------------------------------------------------------------

namespace {

constexpr int kMaxLoopIterations = 16;

void collect_names(const Expr& e, std::set<std::string>& out);

void collect_names(const Expr* e, std::set<std::string>& out) {
  if (e) collect_names(*e, out);
}

void collect_names(const Expr& e, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NameRef>) {
          out.insert(n.name);
        } else if constexpr (std::is_same_v<T, ListLit>) {
          for (const auto& x : n.elements) collect_names(*x, out);
        } else if constexpr (std::is_same_v<T, Index>) {
          collect_names(*n.base, out);
          collect_names(*n.index, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& x : n.args) collect_names(*x, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_names(*n.lhs, out);
          collect_names(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, Unary>) {
          collect_names(*n.operand, out);
        } else if constexpr (std::is_same_v<T, TypeTest>) {
          collect_names(*n.subject, out);
        } else if constexpr (std::is_same_v<T, Quantified>) {
          collect_names(*n.body, out);
        } else if constexpr (std::is_same_v<T, Fold>) {
          collect_names(*n.term, out);
          collect_names(n.range.lo.get(), out);
          collect_names(n.range.hi.get(), out);
          collect_names(n.range.collection.get(), out);
          collect_names(n.filter.get(), out);
        }
      },
      e.node);
}

void collect_globals(const Block& b, std::set<std::string>& out);

void collect_globals_expr(const Expr& e, std::set<std::string>& out) {
  if (const auto* p = e.as<ProcExpr>()) {
    collect_globals(p->body, out);
    return;
  }
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ListLit>) {
          for (const auto& x : n.elements) collect_globals_expr(*x, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& x : n.args) collect_globals_expr(*x, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_globals_expr(*n.lhs, out);
          collect_globals_expr(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, Index>) {
          collect_globals_expr(*n.base, out);
          collect_globals_expr(*n.index, out);
        } else if constexpr (std::is_same_v<T, Unary>) {
          collect_globals_expr(*n.operand, out);
        }
      },
      e.node);
}

void collect_globals(const Block& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, GlobalDecl>) {
            out.insert(n.names.begin(), n.names.end());
          } else if constexpr (std::is_same_v<T, Assign>) {
            collect_globals_expr(*n.value, out);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            collect_globals_expr(*n.expr, out);
          } else if constexpr (std::is_same_v<T, Return>) {
            collect_globals_expr(*n.value, out);
          } else if constexpr (std::is_same_v<T, LocalDecl>) {
            for (const auto& e : n.entries) {
              if (e.init) collect_globals_expr(*e.init, out);
            }
          } else if constexpr (std::is_same_v<T, If>) {
            for (const auto& br : n.branches) collect_globals(br.body, out);
            if (n.else_body) collect_globals(*n.else_body, out);
          } else if constexpr (std::is_same_v<T, For> || std::is_same_v<T, While>) {
            collect_globals(n.body, out);
          }
        },
        s->node);
  }
}

Type proc_signature(const ProcExpr& p) {
  std::vector<Type> params;
  for (const auto& prm : p.params) params.push_back(prm.annotated ? prm.type : Type::anything());
  return Type::proc(std::move(params), p.return_annotated ? p.return_type : Type::anything());
}

const char* kind_word(BindingKind k) {
  switch (k) {
    case BindingKind::Param: return "a parameter";
    case BindingKind::Local: return "a local";
    case BindingKind::Global: return "a global";
    case BindingKind::TopLevel: return "a variable";
  }
  return "a variable";
}

class Checker {
 public:
  explicit Checker(const Program& p) : program_(p), symbols_(SpecSymbols::collect(p)) {}

  CheckResult run() {
    collect_globals(program_.statements, global_names_);
    for (const auto& s : program_.statements) {
      const auto* a = s->as<Assign>();
      if (!a) continue;
      const auto* name = a->target->as<NameRef>();
      const auto* proc = a->value->as<ProcExpr>();
      if (name && proc) known_procs_[name->name] = proc_signature(*proc);
    }
    block(program_.statements, TypeEnv(false));
    CheckResult r;
    r.diagnostics = std::move(diags_);
    r.snapshots = std::move(snaps_);
    return r;
  }

 private:
  using Flow = std::optional<TypeEnv>;

  struct ProcFrame {
    const ProcExpr* proc = nullptr;
    Type return_type;
    bool return_annotated = false;
    std::vector<std::pair<std::string, SourceSpan>> declared;
    std::set<std::string> used;
  };

  // ---- recording ----
  void report(Diagnostic d) {
    if (quiet_ == 0) diags_.push_back(std::move(d));
  }
  void error(const char* code, std::string msg, const SourceSpan& span) {
    report(make_error(code, std::move(msg), span));
  }
  void snapshot(PiSnapshot::Anchor anchor, const void* node, std::size_t branch, int line,
                const TypeEnv& env) {
    if (quiet_ != 0) return;
    PiSnapshot s;
    s.anchor = anchor;
    s.node = node;
    s.branch = branch;
    s.line = line;
    s.entries = env.entries();
    snaps_.push_back(std::move(s));
  }
  bool in_proc() const { return !frames_.empty(); }
  void use(const std::string& name) {
    if (in_proc()) frames_.back().used.insert(name);
  }

  SpecContext spec_context(ClauseKind kind, const TypeEnv& env) const {
    SpecContext ctx;
    ctx.kind = kind;
    ctx.scope = env.entries();
    ctx.symbols = &symbols_;
    return ctx;
  }

  void check_formula(const Formula& f, ClauseKind kind, const TypeEnv& env) {
    if (in_proc()) collect_names(f, frames_.back().used);
    for (auto& d : check_clause(f, spec_context(kind, env))) report(std::move(d));
  }

  // ---- statements ----
  Flow block(const Block& b, Flow env) {
    for (const auto& s : b) {
      if (!env) break;
      env = statement(*s, std::move(*env));
      if (env) snapshot(PiSnapshot::Anchor::AfterStatement, s.get(), 0, s->span.end_line, *env);
    }
    return env;
  }

  Flow statement(const Stmt& s, TypeEnv env) {
    return std::visit([&](const auto& n) { return stmt(n, s, std::move(env)); }, s.node);
  }

  Flow stmt(const Assign& a, const Stmt&, TypeEnv env) {
    assign(a, env);
    return env;
  }

  Flow stmt(const ExprStmt& n, const Stmt&, TypeEnv env) {
    expr(*n.expr, env, nullptr);
    return env;
  }

  Flow stmt(const Return& n, const Stmt& s, TypeEnv env) {
    if (!in_proc()) {
      expr(*n.value, env, nullptr);
      error("RETURN-OUTSIDE-PROC", "'return' outside of a procedure body", s.span);
      return env;
    }
    const ProcFrame& f = frames_.back();
    Type ret = f.return_type;
    bool annotated = f.return_annotated;
    MaybeType t = expr(*n.value, env, annotated ? &ret : nullptr);
    if (t && annotated && !is_subtype(*t, ret)) {
      error("TYPE-RETURN-MISMATCH",
            "returned value has type " + t->str() + ", which is not a subtype of the declared " +
                "return type " + ret.str(),
            n.value->span);
    }
    return std::nullopt;
  }

  Flow stmt(const LocalDecl& d, const Stmt&, TypeEnv env) {
    if (!in_proc()) return env;
    for (const auto& e : d.entries) {
      if (const Binding* prev = env.find(e.name)) {
        error("DUP-DECL",
              "'" + e.name + "' is declared local but is already " + kind_word(prev->kind),
              e.span);
        continue;
      }
      frames_.back().declared.emplace_back(e.name, e.span);
      Binding b{e.name, Type::symbol(), BindingKind::Local, e.type};
      if (e.type) {
        b.type = *e.type;
        if (e.init) {
          MaybeType t = expr(*e.init, env, &*e.type);
          if (t && !is_subtype(*t, *e.type)) {
            error("TYPE-ASSIGN-MISMATCH",
                  "initializer of '" + e.name + "' has type " + t->str() +
                      ", which is not a subtype of its declared type " + e.type->str(),
                  e.init->span);
          } else if (t) {
            b.type = *t;
          }
        }
      } else if (e.init) {
        MaybeType t = expr(*e.init, env, nullptr);
        b.type = t ? *t : Type::anything();
      }
      env.set(std::move(b));
    }
    return env;
  }

  Flow stmt(const GlobalDecl& d, const Stmt&, TypeEnv env) {
    if (!in_proc()) return env;
    for (std::size_t i = 0; i < d.names.size(); ++i) {
      const std::string& name = d.names[i];
      if (const Binding* prev = env.find(name)) {
        error("DUP-DECL",
              "'" + name + "' is declared global but is already " + kind_word(prev->kind),
              d.spans[i]);
        continue;
      }
      env.set(Binding{name, Type::anything(), BindingKind::Global, std::nullopt});
    }
    return env;
  }

  Flow stmt(const Assert& a, const Stmt&, TypeEnv env) {
    check_formula(*a.formula, ClauseKind::Assert, env);
    return env;
  }

  Flow stmt(const SpecDecl&, const Stmt&, TypeEnv env) { return env; }

  Flow stmt(const If& n, const Stmt& s, TypeEnv env) {
    Flow cur = std::move(env);
    std::vector<Flow> exits;
    std::set<std::string> complemented;
    for (std::size_t k = 0; k < n.branches.size() && cur; ++k) {
      const IfBranch& br = n.branches[k];
      condition(*br.condition, *cur);
      NarrowState ns = narrow_rec(*br.condition, *cur);
      NarrowResult nr = narrow(*br.condition, *cur);
      for (std::size_t i = 0; i < ns.diagnostics.size(); ++i) {
        if (k > 0 && complemented.count(ns.subjects[i])) continue;
        report(std::move(ns.diagnostics[i]));
      }
      complemented.insert(nr.complemented.begin(), nr.complemented.end());
      if (nr.then_env) {
        snapshot(PiSnapshot::Anchor::BranchEntry, &s, k, br.then_span.line, *nr.then_env);
        exits.push_back(block(br.body, std::move(nr.then_env)));
      }
      cur = std::move(nr.else_env);
    }
    if (n.else_body) {
      if (cur) {
        snapshot(PiSnapshot::Anchor::BranchEntry, &s, n.branches.size(), n.else_span.line, *cur);
        exits.push_back(block(*n.else_body, std::move(cur)));
      }
    } else {
      // Falling through comes first so untouched types lead the merge.
      exits.insert(exits.begin(), std::move(cur));
    }
    Flow out;
    for (auto& e : exits) {
      if (!e) continue;
      out = out ? merge(*out, *e) : std::move(*e);
    }
    return out;
  }

  void condition(const Expr& cond, TypeEnv& env) {
    MaybeType t = expr(cond, env, nullptr);
    if (t && !rules::boolean_like(*t)) {
      error("TYPE-CONDITION", "condition has type " + t->str() + ", expected boolean", cond.span);
    }
  }

  // Replaces every binding that still moved since the previous head by its
  // widest admissible type, which forces a fixed point.
  static TypeEnv widen(const TypeEnv& env, const TypeEnv& prev) {
    TypeEnv out = env;
    for (const auto& b : env.bindings()) {
      const Binding* p = prev.find(b.name);
      if (p && p->type == b.type) continue;
      out.set_type(b.name, b.declared ? *b.declared : Type::anything());
    }
    return out;
  }

  Flow stmt(const For& n, const Stmt& s, TypeEnv env) {
    auto bound = [&](const ExprPtr& e) -> Type {
      if (!e) return Type::integer();
      MaybeType t = expr(*e, env, nullptr);
      if (!t) return Type::integer();
      if (!rules::numeric_like(*t)) {
        error("TYPE-LOOP-BOUNDS", "loop bound has type " + t->str() + ", expected a number",
              e->span);
        return Type::integer();
      }
      return *t;
    };
    Type from_t = bound(n.from);
    Type by_t = bound(n.by);
    bound(n.to);
    Type var_t = lub(from_t, by_t);

    use(n.var);
    std::optional<Binding> pre_var;
    if (const Binding* b = env.find(n.var)) pre_var = *b;
    if (in_proc()) {
      if (!pre_var) {
        error("UNDECLARED-LOCAL",
              "loop variable '" + n.var + "' is not declared in this procedure", n.var_span);
      } else if (pre_var->kind == BindingKind::Param) {
        error("TYPE-PARAM-ASSIGN", "parameter '" + n.var + "' cannot be used as a loop variable",
              n.var_span);
      } else if (pre_var->declared && !is_subtype(var_t, *pre_var->declared)) {
        error("TYPE-ASSIGN-MISMATCH",
              "loop variable '" + n.var + "' takes values of type " + var_t.str() +
                  ", which is not a subtype of its declared type " + pre_var->declared->str(),
              n.var_span);
      }
    }

    const TypeEnv pre = env;
    auto with_var = [&](TypeEnv e) {
      if (Binding* b = e.find(n.var)) {
        b->type = var_t;
      } else {
        e.set(Binding{n.var, var_t, in_proc() ? BindingKind::Local : BindingKind::TopLevel,
                      std::nullopt});
      }
      return e;
    };

    TypeEnv entry = fixed_point(with_var(pre), [&](const TypeEnv& head) -> Flow {
      Flow exit = block(n.body, head);
      if (!exit) return head;
      return with_var(merge(head, *exit));
    });

    if (n.annotation) loop_annotation(*n.annotation, entry);
    snapshot(PiSnapshot::Anchor::LoopBody, &s, 0, n.do_span.line, entry);
    Flow exit = block(n.body, entry);

    TypeEnv after = exit ? merge(pre, *exit) : pre;
    if (pre_var) {
      after.set(*pre_var);
    } else {
      after.erase(n.var);
    }
    return after;
  }

  Flow stmt(const While& n, const Stmt& s, TypeEnv env) {
    const TypeEnv pre = env;
    TypeEnv head = fixed_point(pre, [&](const TypeEnv& h) -> Flow {
      TypeEnv probe = h;
      expr(*n.condition, probe, nullptr);
      NarrowResult nr = narrow(*n.condition, probe);
      if (!nr.then_env) return probe;
      Flow exit = block(n.body, std::move(nr.then_env));
      if (!exit) return probe;
      return merge(probe, *exit);
    });

    condition(*n.condition, head);
    NarrowState ns = narrow_rec(*n.condition, head);
    for (auto& d : ns.diagnostics) report(std::move(d));
    NarrowResult nr = narrow(*n.condition, head);
    if (n.annotation) loop_annotation(*n.annotation, head);
    if (nr.then_env) {
      snapshot(PiSnapshot::Anchor::LoopBody, &s, 0, n.do_span.line, *nr.then_env);
      block(n.body, nr.then_env);
    }
    return nr.else_env;
  }

  template <class Step>
  TypeEnv fixed_point(TypeEnv entry, Step step) {
    ++quiet_;
    for (int iter = 0;; ++iter) {
      Flow next = step(entry);
      TypeEnv candidate = next ? std::move(*next) : entry;
      if (candidate == entry) break;
      entry = iter >= kMaxLoopIterations ? widen(candidate, entry) : std::move(candidate);
    }
    --quiet_;
    return entry;
  }

  void loop_annotation(const LoopAnnotation& a, const TypeEnv& env) {
    if (a.invariant) check_formula(*a.invariant, ClauseKind::Invariant, env);
    if (a.decreases) check_formula(*a.decreases, ClauseKind::Decreases, env);
  }

  // ---- assignment ----
  void assign(const Assign& a, TypeEnv& env) {
    std::vector<const Expr*> indices;
    const Expr* root = a.target.get();
    while (const auto* ix = root->as<Index>()) {
      indices.push_back(ix->index.get());
      root = ix->base.get();
    }
    std::reverse(indices.begin(), indices.end());
    const std::string& name = root->as<NameRef>()->name;
    use(name);

    if (!in_proc() && indices.empty()) {
      MaybeType t;
      if (const auto* p = a.value->as<ProcExpr>()) {
        env.set(Binding{name, proc_signature(*p), BindingKind::TopLevel, std::nullopt});
      }
      t = expr(*a.value, env, nullptr);
      env.set(Binding{name, t ? *t : Type::anything(), BindingKind::TopLevel, std::nullopt});
      return;
    }

    const Binding* b = env.find(name);
    if (!b) {
      expr(*a.value, env, nullptr);
      if (in_proc()) {
        error("UNDECLARED-LOCAL",
              "assignment to '" + name +
                  "', which is not declared in this procedure (declare it local or global)",
              root->span);
      } else {
        error("UNDECLARED-LOCAL", "indexed assignment to unassigned name '" + name + "'",
              root->span);
      }
      return;
    }
    if (b->kind == BindingKind::Param) {
      expr(*a.value, env, nullptr);
      error("TYPE-PARAM-ASSIGN", "parameter '" + name + "' cannot be assigned", root->span);
      return;
    }

    // Types along the index chain.
    std::vector<Type> chain{b->type};
    for (const Expr* ix : indices) {
      MaybeType it = expr(*ix, env, nullptr);
      if (!it) return;
      rules::IndexOutcome o = rules::index(chain.back(), *it, *ix);
      if (!o.type) {
        error("TYPE-INDEX", o.error, ix->span);
        return;
      }
      chain.push_back(*o.type);
    }

    std::optional<Type> declared = b->declared;
    const Type* expected = indices.empty() ? (declared ? &*declared : nullptr) : nullptr;
    Type element_expected = chain.back();
    if (!indices.empty() && declared) expected = &element_expected;
    MaybeType t = expr(*a.value, env, expected);
    if (!t) {
      if (declared) env.set_type(name, *declared);
      return;
    }
    Type updated = *t;
    for (std::size_t i = indices.size(); i-- > 0;) {
      updated = with_element(chain[i], *indices[i], updated);
    }
    if (declared && !is_subtype(updated, *declared)) {
      error("TYPE-ASSIGN-MISMATCH",
            indices.empty()
                ? "cannot assign a value of type " + t->str() + " to '" + name +
                      "' declared as " + declared->str()
                : "assignment makes '" + name + "' of type " + updated.str() +
                      ", which is not a subtype of its declared type " + declared->str(),
            a.value->span);
      env.set_type(name, *declared);
      return;
    }
    env.set_type(name, updated);
  }

  // Container type after storing a value of type `v` at `index`.
  static Type with_element(const Type& container, const Expr& index, const Type& v) {
    switch (container.kind()) {
      case TypeKind::List:
        return Type::list(lub(container.elem(), v));
      case TypeKind::Tuple: {
        std::vector<Type> elems = container.children();
        if (auto k = rules::literal_int(index)) {
          elems[static_cast<std::size_t>(*k - 1)] = v;
        } else {
          for (auto& e : elems) e = lub(e, v);
        }
        return Type::tuple(std::move(elems));
      }
      case TypeKind::Or: {
        std::vector<Type> members;
        for (const auto& m : container.children()) members.push_back(with_element(m, index, v));
        return Type::union_of(std::move(members));
      }
      default:
        return Type::anything();
    }
  }

  // ---- expressions ----
  static const Type* expected_tuple(const Type* expected, std::size_t arity) {
    if (!expected) return nullptr;
    if (expected->is(TypeKind::Tuple)) {
      return expected->children().size() == arity ? expected : nullptr;
    }
    if (expected->is(TypeKind::Or)) {
      for (const auto& m : expected->children()) {
        if (m.is(TypeKind::Tuple) && m.children().size() == arity) return &m;
      }
    }
    return nullptr;
  }

  static const Type* expected_list(const Type* expected) {
    if (!expected) return nullptr;
    if (expected->is(TypeKind::List)) return expected;
    if (expected->is(TypeKind::Or)) {
      for (const auto& m : expected->children()) {
        if (m.is(TypeKind::List)) return &m;
      }
    }
    return nullptr;
  }

  MaybeType expr(const Expr& e, TypeEnv& env, const Type* expected) {
    return std::visit([&](const auto& n) { return node(n, e, env, expected); }, e.node);
  }

  MaybeType node(const IntLit&, const Expr&, TypeEnv&, const Type*) { return Type::integer(); }
  MaybeType node(const FloatLit&, const Expr&, TypeEnv&, const Type*) { return Type::float_(); }
  MaybeType node(const StringLit&, const Expr&, TypeEnv&, const Type*) { return Type::string(); }
  MaybeType node(const BoolLit&, const Expr&, TypeEnv&, const Type*) { return Type::boolean(); }

  MaybeType node(const NameRef& n, const Expr& e, TypeEnv& env, const Type*) {
    use(n.name);
    if (const Binding* b = env.find(n.name)) return b->type;
    if (auto it = known_procs_.find(n.name); it != known_procs_.end()) return it->second;
    if (in_proc()) {
      error("UNDECLARED-LOCAL", "'" + n.name + "' is not declared in this procedure", e.span);
      return std::nullopt;
    }
    return Type::symbol();  // an unassigned name evaluates to itself
  }

  MaybeType node(const ListLit& n, const Expr&, TypeEnv& env, const Type* expected) {
    if (const Type* tup = expected_tuple(expected, n.elements.size())) {
      std::vector<Type> elems;
      for (std::size_t i = 0; i < n.elements.size(); ++i) {
        MaybeType t = expr(*n.elements[i], env, &tup->children()[i]);
        if (!t) return std::nullopt;
        elems.push_back(*t);
      }
      if (!elems.empty()) return Type::tuple(std::move(elems));
    }
    const Type* lst = expected_list(expected);
    const Type* elem_expected = lst ? &lst->elem() : nullptr;
    std::optional<Type> acc;
    bool ok = true;
    for (const auto& el : n.elements) {
      MaybeType t = expr(*el, env, elem_expected);
      if (!t) {
        ok = false;
        continue;
      }
      acc = acc ? lub(*acc, *t) : *t;
    }
    if (!ok) return std::nullopt;
    if (!acc) return lst ? *lst : Type::list(Type::anything());
    return Type::list(*acc);
  }

  MaybeType node(const Index& n, const Expr&, TypeEnv& env, const Type*) {
    MaybeType base = expr(*n.base, env, nullptr);
    MaybeType idx = expr(*n.index, env, nullptr);
    if (!base || !idx) return std::nullopt;
    rules::IndexOutcome o = rules::index(*base, *idx, *n.index);
    if (!o.type) error("TYPE-INDEX", o.error, n.index->span);
    return o.type;
  }

  MaybeType node(const Call& n, const Expr& e, TypeEnv& env, const Type*) {
    if (n.callee == "nops") {
      if (n.args.size() != 1) {
        for (const auto& a : n.args) expr(*a, env, nullptr);
        error("TYPE-CALL-ARGS", "nops expects 1 argument but got " + std::to_string(n.args.size()),
              e.span);
        return std::nullopt;
      }
      MaybeType t = expr(*n.args[0], env, nullptr);
      if (!t) return std::nullopt;
      if (!rules::element_type(*t)) {
        error("TYPE-CALL-ARGS", "nops expects a list or tuple but got " + t->str(),
              n.args[0]->span);
        return std::nullopt;
      }
      return Type::integer();
    }

    use(n.callee);
    std::optional<Type> callee;
    if (const Binding* b = env.find(n.callee)) {
      callee = b->type;
    } else if (auto it = known_procs_.find(n.callee); it != known_procs_.end()) {
      callee = it->second;
    }
    if (!callee) {
      for (const auto& a : n.args) expr(*a, env, nullptr);
      error("UNKNOWN-PROC", "call to unknown procedure '" + n.callee + "'", n.callee_span);
      return std::nullopt;
    }

    MaybeType result;
    bool ok = true;
    if (callee->is(TypeKind::Proc)) {
      const auto& params = callee->children();
      if (params.size() != n.args.size()) {
        error("TYPE-CALL-ARGS",
              "'" + n.callee + "' expects " + std::to_string(params.size()) +
                  " argument(s) but got " + std::to_string(n.args.size()),
              e.span);
        ok = false;
      }
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        const Type* want = i < params.size() ? &params[i] : nullptr;
        MaybeType t = expr(*n.args[i], env, want);
        if (!t) {
          ok = false;
        } else if (want && !is_subtype(*t, *want)) {
          error("TYPE-CALL-ARGS",
                "argument " + std::to_string(i + 1) + " of '" + n.callee + "' has type " +
                    t->str() + ", expected " + want->str(),
                n.args[i]->span);
          ok = false;
        }
      }
      if (ok) result = callee->proc_return();
    } else if (callee->is(TypeKind::Anything)) {
      for (const auto& a : n.args) expr(*a, env, nullptr);
      result = Type::anything();
    } else {
      for (const auto& a : n.args) expr(*a, env, nullptr);
      error("TYPE-CALL-ARGS", "'" + n.callee + "' has type " + callee->str() +
                                  " and is not a procedure", n.callee_span);
    }

    // The callee may assign any global variable.
    for (const auto& g : global_names_) {
      Binding* b = env.find(g);
      if (b && (b->kind == BindingKind::Global || b->kind == BindingKind::TopLevel)) {
        b->type = Type::anything();
      }
    }
    return result;
  }

  // The right operand of `and`/`implies` is only evaluated when the left one
  // holds, and that of `or` when it fails, so it is typed under the matching
  // narrowing: `type(v,integer) and v > 0`.
  MaybeType guarded_rhs(const Binary& n, TypeEnv& env) {
    NarrowState s = narrow_rec(*n.lhs, env);
    std::optional<TypeEnv>& side = n.op == BinaryOp::Or ? s.else_env : s.then_env;
    if (!side) return expr(*n.rhs, env, nullptr);
    TypeEnv scoped = std::move(*side);
    MaybeType r = expr(*n.rhs, scoped, nullptr);
    // Keep widenings caused by calls in the right operand.
    for (const auto& b : scoped.bindings()) {
      Binding* outer = env.find(b.name);
      if (outer && b.type.is(TypeKind::Anything)) outer->type = b.type;
    }
    return r;
  }

  MaybeType node(const Binary& n, const Expr& e, TypeEnv& env, const Type*) {
    MaybeType l = expr(*n.lhs, env, nullptr);
    MaybeType r = is_logical(n.op) ? guarded_rhs(n, env) : expr(*n.rhs, env, nullptr);
    if (!l || !r) return std::nullopt;
    const std::string op = to_string(n.op);
    if (is_logical(n.op)) {
      if (!rules::boolean_like(*l) || !rules::boolean_like(*r)) {
        error("TYPE-OPERAND",
              "operands of '" + op + "' must be boolean, got " + l->str() + " and " + r->str(),
              e.span);
        return std::nullopt;
      }
      return Type::boolean();
    }
    if (is_comparison(n.op)) {
      if (!rules::comparable(n.op, *l, *r)) {
        error("TYPE-OPERAND", "cannot compare " + l->str() + " with " + r->str() + " using '" +
                                  op + "'", e.span);
        return std::nullopt;
      }
      return Type::boolean();
    }
    MaybeType t = rules::arithmetic(n.op, *l, *r);
    if (!t) {
      error("TYPE-OPERAND",
            "operands of '" + op + "' must be numbers, got " + l->str() + " and " + r->str(),
            e.span);
    }
    return t;
  }

  MaybeType node(const Unary& n, const Expr& e, TypeEnv& env, const Type*) {
    MaybeType t = expr(*n.operand, env, nullptr);
    if (!t) return std::nullopt;
    if (n.op == UnaryOp::Not) {
      if (!rules::boolean_like(*t)) {
        error("TYPE-OPERAND", "operand of 'not' must be boolean, got " + t->str(), e.span);
        return std::nullopt;
      }
      return Type::boolean();
    }
    MaybeType r = rules::negate(*t);
    if (!r) error("TYPE-OPERAND", "operand of '-' must be a number, got " + t->str(), e.span);
    return r;
  }

  MaybeType node(const TypeTest& n, const Expr&, TypeEnv& env, const Type*) {
    if (!expr(*n.subject, env, nullptr)) return std::nullopt;
    return Type::boolean();
  }

  MaybeType node(const Quantified&, const Expr& e, TypeEnv&, const Type*) {
    error("SYNTAX-ERROR", "quantifiers may only appear in specifications", e.span);
    return std::nullopt;
  }

  MaybeType node(const Fold&, const Expr& e, TypeEnv&, const Type*) {
    error("SYNTAX-ERROR", "quantifiers may only appear in specifications", e.span);
    return std::nullopt;
  }

  MaybeType node(const ProcExpr& p, const Expr&, TypeEnv&, const Type*) { return check_proc(p); }

  Type check_proc(const ProcExpr& p) {
    Type sig = proc_signature(p);
    ProcFrame frame;
    frame.proc = &p;
    frame.return_type = sig.proc_return();
    frame.return_annotated = p.return_annotated;
    frames_.push_back(std::move(frame));

    TypeEnv env(true);
    for (std::size_t i = 0; i < p.params.size(); ++i) {
      const Param& prm = p.params[i];
      if (env.find(prm.name)) {
        error("DUP-DECL", "parameter '" + prm.name + "' is declared twice", prm.span);
        continue;
      }
      frames_.back().declared.emplace_back(prm.name, prm.span);
      env.set(Binding{prm.name, sig.children()[i], BindingKind::Param, sig.children()[i]});
    }
    snapshot(PiSnapshot::Anchor::ProcEntry, &p, 0, p.header_span.end_line, env);

    Flow exit = block(p.body, env);
    if (exit && p.return_annotated && !is_subtype(Type::symbol(), p.return_type)) {
      error("TYPE-MISSING-RETURN",
            "procedure may finish without returning a value of type " + p.return_type.str(),
            p.header_span);
    }

    if (p.annotation) {
      const AnnotationBlock& a = *p.annotation;
      collect_names(a.precondition.get(), frames_.back().used);
      collect_names(a.postcondition.get(), frames_.back().used);
      for (auto& d : check_annotation(p, symbols_)) report(std::move(d));
    }

    const ProcFrame& f = frames_.back();
    for (const auto& [name, span] : f.declared) {
      if (!f.used.count(name)) {
        report(make_warning("UNUSED-VAR", "'" + name + "' is declared but never used", span));
      }
    }
    frames_.pop_back();
    return sig;
  }

  const Program& program_;
  SpecSymbols symbols_;
  Diagnostics diags_;
  std::vector<PiSnapshot> snaps_;
  int quiet_ = 0;
  std::vector<ProcFrame> frames_;
  std::map<std::string, Type> known_procs_;
  std::set<std::string> global_names_;
};

}  // namespace

CheckResult check_program(const Program& program) { return Checker(program).run(); }

}  // namespace minimaple
