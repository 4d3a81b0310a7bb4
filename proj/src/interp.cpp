#include "minimaple/interp.hpp"

#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "minimaple/printer.hpp"
#include "minimaple/speccheck.hpp"

namespace minimaple {

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Precondition: return "precondition";
    case ViolationKind::Postcondition: return "postcondition";
    case ViolationKind::Invariant: return "invariant";
    case ViolationKind::Assertion: return "assertion";
    case ViolationKind::Frame: return "frame";
    case ViolationKind::Decreases: return "decreases";
  }
  return "?";
}

const Value* RunResult::global(const std::string& name) const {
  for (const auto& [n, v] : globals) {
    if (n == name) return &v;
  }
  return nullptr;
}

namespace {

struct ReturnSignal {
  Value value;
};

// Thrown after a violation has been recorded; unwinds to the top level.
struct ViolationSignal {};

[[noreturn]] void fail(const char* code, const std::string& msg, const SourceSpan& span) {
  throw RuntimeError(code, msg, span);
}

/// Globals in order of creation.
class GlobalStore {
 public:
  const Value* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &values_[it->second].second;
  }
  void set(const std::string& name, Value v) {
    auto it = index_.find(name);
    if (it != index_.end()) {
      values_[it->second].second = std::move(v);
      return;
    }
    index_.emplace(name, values_.size());
    values_.emplace_back(name, std::move(v));
  }
  void erase(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) return;
    values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(it->second));
    index_.clear();
    for (std::size_t i = 0; i < values_.size(); ++i) index_.emplace(values_[i].first, i);
  }
  const Bindings& all() const { return values_; }

 private:
  Bindings values_;
  std::map<std::string, std::size_t> index_;
};

struct Frame {
  const ProcExpr* proc = nullptr;
  std::map<std::string, Value> vars;
  std::map<std::string, Type> declared;  // annotated locals and params
  std::set<std::string> unassigned;      // annotated locals without a value yet
  std::set<std::string> globals;         // names declared `global`
  std::string call;
};

/// Names a formula reads, in order of first occurrence, excluding names
/// bound by quantifiers and folds.
void free_names(const Expr& e, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto add = [&](const std::string& n) {
    for (const auto& b : bound) {
      if (b == n) return;
    }
    for (const auto& o : out) {
      if (o == n) return;
    }
    out.push_back(n);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, NameRef>) {
          add(n.name);
        } else if constexpr (std::is_same_v<T, ListLit>) {
          for (const auto& x : n.elements) free_names(*x, bound, out);
        } else if constexpr (std::is_same_v<T, Index>) {
          free_names(*n.base, bound, out);
          free_names(*n.index, bound, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& x : n.args) free_names(*x, bound, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          free_names(*n.lhs, bound, out);
          free_names(*n.rhs, bound, out);
        } else if constexpr (std::is_same_v<T, Unary>) {
          free_names(*n.operand, bound, out);
        } else if constexpr (std::is_same_v<T, TypeTest>) {
          free_names(*n.subject, bound, out);
        } else if constexpr (std::is_same_v<T, Quantified>) {
          bound.push_back(n.var);
          free_names(*n.body, bound, out);
          bound.pop_back();
        } else if constexpr (std::is_same_v<T, Fold>) {
          if (n.range.lo) free_names(*n.range.lo, bound, out);
          if (n.range.hi) free_names(*n.range.hi, bound, out);
          if (n.range.collection) free_names(*n.range.collection, bound, out);
          bound.push_back(n.range.var);
          free_names(*n.term, bound, out);
          if (n.filter) free_names(*n.filter, bound, out);
          bound.pop_back();
        }
      },
      e.node);
}

const char* value_kind(const Value& v) {
  if (v.is<BigInt>()) return "integer";
  if (v.is<double>()) return "float";
  if (v.is<bool>()) return "boolean";
  if (v.is<Value::Str>()) return "string";
  if (v.is<Value::Sym>()) return "symbol";
  if (v.is<Value::List>()) return "list";
  if (v.is<Value::Tuple>()) return "tuple";
  return "procedure";
}

Value arith(BinaryOp op, const Value& a, const Value& b, const SourceSpan& span) {
  if (!a.is_number() || !b.is_number()) {
    fail("TYPE-ERROR",
         std::string("operator '") + to_string(op) + "' applied to " + value_kind(a) + " and " +
             value_kind(b),
         span);
  }
  if (op == BinaryOp::Div) {
    const double d = to_double(b);
    if (d == 0.0) fail("DIV-BY-ZERO", "division by zero", span);
    return Value::flt(to_double(a) / d);
  }
  if (a.is<BigInt>() && b.is<BigInt>()) {
    const BigInt& x = a.get<BigInt>();
    const BigInt& y = b.get<BigInt>();
    switch (op) {
      case BinaryOp::Add: return Value::integer(x + y);
      case BinaryOp::Sub: return Value::integer(x - y);
      default: return Value::integer(x * y);
    }
  }
  const double x = to_double(a);
  const double y = to_double(b);
  switch (op) {
    case BinaryOp::Add: return Value::flt(x + y);
    case BinaryOp::Sub: return Value::flt(x - y);
    default: return Value::flt(x * y);
  }
}

bool ordered(BinaryOp op, const Value& a, const Value& b, const SourceSpan& span) {
  if (!a.is_number() || !b.is_number()) {
    fail("TYPE-ERROR",
         std::string("cannot order ") + value_kind(a) + " and " + value_kind(b), span);
  }
  auto c = compare_numbers(a, b);
  if (!c) return false;
  switch (op) {
    case BinaryOp::Less: return *c < 0;
    case BinaryOp::LessEq: return *c <= 0;
    case BinaryOp::Greater: return *c > 0;
    default: return *c >= 0;
  }
}

bool as_bool(const Value& v, const SourceSpan& span) {
  if (!v.is<bool>()) fail("TYPE-ERROR", std::string("expected a boolean, got ") + value_kind(v), span);
  return v.get<bool>();
}

const BigInt& as_int(const Value& v, const SourceSpan& span, const char* what) {
  if (!v.is<BigInt>()) {
    fail("TYPE-ERROR", std::string(what) + " must be an integer, got " + value_kind(v), span);
  }
  return v.get<BigInt>();
}

/// Flattens a left- or right-nested `and` chain.
void conjuncts(const Expr& e, std::vector<const Expr*>& out) {
  if (const auto* b = e.as<Binary>(); b && b->op == BinaryOp::And) {
    conjuncts(*b->lhs, out);
    conjuncts(*b->rhs, out);
    return;
  }
  out.push_back(&e);
}

bool mentions(const Expr& e, const std::string& name) {
  std::vector<std::string> bound;
  std::vector<std::string> names;
  free_names(e, bound, names);
  for (const auto& n : names) {
    if (n == name) return true;
  }
  return false;
}

bool is_var(const Expr& e, const std::string& name) {
  const auto* r = e.as<NameRef>();
  return r && r->name == name;
}

/// A bound on a quantified variable: `lo <= v`, `lo < v`, `v <= hi`,
/// `v < hi`, or the mirrored `>`/`>=` forms.
struct Bound {
  bool lower = false;
  bool strict = false;
  const Expr* limit = nullptr;
};

std::optional<Bound> as_bound(const Expr& e, const std::string& v) {
  const auto* b = e.as<Binary>();
  if (!b) return std::nullopt;
  BinaryOp op = b->op;
  const Expr* lhs = b->lhs.get();
  const Expr* rhs = b->rhs.get();
  if (op != BinaryOp::Less && op != BinaryOp::LessEq && op != BinaryOp::Greater &&
      op != BinaryOp::GreaterEq) {
    return std::nullopt;
  }
  // Normalize to `lhs < rhs` / `lhs <= rhs`.
  if (op == BinaryOp::Greater || op == BinaryOp::GreaterEq) {
    std::swap(lhs, rhs);
    op = op == BinaryOp::Greater ? BinaryOp::Less : BinaryOp::LessEq;
  }
  const bool strict = op == BinaryOp::Less;
  if (is_var(*rhs, v) && !mentions(*lhs, v)) return Bound{true, strict, lhs};
  if (is_var(*lhs, v) && !mentions(*rhs, v)) return Bound{false, strict, rhs};
  return std::nullopt;
}

BigInt bound_value(const Value& limit, const Bound& b, const SourceSpan& span) {
  if (limit.is<BigInt>()) {
    const BigInt& x = limit.get<BigInt>();
    if (!b.strict) return x;
    return b.lower ? BigInt(x + 1) : BigInt(x - 1);
  }
  if (!limit.is<double>() || !std::isfinite(limit.get<double>())) {
    fail("UNBOUNDED-QUANTIFIER", "quantifier bound is not a finite number", span);
  }
  const double d = limit.get<double>();
  if (b.lower) {
    const double c = std::ceil(d);
    return BigInt(b.strict && c == d ? c + 1 : c);
  }
  const double f = std::floor(d);
  return BigInt(b.strict && f == d ? f - 1 : f);
}

std::string render_bindings(const Bindings& xs) {
  std::string out;
  for (const auto& [n, v] : xs) {
    if (!out.empty()) out += ", ";
    out += n + " = " + render(v);
  }
  return out;
}

class Interpreter {
 public:
  Interpreter(const Program* program, const RunOptions& opts) : program_(program), opts_(opts) {
    if (opts_.soundness) {
      for (std::size_t i = 0; i < opts_.soundness->size(); ++i) {
        const auto& s = (*opts_.soundness)[i];
        anchors_.emplace(std::make_tuple(s.node, static_cast<int>(s.anchor), s.branch), i);
      }
    }
  }

  RunResult run(const std::optional<EntryCall>& entry) {
    if (opts_.contracts) {
      find_uninterpreted();
      if (!result_.static_errors.empty()) return std::move(result_);
    }
    try {
      for (const auto& s : program_->statements) {
        try {
          exec(*s);
        } catch (const ViolationSignal&) {
          if (!opts_.keep_going) throw;
          // The skipped statement's effects are missing from every later
          // state, which the snapshots do not describe.
          if (opts_.soundness && !result_.soundness_stopped_at) {
            result_.soundness_stopped_at = s->span.line;
          }
        }
      }
      if (entry) run_entry(*entry);
    } catch (const ViolationSignal&) {
    } catch (const RuntimeError& e) {
      result_.error = RuntimeErrorReport{e.code(), e.what(), e.span()};
    } catch (const ReturnSignal&) {
      result_.error = RuntimeErrorReport{"TYPE-ERROR", "return outside a procedure", {}};
    }
    result_.globals = globals_.all();
    return std::move(result_);
  }

  void bind_globals(const Bindings& vars) {
    for (const auto& [n, v] : vars) globals_.set(n, v);
  }

  Value eval(const Expr& e) {
    return std::visit([&](const auto& n) { return eval_node(n, e); }, e.node);
  }

 private:
  // ---- names ----

  std::optional<Value> lookup_opt(const std::string& name, bool strict, const SourceSpan& span) {
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    if (Frame* f = frame()) {
      if (auto it = f->vars.find(name); it != f->vars.end()) return it->second;
      if (f->unassigned.count(name)) {
        if (!strict) return std::nullopt;
        fail("UNASSIGNED-LOCAL", "local '" + name + "' is read before it is assigned", span);
      }
    }
    if (const Value* g = globals_.find(name)) return *g;
    return Value::sym(name);
  }

  Value lookup(const std::string& name, const SourceSpan& span) {
    return *lookup_opt(name, true, span);
  }

  void assign(const std::string& name, Value v) {
    Frame* f = frame();
    if (!f) {
      globals_.set(name, std::move(v));
      return;
    }
    if (f->globals.count(name)) {
      globals_.set(name, std::move(v));
      return;
    }
    if (auto it = f->declared.find(name); it != f->declared.end()) v = coerce(v, it->second);
    f->unassigned.erase(name);
    f->vars[name] = std::move(v);
  }

  Frame* frame() { return frames_.empty() ? nullptr : &frames_.back(); }

  // ---- statements ----

  void exec_block(const Block& b) {
    for (const auto& s : b) exec(*s);
  }

  void exec(const Stmt& s) {
    if (opts_.trace) {
      result_.trace.push_back(std::to_string(s.span.line) + ": " + stmt_kind_name(s));
    }
    std::visit([&](const auto& n) { exec_node(n, s); }, s.node);
    reached(&s, PiSnapshot::Anchor::AfterStatement, 0);
  }

  void exec_node(const Assign& a, const Stmt&) {
    Value v = eval(*a.value);
    if (const auto* r = a.target->as<NameRef>()) {
      assign(r->name, std::move(v));
      return;
    }
    // Indexed update: walk down to the root name, then rebuild the path.
    std::vector<const Index*> path;
    const Expr* cur = a.target.get();
    while (const auto* ix = cur->as<Index>()) {
      path.push_back(ix);
      cur = ix->base.get();
    }
    const auto* root = cur->as<NameRef>();
    if (!root) fail("TYPE-ERROR", "invalid assignment target", a.target->span);
    std::vector<Value> positions;
    for (auto it = path.rbegin(); it != path.rend(); ++it) positions.push_back(eval(*(*it)->index));
    Value whole = lookup(root->name, cur->span);
    Value* slot = &whole;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const Index* ix = path[path.size() - 1 - k];
      slot = &element(*slot, positions[k], ix->index->span);
    }
    *slot = std::move(v);
    assign(root->name, std::move(whole));
  }

  void exec_node(const If& i, const Stmt& s) {
    for (std::size_t k = 0; k < i.branches.size(); ++k) {
      const auto& br = i.branches[k];
      if (as_bool(eval(*br.condition), br.condition->span)) {
        reached(&s, PiSnapshot::Anchor::BranchEntry, k);
        exec_block(br.body);
        return;
      }
    }
    if (i.else_body) {
      reached(&s, PiSnapshot::Anchor::BranchEntry, i.branches.size());
      exec_block(*i.else_body);
    }
  }

  struct SavedVar {
    std::string name;
    std::optional<Value> value;
    bool unassigned = false;
  };

  SavedVar save(const std::string& name) {
    SavedVar s{name, std::nullopt, false};
    Frame* f = frame();
    if (f && !f->globals.count(name)) {
      if (auto it = f->vars.find(name); it != f->vars.end()) s.value = it->second;
      s.unassigned = f->unassigned.count(name) > 0;
    } else if (const Value* g = globals_.find(name)) {
      s.value = *g;
    }
    return s;
  }

  void restore(const SavedVar& s) {
    Frame* f = frame();
    if (s.value) {
      assign(s.name, *s.value);
      if (f && s.unassigned) {
        f->vars.erase(s.name);
        f->unassigned.insert(s.name);
      }
      return;
    }
    if (f && !f->globals.count(s.name)) {
      f->vars.erase(s.name);
      if (s.unassigned) f->unassigned.insert(s.name);
    } else {
      globals_.erase(s.name);
    }
  }

  struct LoopContract {
    const LoopAnnotation* ann = nullptr;
    std::optional<Value> last_measure;
  };

  void loop_head(LoopContract& lc) {
    if (!opts_.contracts || !lc.ann) return;
    if (lc.ann->invariant && !holds(*lc.ann->invariant)) {
      violate(ViolationKind::Invariant, *lc.ann->invariant, {}, "");
    }
    if (lc.ann->decreases) {
      const Expr& m = *lc.ann->decreases;
      Value v = eval(m);
      if (!v.is_number()) fail("TYPE-ERROR", "decreases measure is not numeric", m.span);
      const auto zero = compare_numbers(v, Value::integer(0));
      if (!zero || *zero < 0) {
        violate(ViolationKind::Decreases, m, {}, "measure " + render(v) + " is negative");
      }
      if (lc.last_measure) {
        const auto c = compare_numbers(v, *lc.last_measure);
        if (!c || *c >= 0) {
          violate(ViolationKind::Decreases, m, {},
                  "measure went from " + render(*lc.last_measure) + " to " + render(v));
        }
      }
      lc.last_measure = std::move(v);
    }
  }

  void exec_node(const For& f, const Stmt& s) {
    Value from = f.from ? eval(*f.from) : Value::integer(1);
    Value by = f.by ? eval(*f.by) : Value::integer(1);
    Value to = eval(*f.to);
    for (const Value* v : {&from, &by, &to}) {
      if (!v->is_number()) {
        fail("TYPE-ERROR", std::string("loop bound must be numeric, got ") + value_kind(*v), s.span);
      }
    }
    const auto dir = compare_numbers(by, Value::integer(0));
    if (!dir || *dir == 0) fail("LOOP-STEP-ZERO", "loop step is zero", f.by ? f.by->span : s.span);
    const SavedVar saved = save(f.var);
    LoopContract lc{f.annotation ? &*f.annotation : nullptr, std::nullopt};
    Value cur = from;
    assign(f.var, cur);
    for (;;) {
      loop_head(lc);
      const auto c = compare_numbers(cur, to);
      if (!c || (*dir > 0 ? *c > 0 : *c < 0)) break;
      reached(&s, PiSnapshot::Anchor::LoopBody, 0);
      exec_block(f.body);
      cur = arith(BinaryOp::Add, cur, by, s.span);
      assign(f.var, cur);
    }
    restore(saved);
  }

  void exec_node(const While& w, const Stmt& s) {
    LoopContract lc{w.annotation ? &*w.annotation : nullptr, std::nullopt};
    for (;;) {
      loop_head(lc);
      if (!as_bool(eval(*w.condition), w.condition->span)) break;
      reached(&s, PiSnapshot::Anchor::LoopBody, 0);
      exec_block(w.body);
    }
  }

  void exec_node(const Return& r, const Stmt& s) {
    if (!frame()) fail("TYPE-ERROR", "return outside a procedure", s.span);
    throw ReturnSignal{r.value ? eval(*r.value) : Value::sym("NULL")};
  }

  void exec_node(const ExprStmt& e, const Stmt&) { eval(*e.expr); }

  void exec_node(const LocalDecl& d, const Stmt&) {
    Frame* f = frame();
    for (const auto& entry : d.entries) {
      if (!f) {
        // Tolerated at top level: behaves like an assignment.
        if (entry.init) globals_.set(entry.name, eval(*entry.init));
        continue;
      }
      if (entry.type) f->declared[entry.name] = *entry.type;
      if (entry.init) {
        assign(entry.name, eval(*entry.init));
      } else if (entry.type) {
        f->vars.erase(entry.name);
        f->unassigned.insert(entry.name);
      } else {
        f->vars[entry.name] = Value::sym(entry.name);
      }
    }
  }

  void exec_node(const GlobalDecl& d, const Stmt&) {
    if (Frame* f = frame()) {
      for (const auto& n : d.names) {
        f->globals.insert(n);
        f->vars.erase(n);
        f->unassigned.erase(n);
      }
    }
  }

  void exec_node(const Assert& a, const Stmt&) {
    if (opts_.contracts && !holds(*a.formula)) violate(ViolationKind::Assertion, *a.formula, {}, "");
  }

  void exec_node(const SpecDecl&, const Stmt&) {}

  // ---- expressions ----

  Value eval_node(const IntLit& n, const Expr&) { return Value::integer(BigInt(n.digits)); }
  Value eval_node(const FloatLit& n, const Expr&) { return Value::flt(n.value); }
  Value eval_node(const StringLit& n, const Expr&) { return Value::str(n.value); }
  Value eval_node(const BoolLit& n, const Expr&) { return Value::boolean(n.value); }
  Value eval_node(const NameRef& n, const Expr& e) { return lookup(n.name, e.span); }

  Value eval_node(const ListLit& n, const Expr&) {
    std::vector<Value> xs;
    xs.reserve(n.elements.size());
    for (const auto& x : n.elements) xs.push_back(eval(*x));
    return Value::list(std::move(xs));
  }

  Value& element(Value& base, const Value& pos, const SourceSpan& span) {
    std::vector<Value>* xs = base.items();
    if (!xs) fail("TYPE-ERROR", std::string("cannot index a ") + value_kind(base), span);
    const BigInt& k = as_int(pos, span, "index");
    if (k < 1 || k > BigInt(xs->size())) {
      fail("INDEX-OUT-OF-RANGE",
           "index " + k.str() + " is out of range 1.." + std::to_string(xs->size()), span);
    }
    return (*xs)[static_cast<std::size_t>(k) - 1];
  }

  Value eval_node(const Index& n, const Expr&) {
    Value base = eval(*n.base);
    Value pos = eval(*n.index);
    return element(base, pos, n.index->span);
  }

  Value eval_node(const Call& c, const Expr& e) {
    std::vector<Value> args;
    args.reserve(c.args.size());
    for (const auto& a : c.args) args.push_back(eval(*a));
    if (c.callee == "nops" && !user_proc(c.callee)) {
      if (args.size() != 1) fail("WRONG-ARITY", "nops expects 1 argument", e.span);
      const auto* xs = args[0].items();
      if (!xs) fail("TYPE-ERROR", std::string("nops of a ") + value_kind(args[0]), c.args[0]->span);
      return Value::integer(BigInt(xs->size()));
    }
    Value callee = lookup(c.callee, c.callee_span);
    if (!callee.is<Value::Proc>()) {
      fail("NOT-A-PROC", "'" + c.callee + "' is not a procedure", c.callee_span);
    }
    return call(*callee.get<Value::Proc>().proc, c.callee, std::move(args), e.span);
  }

  bool user_proc(const std::string& name) {
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
      if (it->first == name) return it->second.is<Value::Proc>();
    }
    if (Frame* f = frame()) {
      if (auto it = f->vars.find(name); it != f->vars.end()) return it->second.is<Value::Proc>();
    }
    const Value* g = globals_.find(name);
    return g && g->is<Value::Proc>();
  }

  Value eval_node(const Binary& b, const Expr& e) {
    switch (b.op) {
      case BinaryOp::And:
        if (!as_bool(eval(*b.lhs), b.lhs->span)) return Value::boolean(false);
        return Value::boolean(as_bool(eval(*b.rhs), b.rhs->span));
      case BinaryOp::Or:
        if (as_bool(eval(*b.lhs), b.lhs->span)) return Value::boolean(true);
        return Value::boolean(as_bool(eval(*b.rhs), b.rhs->span));
      case BinaryOp::Implies:
        if (!as_bool(eval(*b.lhs), b.lhs->span)) return Value::boolean(true);
        return Value::boolean(as_bool(eval(*b.rhs), b.rhs->span));
      default:
        break;
    }
    Value l = eval(*b.lhs);
    Value r = eval(*b.rhs);
    switch (b.op) {
      case BinaryOp::Eq: return Value::boolean(values_equal(l, r));
      case BinaryOp::NotEq: return Value::boolean(!values_equal(l, r));
      case BinaryOp::Less:
      case BinaryOp::LessEq:
      case BinaryOp::Greater:
      case BinaryOp::GreaterEq:
        return Value::boolean(ordered(b.op, l, r, e.span));
      default:
        return arith(b.op, l, r, e.span);
    }
  }

  Value eval_node(const Unary& u, const Expr& e) {
    Value v = eval(*u.operand);
    if (u.op == UnaryOp::Not) return Value::boolean(!as_bool(v, u.operand->span));
    if (v.is<BigInt>()) return Value::integer(-v.get<BigInt>());
    if (v.is<double>()) return Value::flt(-v.get<double>());
    fail("TYPE-ERROR", std::string("cannot negate a ") + value_kind(v), e.span);
  }

  Value eval_node(const TypeTest& t, const Expr&) {
    return Value::boolean(conforms(eval(*t.subject), t.tested));
  }

  Value eval_node(const ProcExpr& p, const Expr&) { return Value::proc(&p); }

  Value eval_node(const Quantified& q, const Expr& e) {
    if (!q.var_type.is(TypeKind::Integer)) {
      fail("UNBOUNDED-QUANTIFIER", "only integer quantifiers can be evaluated", q.var_span);
    }
    // forall: `bounds [and guards] implies body`; exists: `bounds and body`.
    std::vector<const Expr*> parts;
    const Expr* body = nullptr;
    if (q.kind == QuantKind::Forall) {
      const auto* b = q.body->as<Binary>();
      if (!b || b->op != BinaryOp::Implies) {
        fail("UNBOUNDED-QUANTIFIER", "forall body must have the form 'bounds implies formula'",
             q.body->span);
      }
      conjuncts(*b->lhs, parts);
      body = b->rhs.get();
    } else {
      conjuncts(*q.body, parts);
    }
    std::optional<Bound> lo;
    std::optional<Bound> hi;
    std::vector<const Expr*> rest;
    for (const Expr* p : parts) {
      auto bd = as_bound(*p, q.var);
      if (bd && bd->lower && !lo) {
        lo = bd;
      } else if (bd && !bd->lower && !hi) {
        hi = bd;
      } else {
        rest.push_back(p);
      }
    }
    if (!lo || !hi) {
      fail("UNBOUNDED-QUANTIFIER",
           "cannot find a lower and an upper bound for '" + q.var + "'", e.span);
    }
    const BigInt first = bound_value(eval(*lo->limit), *lo, lo->limit->span);
    const BigInt last = bound_value(eval(*hi->limit), *hi, hi->limit->span);
    const bool forall = q.kind == QuantKind::Forall;
    for (BigInt i = first; i <= last; ++i) {
      bound_.emplace_back(q.var, Value::integer(i));
      bool selected = true;
      for (const Expr* g : rest) {
        if (!as_bool(eval(*g), g->span)) {
          selected = false;
          break;
        }
      }
      bool witness = false;
      if (forall) {
        witness = selected && !as_bool(eval(*body), body->span);
      } else {
        witness = selected;
      }
      bound_.pop_back();
      if (witness) return Value::boolean(!forall);
    }
    return Value::boolean(forall);
  }

  Value eval_node(const Fold& f, const Expr& e) {
    std::vector<Value> domain;
    if (f.range.kind == Range::Kind::Numeric) {
      const BigInt lo = as_int(eval(*f.range.lo), f.range.lo->span, "range bound");
      const BigInt hi = as_int(eval(*f.range.hi), f.range.hi->span, "range bound");
      for (BigInt i = lo; i <= hi; ++i) domain.push_back(Value::integer(i));
    } else {
      Value coll = eval(*f.range.collection);
      const auto* xs = coll.items();
      if (!xs) {
        fail("TYPE-ERROR", std::string("cannot iterate over a ") + value_kind(coll),
             f.range.collection->span);
      }
      domain = *xs;
    }
    std::vector<Value> terms;
    for (auto& x : domain) {
      bound_.emplace_back(f.range.var, std::move(x));
      const bool keep = !f.filter || as_bool(eval(*f.filter), f.filter->span);
      if (keep) terms.push_back(eval(*f.term));
      bound_.pop_back();
    }
    switch (f.kind) {
      case FoldKind::Seq:
        return Value::list(std::move(terms));
      case FoldKind::Add:
      case FoldKind::Mul: {
        const BinaryOp op = f.kind == FoldKind::Add ? BinaryOp::Add : BinaryOp::Mul;
        Value acc = Value::integer(f.kind == FoldKind::Add ? 0 : 1);
        for (const auto& t : terms) acc = arith(op, acc, t, f.term->span);
        return acc;
      }
      case FoldKind::Min:
      case FoldKind::Max: {
        if (terms.empty()) {
          fail("EMPTY-MIN-MAX", std::string(to_string(f.kind)) + " over an empty range", e.span);
        }
        const BinaryOp better = f.kind == FoldKind::Min ? BinaryOp::Less : BinaryOp::Greater;
        Value acc = terms.front();
        for (std::size_t i = 1; i < terms.size(); ++i) {
          if (ordered(better, terms[i], acc, f.term->span)) acc = terms[i];
        }
        return acc;
      }
    }
    return Value::integer(0);
  }

  // ---- procedures and contracts ----

  Value call(const ProcExpr& p, const std::string& name, std::vector<Value> args,
             const SourceSpan& span) {
    if (frames_.size() >= opts_.max_depth) {
      fail("RECURSION-LIMIT", "call depth exceeds " + std::to_string(opts_.max_depth), span);
    }
    if (args.size() != p.params.size()) {
      fail("WRONG-ARITY",
           "'" + name + "' expects " + std::to_string(p.params.size()) + " argument(s), got " +
               std::to_string(args.size()),
           span);
    }
    Frame f;
    f.proc = &p;
    std::string call_text = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) call_text += ", ";
      call_text += render(args[i]);
    }
    f.call = call_text + ")";
    for (std::size_t i = 0; i < args.size(); ++i) {
      const Param& prm = p.params[i];
      Value v = std::move(args[i]);
      if (prm.annotated) {
        v = coerce(v, prm.type);
        if (!conforms(v, prm.type)) {
          fail("ARG-TYPE",
               "argument " + std::to_string(i + 1) + " of '" + name + "' is " + render(v) +
                   ", expected " + prm.type.str(),
               span);
        }
        f.declared[prm.name] = prm.type;
      }
      f.vars[prm.name] = std::move(v);
    }
    frames_.push_back(std::move(f));
    // Marks locals bound by the bound-variable stack as hidden while the
    // callee runs.
    std::vector<std::pair<std::string, Value>> outer_bound;
    outer_bound.swap(bound_);

    const AnnotationBlock* ann = opts_.contracts && p.annotation ? &*p.annotation : nullptr;
    std::optional<GlobalStore> entry_globals;
    Value result = Value::sym("NULL");
    try {
      reached(&p, PiSnapshot::Anchor::ProcEntry, 0);
      if (ann) {
        entry_globals = globals_;
        if (ann->precondition && !holds(*ann->precondition)) {
          violate(ViolationKind::Precondition, *ann->precondition, {}, "");
        }
      }
      try {
        exec_block(p.body);
      } catch (ReturnSignal& r) {
        result = std::move(r.value);
      }
      if (p.return_annotated) result = coerce(result, p.return_type);
      if (ann) {
        if (ann->postcondition) {
          bound_.emplace_back("RESULT", result);
          const bool ok = holds(*ann->postcondition);
          if (!ok) violate(ViolationKind::Postcondition, *ann->postcondition, result, "");
          bound_.pop_back();
        }
        check_frame(*ann, *entry_globals);
      }
      if (p.return_annotated && !conforms(result, p.return_type)) {
        fail("RETURN-TYPE",
             "'" + name + "' returned " + render(result) + ", expected " + p.return_type.str(),
             span);
      }
    } catch (...) {
      bound_.swap(outer_bound);
      frames_.pop_back();
      throw;
    }
    bound_.swap(outer_bound);
    frames_.pop_back();
    return result;
  }

  void check_frame(const AnnotationBlock& ann, const GlobalStore& before) {
    std::set<std::string> allowed(ann.globals.begin(), ann.globals.end());
    std::vector<std::string> changed;
    for (const auto& [n, v] : globals_.all()) {
      if (allowed.count(n)) continue;
      const Value* old = before.find(n);
      if (!old) {
        changed.push_back(n + " (created as " + render(v) + ")");
      } else if (!values_equal(*old, v)) {
        changed.push_back(n + " (" + render(*old) + " -> " + render(v) + ")");
      }
    }
    if (changed.empty()) return;
    std::string detail = "globals outside the frame changed: ";
    for (std::size_t i = 0; i < changed.size(); ++i) {
      if (i) detail += ", ";
      detail += changed[i];
    }
    ContractViolation cv;
    cv.kind = ViolationKind::Frame;
    cv.clause_span = ann.span;
    cv.call = frame()->call;
    cv.detail = std::move(detail);
    record(std::move(cv));
  }

  bool holds(const Expr& f) { return as_bool(eval(f), f.span); }

  [[noreturn]] void violate(ViolationKind kind, const Expr& clause, std::optional<Value> result,
                            std::string detail) {
    ContractViolation cv;
    cv.kind = kind;
    cv.clause_span = clause.span;
    if (Frame* f = frame()) cv.call = f->call;
    std::vector<std::string> bound;
    std::vector<std::string> names;
    free_names(clause, bound, names);
    Bindings w;
    for (const auto& n : names) {
      if (n == "RESULT" && result) continue;
      if (auto v = lookup_opt(n, false, clause.span)) w.emplace_back(n, std::move(*v));
    }
    if (result) w.emplace_back("RESULT", *result);
    cv.witness = render_bindings(w);
    cv.detail = std::move(detail);
    record(std::move(cv));
  }

  [[noreturn]] void record(ContractViolation cv) {
    result_.violations.push_back(std::move(cv));
    throw ViolationSignal{};
  }

  void run_entry(const EntryCall& entry) {
    const Value* v = globals_.find(entry.name);
    if (!v || !v->is<Value::Proc>()) {
      fail("NOT-A-PROC", "no procedure named '" + entry.name + "'", {});
    }
    const ProcExpr* p = v->get<Value::Proc>().proc;
    result_.entry_result = call(*p, entry.name, entry.args, p->header_span);
  }

  // ---- static screening and soundness ----

  void find_uninterpreted() {
    const SpecSymbols symbols = SpecSymbols::collect(*program_);
    if (symbols.functions.empty()) return;
    auto check = [&](const Expr* f) {
      if (f && uses_uninterpreted(*f, symbols)) {
        result_.static_errors.push_back(make_error(
            "SPEC-UNINTERPRETED", "formula uses an uninterpreted symbol and cannot be checked at runtime",
            f->span));
      }
    };
    walk_block(program_->statements, check);
  }

  template <class F>
  void walk_expr(const Expr& e, F& check) {
    if (const auto* p = e.as<ProcExpr>()) {
      if (p->annotation) {
        check(p->annotation->precondition.get());
        check(p->annotation->postcondition.get());
      }
      walk_block(p->body, check);
    }
  }

  template <class F>
  void walk_block(const Block& b, F& check) {
    for (const auto& s : b) {
      std::visit(
          [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Assign>) {
              walk_expr(*n.value, check);
            } else if constexpr (std::is_same_v<T, ExprStmt>) {
              walk_expr(*n.expr, check);
            } else if constexpr (std::is_same_v<T, If>) {
              for (const auto& br : n.branches) walk_block(br.body, check);
              if (n.else_body) walk_block(*n.else_body, check);
            } else if constexpr (std::is_same_v<T, For> || std::is_same_v<T, While>) {
              if (n.annotation) {
                check(n.annotation->invariant.get());
                check(n.annotation->decreases.get());
              }
              walk_block(n.body, check);
            } else if constexpr (std::is_same_v<T, Assert>) {
              check(n.formula.get());
            } else if constexpr (std::is_same_v<T, LocalDecl>) {
              for (const auto& en : n.entries) {
                if (en.init) walk_expr(*en.init, check);
              }
            } else if constexpr (std::is_same_v<T, Return>) {
              if (n.value) walk_expr(*n.value, check);
            }
          },
          s->node);
    }
  }

  void reached(const void* node, PiSnapshot::Anchor anchor, std::size_t branch) {
    if (!opts_.soundness || result_.soundness_stopped_at) return;
    auto [lo, hi] = anchors_.equal_range(std::make_tuple(node, static_cast<int>(anchor), branch));
    for (auto it = lo; it != hi; ++it) {
      const PiSnapshot& snap = (*opts_.soundness)[it->second];
      ++result_.snapshots_checked;
      for (const auto& [name, type] : snap.entries) {
        auto v = lookup_opt(name, false, {});
        if (!v) continue;
        if (!conforms(*v, type)) {
          result_.soundness_failures.push_back({snap.line, name, type, render(*v)});
        }
      }
    }
  }

  const Program* program_;
  RunOptions opts_;
  RunResult result_;
  GlobalStore globals_;
  std::vector<Frame> frames_;
  Bindings bound_;  // quantifier, fold and RESULT bindings, innermost last
  std::multimap<std::tuple<const void*, int, std::size_t>, std::size_t> anchors_;
};

}  // namespace

RunResult run_program(const Program& program, const RunOptions& options,
                      const std::optional<EntryCall>& entry) {
  Interpreter in(&program, options);
  return in.run(entry);
}

Value eval_expr(const Expr& e, const Bindings& vars) {
  static const Program empty;
  RunOptions opts;
  Interpreter in(&empty, opts);
  in.bind_globals(vars);
  return in.eval(e);
}

Value eval_formula(const Formula& f, const Bindings& vars) { return eval_expr(f, vars); }

Value literal_value(const Expr& e) {
  if (const auto* u = e.as<Unary>(); u && u->op == UnaryOp::Neg) {
    Value v = literal_value(*u->operand);
    if (v.is<BigInt>()) return Value::integer(-v.get<BigInt>());
    if (v.is<double>()) return Value::flt(-v.get<double>());
    throw RuntimeError("TYPE-ERROR", "only numbers can be negated", e.span);
  }
  return eval_expr(e, {});
}

}  // namespace minimaple
