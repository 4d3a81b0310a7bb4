// Flow-sensitive type checking of MiniMaple programs.
//
// The top level is a global context: assignments introduce names and may
// retype them freely. A procedure body is a local context: names exist only
// through parameters and `local`/`global` declarations, and an annotated
// local can only be specialized to subtypes of its declared type. `type(E,T)`
// conditions narrow union-typed variables in the branches they guard.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "minimaple/ast.hpp"
#include "minimaple/source.hpp"
#include "minimaple/types.hpp"

namespace minimaple {

enum class BindingKind {
  Param,
  Local,     // `local` declaration; `declared` is set when annotated
  Global,    // `global` declaration inside a procedure
  TopLevel,  // introduced by assignment in the global context
};

struct Binding {
  std::string name;
  Type type;
  BindingKind kind = BindingKind::TopLevel;
  std::optional<Type> declared;
};

/// The mapping π of variables to their current types at a program point.
class TypeEnv {
 public:
  explicit TypeEnv(bool local_context = false) : local_(local_context) {}

  bool local_context() const { return local_; }
  const Binding* find(const std::string& name) const;
  Binding* find(const std::string& name);
  /// Adds a binding, or replaces the type of an existing one.
  void set(Binding b);
  void set_type(const std::string& name, Type t);
  void erase(const std::string& name);
  const std::vector<Binding>& bindings() const { return bindings_; }

  /// Entries in rendering order: parameters, locals, then globals, each in
  /// declaration order. Top-level bindings keep insertion order.
  std::vector<std::pair<std::string, Type>> entries() const;
  /// `π={name:type, ...}`.
  std::string render() const;

  friend bool operator==(const TypeEnv& a, const TypeEnv& b);

 private:
  bool local_;
  std::vector<Binding> bindings_;
};

/// Pointwise join of two environments at a control-flow merge. A name bound
/// on one side only is taken to be `symbol` (an unassigned name) on the
/// other. An annotated local whose join would leave its declared type keeps
/// the exact union of both sides instead.
TypeEnv merge(const TypeEnv& a, const TypeEnv& b);

/// One recorded π, tied to the syntax node it describes so that the
/// interpreter can compare it against live values at the same point.
struct PiSnapshot {
  enum class Anchor {
    AfterStatement,  // node = Stmt
    ProcEntry,       // node = ProcExpr, after parameter binding
    BranchEntry,     // node = Stmt (If); branch = index, else = branches.size()
    LoopBody,        // node = Stmt (For/While), at the start of every iteration
  };
  Anchor anchor = Anchor::AfterStatement;
  const void* node = nullptr;
  std::size_t branch = 0;
  int line = 0;
  std::vector<std::pair<std::string, Type>> entries;

  /// `π={name:type, ...}`.
  std::string render() const;
};

struct CheckResult {
  Diagnostics diagnostics;
  std::vector<PiSnapshot> snapshots;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Type-checks and spec-checks a parsed program.
CheckResult check_program(const Program& program);

/// Effect of a test `type(v, t)` on a variable of type `u`.
struct NarrowOutcome {
  MaybeType then_type;  // meet(u, t); empty when the test can never hold
  MaybeType else_type;  // subtract(u, t) for unions, otherwise u; empty when always true
  bool always_true = false;
  bool always_false = false;
};

NarrowOutcome narrow_type(const Type& u, const Type& t);

/// Environments for the two outcomes of a condition. A missing environment
/// means that outcome is statically impossible.
struct NarrowResult {
  std::optional<TypeEnv> then_env;
  std::optional<TypeEnv> else_env;
  std::set<std::string> complemented;  // variables whose else type shrank
  Diagnostics diagnostics;
};

/// Narrowing for a branch condition: `type(x,T)` on a plain variable refines
/// x; `not` swaps the outcomes; `and` refines the then-side cumulatively and
/// `or` refines the else-side cumulatively. Other conditions leave both
/// sides equal to `env`.
NarrowResult narrow(const Expr& cond, const TypeEnv& env);

}  // namespace minimaple
