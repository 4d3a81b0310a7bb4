// Well-formedness and typing of specification annotations.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minimaple/ast.hpp"
#include "minimaple/source.hpp"
#include "minimaple/types.hpp"

namespace minimaple {

/// Uninterpreted functions and predicates declared by `(*@ func ...; @*)`
/// and `(*@ pred ...; @*)`.
struct SpecSymbols {
  struct Signature {
    std::vector<Type> params;
    Type result;
    bool predicate = false;
  };
  std::map<std::string, Signature> functions;

  static SpecSymbols collect(const Program& program);
};

enum class ClauseKind { Requires, Ensures, Invariant, Decreases, Assert };

const char* to_string(ClauseKind k);

struct SpecContext {
  ClauseKind kind = ClauseKind::Assert;
  std::vector<std::pair<std::string, Type>> scope;
  std::optional<Type> result_type;  // bound as RESULT in ensures clauses
  const SpecSymbols* symbols = nullptr;
};

struct FormulaResult {
  MaybeType type;  // empty when the formula is ill-typed
  Diagnostics diagnostics;
};

/// Types a formula or specification term under `ctx`.
FormulaResult typecheck_formula(const Formula& f, const SpecContext& ctx);

/// Types a clause formula and requires it to be boolean (numeric for
/// `decreases`).
Diagnostics check_clause(const Formula& f, const SpecContext& ctx);

/// Checks a procedure's annotation block: clause formulas, RESULT placement,
/// and the `global` modifies-frame against the body.
Diagnostics check_annotation(const ProcExpr& proc, const SpecSymbols& symbols);

/// True when the formula mentions an uninterpreted function, predicate, or
/// abstract type.
bool uses_uninterpreted(const Formula& f, const SpecSymbols& symbols);

}  // namespace minimaple
