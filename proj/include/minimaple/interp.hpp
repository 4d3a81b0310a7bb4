// Tree-walking evaluation of MiniMaple programs with runtime contract
// checking.
//
// Procedure values refer into the Program they came from, so a RunResult
// holding them must not outlive that Program.
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "minimaple/ast.hpp"
#include "minimaple/source.hpp"
#include "minimaple/typechecker.hpp"
#include "minimaple/value.hpp"

namespace minimaple {

/// Runtime failure outside the contract language: `INDEX-OUT-OF-RANGE`,
/// `DIV-BY-ZERO`, `UNBOUNDED-QUANTIFIER`, `EMPTY-MIN-MAX`, `WRONG-ARITY`,
/// `ARG-TYPE`, `RETURN-TYPE`, `RECURSION-LIMIT`, `UNASSIGNED-LOCAL`,
/// `NOT-A-PROC`, `LOOP-STEP-ZERO`, `TYPE-ERROR`.
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(std::string code, const std::string& message, SourceSpan span)
      : std::runtime_error(message), code_(std::move(code)), span_(span) {}

  const std::string& code() const { return code_; }
  const SourceSpan& span() const { return span_; }

 private:
  std::string code_;
  SourceSpan span_;
};

enum class ViolationKind { Precondition, Postcondition, Invariant, Assertion, Frame, Decreases };

const char* to_string(ViolationKind k);

struct ContractViolation {
  ViolationKind kind = ViolationKind::Assertion;
  SourceSpan clause_span;
  std::string call;     // `prod([2, 0, 3.0])`, or empty outside a procedure
  std::string witness;  // `status = 2, RESULT = [2, 1.0]`
  std::string detail;   // extra explanation for frame and decreases failures
};

struct RuntimeErrorReport {
  std::string code;
  std::string message;
  SourceSpan span;
};

/// A π entry that the live value did not inhabit.
struct SoundnessFailure {
  int line = 0;
  std::string name;
  Type expected;
  std::string value;
};

struct EntryCall {
  std::string name;
  std::vector<Value> args;
};

struct RunOptions {
  bool contracts = true;
  bool trace = false;
  /// Record a violation and continue with the next top-level statement.
  bool keep_going = false;
  std::size_t max_depth = 1000;
  /// When set, every snapshot reached during execution is checked against
  /// the live values.
  const std::vector<PiSnapshot>* soundness = nullptr;
};

struct RunResult {
  std::vector<std::pair<std::string, Value>> globals;  // in order of creation
  std::vector<ContractViolation> violations;
  std::optional<RuntimeErrorReport> error;
  Diagnostics static_errors;  // SPEC-UNINTERPRETED, found before running
  std::vector<std::string> trace;
  std::optional<Value> entry_result;
  std::vector<SoundnessFailure> soundness_failures;
  std::size_t snapshots_checked = 0;
  /// Line of the statement after which keep_going recovery ended the
  /// soundness check.
  std::optional<int> soundness_stopped_at;

  bool ok() const { return violations.empty() && !error && static_errors.empty(); }
  const Value* global(const std::string& name) const;
};

/// Runs the top-level statements, then `entry` when given.
RunResult run_program(const Program& program, const RunOptions& options,
                      const std::optional<EntryCall>& entry = std::nullopt);

using Bindings = std::vector<std::pair<std::string, Value>>;

/// Evaluates a program expression with `vars` as the global environment.
/// Throws RuntimeError.
Value eval_expr(const Expr& e, const Bindings& vars);

/// Evaluates a specification formula or term. Throws RuntimeError.
Value eval_formula(const Formula& f, const Bindings& vars);

/// Converts a parsed literal (see parse_literal_list) into a value.
Value literal_value(const Expr& e);

}  // namespace minimaple
