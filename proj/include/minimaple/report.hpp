// Text and JSON renderings of diagnostics, π snapshots and run results.
#pragma once

#include <string>
#include <vector>

#include "minimaple/interp.hpp"
#include "minimaple/source.hpp"
#include "minimaple/typechecker.hpp"

namespace minimaple {

/// `error TYPE-OPERAND 4:7 message`, one per line.
std::string diagnostics_text(const Diagnostics& diags);

/// `{"file": ..., "diagnostics": [...]}`, plus `"snapshots"` when
/// `snapshots` is non-null.
std::string diagnostics_json(const std::string& file, const Diagnostics& diags,
                             const std::vector<PiSnapshot>* snapshots = nullptr);

/// `<line>: π={name:type, ...}`, one per line.
std::string snapshots_text(const std::vector<PiSnapshot>& snapshots);

std::string violation_text(const ContractViolation& v);

/// Violations, runtime error and result of a run as a JSON document.
std::string run_json(const std::string& file, const RunResult& r);

}  // namespace minimaple
