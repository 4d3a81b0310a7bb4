// Source positions and diagnostics shared by every front-end stage.
#pragma once

#include <compare>
#include <string>
#include <vector>

namespace minimaple {

/// A region of source text. Lines and columns are 1-based; the end position
/// is exclusive (one past the last character).
struct SourceSpan {
  int line = 1;
  int column = 1;
  int end_line = 1;
  int end_column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;

  /// Smallest span covering both `a` and `b`.
  static SourceSpan cover(const SourceSpan& a, const SourceSpan& b);

  bool contains(const SourceSpan& inner) const;
};

enum class Severity { Error, Warning };

const char* to_string(Severity s);

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

inline Diagnostic make_error(std::string code, std::string message, SourceSpan span) {
  return {Severity::Error, std::move(code), std::move(message), span};
}

inline Diagnostic make_warning(std::string code, std::string message, SourceSpan span) {
  return {Severity::Warning, std::move(code), std::move(message), span};
}

}  // namespace minimaple
