// Matching `# π={...}` comments in a source file against recorded snapshots.
//
// A comment on line N describes the last snapshot recorded before it, i.e.
// the snapshot with the greatest line < N. Inside the braces `...` stands for
// any run of entries; every other entry must appear verbatim and in order.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "minimaple/typechecker.hpp"

namespace mmtest {

struct PiComment {
  int line = 0;
  std::vector<std::string> pattern;  // entries, "..." for wildcards
  std::string text;
};

inline std::vector<std::string> split_entries(const std::string& body) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  auto flush = [&] {
    const auto b = cur.find_first_not_of(' ');
    const auto e = cur.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    cur.clear();
  };
  for (char c : body) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == ',' && depth == 0) {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

inline std::vector<PiComment> pi_comments(const std::string& source) {
  static const std::string kOpen = "# π={";
  std::vector<PiComment> out;
  std::istringstream in(source);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto at = line.find(kOpen);
    if (at == std::string::npos) continue;
    const auto close = line.rfind('}');
    PiComment c;
    c.line = n;
    c.text = line.substr(at + 2, close - at - 1);
    c.pattern = split_entries(line.substr(at + kOpen.size(), close - at - kOpen.size()));
    out.push_back(std::move(c));
  }
  return out;
}

inline bool glob_match(const std::vector<std::string>& pat, std::size_t i,
                       const std::vector<std::string>& xs, std::size_t j) {
  if (i == pat.size()) return j == xs.size();
  if (pat[i] == "...") {
    for (std::size_t k = j; k <= xs.size(); ++k) {
      if (glob_match(pat, i + 1, xs, k)) return true;
    }
    return false;
  }
  return j < xs.size() && pat[i] == xs[j] && glob_match(pat, i + 1, xs, j + 1);
}

/// The snapshot a comment on `line` describes, or null.
inline const minimaple::PiSnapshot* snapshot_before(
    const std::vector<minimaple::PiSnapshot>& snaps, int line) {
  const minimaple::PiSnapshot* best = nullptr;
  for (const auto& s : snaps) {
    if (s.line < line && (!best || s.line >= best->line)) best = &s;
  }
  return best;
}

inline std::vector<std::string> entry_strings(const minimaple::PiSnapshot& s) {
  std::vector<std::string> out;
  for (const auto& [n, t] : s.entries) out.push_back(n + ":" + t.str());
  return out;
}

/// Empty when the comment matches; otherwise a description of the mismatch.
inline std::string match_comment(const PiComment& c,
                                 const std::vector<minimaple::PiSnapshot>& snaps) {
  const auto* s = snapshot_before(snaps, c.line);
  if (!s) return "no snapshot precedes line " + std::to_string(c.line);
  if (glob_match(c.pattern, 0, entry_strings(*s), 0)) return "";
  return "line " + std::to_string(c.line) + ": expected " + c.text + ", got " + s->render();
}

}  // namespace mmtest
