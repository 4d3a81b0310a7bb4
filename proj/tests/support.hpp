// Helpers shared by the unit tests.
#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "minimaple/parser.hpp"
#include "minimaple/typechecker.hpp"

namespace mmtest {

inline std::string fixture_path(const std::string& name) {
  return std::string(MINIMAPLE_FIXTURES) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses and asserts success; the returned program owns the AST.
inline std::shared_ptr<const minimaple::Program> parse_ok(const std::string& src) {
  auto r = minimaple::parse_program(src);
  std::string msgs;
  for (const auto& d : r.diagnostics) {
    msgs += d.code + " " + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
            " " + d.message + "\n";
  }
  EXPECT_TRUE(r.ok()) << msgs << src;
  return r.program;
}

struct Checked {
  std::shared_ptr<const minimaple::Program> program;
  minimaple::CheckResult result;

  std::vector<std::string> codes() const {
    std::vector<std::string> out;
    for (const auto& d : result.diagnostics) out.push_back(d.code);
    return out;
  }
  bool has(const std::string& code) const {
    const auto c = codes();
    return std::find(c.begin(), c.end(), code) != c.end();
  }
  std::string dump() const {
    std::string out;
    for (const auto& d : result.diagnostics) {
      out += std::string(minimaple::to_string(d.severity)) + " " + d.code + " " +
             std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + " " +
             d.message + "\n";
    }
    return out;
  }
  /// Rendering of the last snapshot recorded on `line`.
  std::string pi_at(int line) const {
    std::string found;
    for (const auto& s : result.snapshots) {
      if (s.line == line) found = s.render();
    }
    return found;
  }
};

inline Checked check(const std::string& src) {
  Checked c;
  c.program = parse_ok(src);
  if (c.program) c.result = minimaple::check_program(*c.program);
  return c;
}

}  // namespace mmtest
