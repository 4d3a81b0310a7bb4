// Single-statement mutants of the annotated product procedure.
#pragma once

#include <string>
#include <vector>

namespace mmtest {

struct Mutant {
  std::string name;
  std::string source;
  bool statically_rejected = false;  // the checker already refuses it
};

inline std::string replace_once(std::string s, const std::string& from, const std::string& to,
                                bool last = false) {
  const auto at = last ? s.rfind(from) : s.find(from);
  if (at == std::string::npos) return {};
  s.replace(at, from.size(), to);
  return s;
}

/// Empty `source` marks a mutation whose target text was not found.
inline std::vector<Mutant> product_mutants(const std::string& annotated) {
  return {
      {"integer product uses +", replace_once(annotated, "si:=si*x", "si:=si+x")},
      {"float product uses +", replace_once(annotated, "sf:=sf*x", "sf:=sf+x")},
      {"status:=-1 dropped", replace_once(annotated, "  status:=-1;\n", "")},
      {"result tuple swapped",
       replace_once(annotated, "return [si,sf];\nend proc;", "return [sf,si];\nend proc;", true),
       true},
  };
}

}  // namespace mmtest
