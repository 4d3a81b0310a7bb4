#include "minimaple/report.hpp"

#include <nlohmann/json.hpp>

namespace minimaple {

using nlohmann::ordered_json;

std::string diagnostics_text(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) {
    out += std::string(to_string(d.severity)) + ' ' + d.code + ' ' + std::to_string(d.span.line) +
           ':' + std::to_string(d.span.column) + ' ' + d.message + '\n';
  }
  return out;
}

std::string diagnostics_json(const std::string& file, const Diagnostics& diags,
                             const std::vector<PiSnapshot>* snapshots) {
  ordered_json doc;
  doc["file"] = file;
  doc["diagnostics"] = ordered_json::array();
  for (const auto& d : diags) {
    doc["diagnostics"].push_back({{"severity", to_string(d.severity)},
                                  {"code", d.code},
                                  {"line", d.span.line},
                                  {"column", d.span.column},
                                  {"message", d.message}});
  }
  if (snapshots) {
    doc["snapshots"] = ordered_json::array();
    for (const auto& s : *snapshots) {
      ordered_json env = ordered_json::object();
      for (const auto& [n, t] : s.entries) env[n] = t.str();
      doc["snapshots"].push_back({{"line", s.line}, {"env", env}});
    }
  }
  return doc.dump(2) + '\n';
}

std::string snapshots_text(const std::vector<PiSnapshot>& snapshots) {
  std::string out;
  for (const auto& s : snapshots) out += std::to_string(s.line) + ": " + s.render() + '\n';
  return out;
}

std::string violation_text(const ContractViolation& v) {
  std::string out = std::string(to_string(v.kind)) + " violation at line " +
                    std::to_string(v.clause_span.line);
  if (!v.call.empty()) out += " in " + v.call;
  if (!v.detail.empty()) out += ": " + v.detail;
  if (!v.witness.empty()) out += "\n  with " + v.witness;
  return out;
}

std::string run_json(const std::string& file, const RunResult& r) {
  ordered_json doc;
  doc["file"] = file;
  doc["violations"] = ordered_json::array();
  for (const auto& v : r.violations) {
    doc["violations"].push_back({{"kind", to_string(v.kind)},
                                 {"clause_line", v.clause_span.line},
                                 {"clause_column", v.clause_span.column},
                                 {"call", v.call},
                                 {"witness", v.witness},
                                 {"detail", v.detail}});
  }
  if (r.error) {
    doc["error"] = {{"code", r.error->code},
                    {"message", r.error->message},
                    {"line", r.error->span.line},
                    {"column", r.error->span.column}};
  } else {
    doc["error"] = nullptr;
  }
  if (r.entry_result) {
    doc["result"] = render(*r.entry_result);
  } else {
    doc["result"] = nullptr;
  }
  ordered_json globals = ordered_json::object();
  for (const auto& [n, v] : r.globals) globals[n] = render(v);
  doc["globals"] = globals;
  return doc.dump(2) + '\n';
}

}  // namespace minimaple
