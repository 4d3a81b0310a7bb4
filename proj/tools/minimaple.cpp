// minimaple: check and run MiniMaple programs.
//
//   minimaple check FILE [--format text|json] [--dump-pi]
//   minimaple run FILE [--contracts on|off] [--entry NAME --args LIST]
//                      [--trace] [--keep-going] [--force] [--globals]
//
// Exit status: 0 success, 1 errors/violations, 2 usage or I/O failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "minimaple/interp.hpp"
#include "minimaple/parser.hpp"
#include "minimaple/report.hpp"
#include "minimaple/typechecker.hpp"

namespace mm = minimaple;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct CliConfig {
  std::string input_path;
  std::string format = "text";
  bool dump_pi = false;
  std::string contracts = "on";
  std::string entry;
  std::string args;
  bool trace = false;
  bool keep_going = false;
  bool force = false;
  bool globals = false;
  bool soundness = false;
};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int cmd_check(const CliConfig& cfg) {
  std::string source;
  if (!read_file(cfg.input_path, source)) {
    std::cerr << "minimaple: cannot read '" << cfg.input_path << "'\n";
    return kUsage;
  }
  auto parsed = mm::parse_program(source);
  mm::Diagnostics diags = parsed.diagnostics;
  std::vector<mm::PiSnapshot> snapshots;
  if (parsed.ok()) {
    auto checked = mm::check_program(*parsed.program);
    diags.insert(diags.end(), checked.diagnostics.begin(), checked.diagnostics.end());
    snapshots = std::move(checked.snapshots);
  }
  if (cfg.format == "json") {
    std::cout << mm::diagnostics_json(cfg.input_path, diags, cfg.dump_pi ? &snapshots : nullptr);
  } else {
    if (cfg.dump_pi) std::cout << mm::snapshots_text(snapshots);
    std::cout << mm::diagnostics_text(diags);
  }
  return mm::has_errors(diags) ? kFailed : kOk;
}

int cmd_run(const CliConfig& cfg) {
  std::string source;
  if (!read_file(cfg.input_path, source)) {
    std::cerr << "minimaple: cannot read '" << cfg.input_path << "'\n";
    return kUsage;
  }

  std::optional<mm::EntryCall> entry;
  if (!cfg.entry.empty()) {
    auto lits = mm::parse_literal_list(cfg.args);
    if (mm::has_errors(lits.diagnostics)) {
      std::cerr << "minimaple: malformed --args:\n" << mm::diagnostics_text(lits.diagnostics);
      return kUsage;
    }
    entry = mm::EntryCall{cfg.entry, {}};
    for (const auto& e : lits.exprs) entry->args.push_back(mm::literal_value(*e));
  } else if (!cfg.args.empty()) {
    std::cerr << "minimaple: --args requires --entry\n";
    return kUsage;
  }

  auto parsed = mm::parse_program(source);
  if (!parsed.ok()) {
    std::cerr << mm::diagnostics_text(parsed.diagnostics);
    return kFailed;
  }
  auto checked = mm::check_program(*parsed.program);
  if (!checked.ok() && !cfg.force) {
    std::cerr << mm::diagnostics_text(checked.diagnostics);
    std::cerr << "minimaple: program has errors; use --force to run anyway\n";
    return kFailed;
  }

  mm::RunOptions opts;
  opts.contracts = cfg.contracts == "on";
  opts.trace = cfg.trace;
  opts.keep_going = cfg.keep_going;
  if (cfg.soundness) opts.soundness = &checked.snapshots;
  auto result = mm::run_program(*parsed.program, opts, entry);

  if (cfg.format == "json") {
    std::cout << mm::run_json(cfg.input_path, result);
    return result.ok() && result.soundness_failures.empty() ? kOk : kFailed;
  }
  for (const auto& line : result.trace) std::cout << line << '\n';
  if (!result.static_errors.empty()) std::cerr << mm::diagnostics_text(result.static_errors);
  for (const auto& v : result.violations) std::cerr << mm::violation_text(v) << '\n';
  if (result.error) {
    std::cerr << "runtime error " << result.error->code << ' ' << result.error->span.line << ':'
              << result.error->span.column << ' ' << result.error->message << '\n';
  }
  if (result.entry_result) std::cout << mm::render(*result.entry_result) << '\n';
  if (!entry || cfg.globals) {
    for (const auto& [n, v] : result.globals) std::cout << n << " = " << mm::render(v) << '\n';
  }
  if (cfg.soundness) {
    for (const auto& f : result.soundness_failures) {
      std::cerr << "unsound " << f.line << ": " << f.name << " = " << f.value << " is not "
                << f.expected.str() << '\n';
    }
    std::cerr << result.snapshots_checked << " snapshot(s) checked, "
              << result.soundness_failures.size() << " failure(s)";
    if (result.soundness_stopped_at) {
      std::cerr << "; stopped after the statement on line " << *result.soundness_stopped_at;
    }
    std::cerr << '\n';
  }
  return result.ok() && result.soundness_failures.empty() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MiniMaple type checker and contract-checking interpreter", "minimaple"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto* check = app.add_subcommand("check", "Parse, type-check and spec-check a program");
  check->add_option("file", cfg.input_path, "Source file")->required();
  check->add_option("--format", cfg.format, "Diagnostic format")
      ->check(CLI::IsMember({"text", "json"}));
  check->add_flag("--dump-pi", cfg.dump_pi, "Print the type environment at annotated points");

  auto* run = app.add_subcommand("run", "Execute a program with runtime contract checks");
  run->add_option("file", cfg.input_path, "Source file")->required();
  run->add_option("--contracts", cfg.contracts, "Check contracts at runtime")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_option("--entry", cfg.entry, "Procedure to call after the top level");
  run->add_option("--args", cfg.args, "Literal arguments for --entry, e.g. '[1, 2.5]'");
  run->add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  run->add_flag("--trace", cfg.trace, "Print one line per executed statement");
  run->add_flag("--keep-going", cfg.keep_going, "Continue after a contract violation");
  run->add_flag("--force", cfg.force, "Run even if the program has type errors");
  run->add_flag("--globals", cfg.globals, "Print the final global environment");
  run->add_flag("--soundness", cfg.soundness,
                "Check live values against the type environments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(cfg);
    return cmd_run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "minimaple: " << e.what() << '\n';
    return kUsage;
  }
}
