#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <string>

#include "minimaple/interp.hpp"
#include "minimaple/parser.hpp"
#include "minimaple/printer.hpp"
#include "minimaple/report.hpp"
#include "minimaple/typechecker.hpp"
#include "minimaple/types.hpp"
#include "minimaple/value.hpp"

namespace py = pybind11;
namespace mm = minimaple;

namespace {

struct ProgramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Symbol {
  std::string name;
};

struct Procedure {
  std::string signature;
};

struct CheckReport {
  mm::Diagnostics diagnostics;
  std::vector<mm::PiSnapshot> snapshots;
  bool ok() const { return !mm::has_errors(diagnostics); }
};

struct RunReport {
  py::dict globals;
  std::vector<mm::ContractViolation> violations;
  std::optional<mm::RuntimeErrorReport> error;
  mm::Diagnostics static_errors;
  py::object result = py::none();
  std::vector<std::string> trace;
  std::size_t snapshots_checked = 0;
  std::vector<mm::SoundnessFailure> soundness_failures;
  bool ok() const { return violations.empty() && !error && static_errors.empty(); }
};

py::object to_python(const mm::Value& v) {
  using V = mm::Value;
  if (v.is<mm::BigInt>()) {
    const std::string digits = v.get<mm::BigInt>().str();
    return py::reinterpret_steal<py::object>(PyLong_FromString(digits.c_str(), nullptr, 10));
  }
  if (v.is<double>()) return py::float_(v.get<double>());
  if (v.is<bool>()) return py::bool_(v.get<bool>());
  if (v.is<V::Str>()) return py::str(v.get<V::Str>().text);
  if (v.is<V::Sym>()) return py::cast(Symbol{v.get<V::Sym>().name});
  if (v.is<V::Proc>()) return py::cast(Procedure{mm::render(v)});
  py::list items;
  for (const auto& x : *v.items()) items.append(to_python(x));
  if (v.is<V::Tuple>()) return py::tuple(items);
  return std::move(items);
}

mm::Value from_python(const py::handle& h) {
  if (py::isinstance<py::bool_>(h)) return mm::Value::boolean(h.cast<bool>());
  if (py::isinstance<py::int_>(h)) {
    return mm::Value::integer(mm::BigInt(py::str(h).cast<std::string>()));
  }
  if (py::isinstance<py::float_>(h)) return mm::Value::flt(h.cast<double>());
  if (py::isinstance<py::str>(h)) return mm::Value::str(h.cast<std::string>());
  if (py::isinstance<Symbol>(h)) return mm::Value::sym(h.cast<Symbol>().name);
  if (py::isinstance<py::list>(h) || py::isinstance<py::tuple>(h)) {
    std::vector<mm::Value> xs;
    for (const auto& x : h) xs.push_back(from_python(x));
    return py::isinstance<py::tuple>(h) ? mm::Value::tuple(std::move(xs))
                                        : mm::Value::list(std::move(xs));
  }
  throw py::type_error("cannot pass a " + py::type::of(h).attr("__name__").cast<std::string>() +
                       " to a MiniMaple procedure");
}

std::shared_ptr<const mm::Program> parse_or_raise(const std::string& source) {
  auto parsed = mm::parse_program(source);
  if (!parsed.ok()) throw ProgramError(mm::diagnostics_text(parsed.diagnostics));
  return parsed.program;
}

mm::Type type_or_raise(const std::string& text) {
  auto r = mm::parse_type(text);
  if (!r.type) throw py::value_error("malformed type: " + text);
  return *r.type;
}

py::object maybe_type(const mm::MaybeType& t) {
  return t ? py::object(py::str(t->str())) : py::object(py::none());
}

CheckReport check(const std::string& source) {
  CheckReport out;
  auto parsed = mm::parse_program(source);
  out.diagnostics = parsed.diagnostics;
  if (parsed.ok()) {
    auto checked = mm::check_program(*parsed.program);
    out.diagnostics.insert(out.diagnostics.end(), checked.diagnostics.begin(),
                           checked.diagnostics.end());
    out.snapshots = std::move(checked.snapshots);
  }
  return out;
}

RunReport run(const std::string& source, const std::optional<std::string>& entry,
              const py::iterable& args, bool contracts, bool keep_going, bool trace, bool force,
              bool soundness) {
  auto program = parse_or_raise(source);
  auto checked = mm::check_program(*program);
  if (!checked.ok() && !force) throw ProgramError(mm::diagnostics_text(checked.diagnostics));

  std::optional<mm::EntryCall> call;
  if (entry) {
    call = mm::EntryCall{*entry, {}};
    for (const auto& a : args) call->args.push_back(from_python(a));
  }
  mm::RunOptions opts;
  opts.contracts = contracts;
  opts.keep_going = keep_going;
  opts.trace = trace;
  if (soundness) opts.soundness = &checked.snapshots;

  mm::RunResult r;
  {
    py::gil_scoped_release release;
    r = mm::run_program(*program, opts, call);
  }
  // Procedure values point into `program`, so convert before it goes.
  RunReport out;
  for (const auto& [name, value] : r.globals) out.globals[py::str(name)] = to_python(value);
  if (r.entry_result) out.result = to_python(*r.entry_result);
  out.violations = std::move(r.violations);
  out.error = std::move(r.error);
  out.static_errors = std::move(r.static_errors);
  out.trace = std::move(r.trace);
  out.snapshots_checked = r.snapshots_checked;
  out.soundness_failures = std::move(r.soundness_failures);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Type checking, specification checking and contract-checked execution of MiniMaple.";

  py::register_exception<ProgramError>(m, "ProgramError", PyExc_ValueError);

  py::class_<Symbol>(m, "Symbol")
      .def(py::init<std::string>(), py::arg("name"))
      .def_readonly("name", &Symbol::name)
      .def("__eq__", [](const Symbol& a, const Symbol& b) { return a.name == b.name; })
      .def("__hash__", [](const Symbol& s) { return py::hash(py::str(s.name)); })
      .def("__repr__", [](const Symbol& s) { return "Symbol('" + s.name + "')"; });

  py::class_<Procedure>(m, "Procedure")
      .def_readonly("signature", &Procedure::signature)
      .def("__repr__", [](const Procedure& p) { return "<Procedure " + p.signature + ">"; });

  py::class_<mm::Diagnostic>(m, "Diagnostic")
      .def_property_readonly("severity",
                             [](const mm::Diagnostic& d) { return std::string(mm::to_string(d.severity)); })
      .def_readonly("code", &mm::Diagnostic::code)
      .def_readonly("message", &mm::Diagnostic::message)
      .def_property_readonly("line", [](const mm::Diagnostic& d) { return d.span.line; })
      .def_property_readonly("column", [](const mm::Diagnostic& d) { return d.span.column; })
      .def("__repr__", [](const mm::Diagnostic& d) {
        return "<Diagnostic " + d.code + " " + std::to_string(d.span.line) + ":" +
               std::to_string(d.span.column) + ">";
      });

  py::class_<mm::PiSnapshot>(m, "Snapshot")
      .def_readonly("line", &mm::PiSnapshot::line)
      .def_property_readonly("entries",
                             [](const mm::PiSnapshot& s) {
                               std::vector<std::pair<std::string, std::string>> out;
                               for (const auto& [n, t] : s.entries) out.emplace_back(n, t.str());
                               return out;
                             })
      .def("__str__", &mm::PiSnapshot::render)
      .def("__repr__", [](const mm::PiSnapshot& s) {
        return "<Snapshot " + std::to_string(s.line) + ": " + s.render() + ">";
      });

  py::class_<CheckReport>(m, "CheckReport")
      .def_readonly("diagnostics", &CheckReport::diagnostics)
      .def_readonly("snapshots", &CheckReport::snapshots)
      .def_property_readonly("ok", &CheckReport::ok)
      .def("dump_pi", [](const CheckReport& r) { return mm::snapshots_text(r.snapshots); })
      .def("to_json", [](const CheckReport& r, const std::string& file) {
        return mm::diagnostics_json(file, r.diagnostics, &r.snapshots);
      }, py::arg("file") = "<string>");

  py::class_<mm::ContractViolation>(m, "ContractViolation")
      .def_property_readonly("kind",
                             [](const mm::ContractViolation& v) { return std::string(mm::to_string(v.kind)); })
      .def_property_readonly("line", [](const mm::ContractViolation& v) { return v.clause_span.line; })
      .def_readonly("call", &mm::ContractViolation::call)
      .def_readonly("witness", &mm::ContractViolation::witness)
      .def_readonly("detail", &mm::ContractViolation::detail)
      .def("__str__", &mm::violation_text);

  py::class_<mm::RuntimeErrorReport>(m, "RuntimeErrorReport")
      .def_readonly("code", &mm::RuntimeErrorReport::code)
      .def_readonly("message", &mm::RuntimeErrorReport::message)
      .def_property_readonly("line", [](const mm::RuntimeErrorReport& e) { return e.span.line; });

  py::class_<mm::SoundnessFailure>(m, "SoundnessFailure")
      .def_readonly("line", &mm::SoundnessFailure::line)
      .def_readonly("name", &mm::SoundnessFailure::name)
      .def_property_readonly("expected", [](const mm::SoundnessFailure& f) { return f.expected.str(); })
      .def_readonly("value", &mm::SoundnessFailure::value);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("globals", &RunReport::globals)
      .def_readonly("violations", &RunReport::violations)
      .def_readonly("error", &RunReport::error)
      .def_readonly("static_errors", &RunReport::static_errors)
      .def_readonly("result", &RunReport::result)
      .def_readonly("trace", &RunReport::trace)
      .def_readonly("snapshots_checked", &RunReport::snapshots_checked)
      .def_readonly("soundness_failures", &RunReport::soundness_failures)
      .def_property_readonly("ok", &RunReport::ok);

  m.def("check", &check, py::arg("source"),
        "Parse and type-check a program, including its annotations.");
  m.def("run", &run, py::arg("source"), py::arg("entry") = py::none(),
        py::arg("args") = py::tuple(), py::kw_only(), py::arg("contracts") = true,
        py::arg("keep_going") = false, py::arg("trace") = false, py::arg("force") = false,
        py::arg("soundness") = false,
        "Run the top level, then `entry(*args)` when given. Raises ProgramError if the\n"
        "program does not check, unless force=True.");
  m.def("format_source", [](const std::string& source) {
    return mm::print_program(*parse_or_raise(source));
  }, py::arg("source"), "Pretty-print a program.");
  m.def("syntax_tree", [](const std::string& source) {
    return mm::dump_sexpr(*parse_or_raise(source));
  }, py::arg("source"), "S-expression dump of the parsed program.");

  m.def("normalize", [](const std::string& t) { return mm::normalize(type_or_raise(t)).str(); },
        py::arg("type"));
  m.def("is_subtype", [](const std::string& s, const std::string& t) {
    return mm::is_subtype(type_or_raise(s), type_or_raise(t));
  }, py::arg("s"), py::arg("t"));
  m.def("lub", [](const std::string& s, const std::string& t) {
    return mm::lub(type_or_raise(s), type_or_raise(t)).str();
  }, py::arg("s"), py::arg("t"));
  m.def("meet", [](const std::string& u, const std::string& t) {
    return maybe_type(mm::meet(type_or_raise(u), type_or_raise(t)));
  }, py::arg("u"), py::arg("t"));
  m.def("subtract", [](const std::string& u, const std::string& t) {
    return maybe_type(mm::subtract(type_or_raise(u), type_or_raise(t)));
  }, py::arg("u"), py::arg("t"));
}
