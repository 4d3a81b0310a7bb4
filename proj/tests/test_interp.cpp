// Evaluation, runtime contracts, quantifier folds, and agreement between
// the static snapshots and live values.

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>

#include "minimaple/interp.hpp"
#include "minimaple/parser.hpp"
#include "mutants.hpp"
#include "support.hpp"

using namespace minimaple;
using mmtest::check;
using mmtest::read_fixture;

namespace {

struct Parsed {
  std::shared_ptr<const Program> program;
  const Expr* expr = nullptr;
};

Parsed expression(const std::string& text) {
  Parsed p{mmtest::parse_ok("x := " + text + ";"), nullptr};
  if (p.program) p.expr = p.program->statements[0]->as<Assign>()->value.get();
  return p;
}

Parsed formula(const std::string& text) {
  Parsed p{mmtest::parse_ok("f := proc()\n  (*@ assert " + text + "; @*)\n  return 0;\nend proc;\n"),
           nullptr};
  if (p.program) {
    const auto& body = p.program->statements[0]->as<Assign>()->value->as<ProcExpr>()->body;
    p.expr = body[0]->as<Assert>()->formula.get();
  }
  return p;
}

std::string eval(const std::string& text, const Bindings& vars = {}) {
  Parsed p = expression(text);
  return render(eval_expr(*p.expr, vars));
}

std::string eval_error(const std::string& text, const Bindings& vars = {}) {
  Parsed p = expression(text);
  try {
    eval_expr(*p.expr, vars);
  } catch (const RuntimeError& e) {
    return e.code();
  }
  return "no error";
}

Value spec(const std::string& text, const Bindings& vars) {
  Parsed p = formula(text);
  return eval_formula(*p.expr, vars);
}

struct Ran {
  std::shared_ptr<const Program> program;
  RunResult result;

  std::string global(const std::string& name) const {
    const Value* v = result.global(name);
    return v ? render(*v) : "<unbound>";
  }
  std::vector<ViolationKind> kinds() const {
    std::vector<ViolationKind> out;
    for (const auto& v : result.violations) out.push_back(v.kind);
    return out;
  }
  std::string error() const { return result.error ? result.error->code : ""; }
};

Ran run(const std::string& src, RunOptions opts = {}, std::optional<EntryCall> entry = std::nullopt) {
  Ran r{mmtest::parse_ok(src), {}};
  if (r.program) r.result = run_program(*r.program, opts, entry);
  return r;
}

Value num(long v) { return Value::integer(BigInt(v)); }

// ---- an independent model of the product procedure ----
struct ProductOutcome {
  BigInt si = 1;
  double sf = 1.0;
  long status = 0;
};

ProductOutcome product_model(const std::vector<Value>& l, long status_before) {
  ProductOutcome o;
  o.status = status_before;
  for (std::size_t i = 0; i < l.size(); ++i) {
    o.status = static_cast<long>(i) + 1;
    if (l[i].is<BigInt>()) {
      if (l[i].get<BigInt>() == 0) return o;
      o.si *= l[i].get<BigInt>();
    } else {
      if (l[i].get<double>() < 0.5) return o;
      o.sf *= l[i].get<double>();
    }
  }
  o.status = -1;
  return o;
}

std::vector<Value> random_mixed_list(std::mt19937& rng) {
  std::uniform_int_distribution<int> len(0, 8);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> small(-2, 12);
  std::uniform_real_distribution<double> real(0.0, 20.0);
  std::vector<Value> out;
  for (int n = len(rng); n > 0; --n) {
    if (coin(rng)) {
      out.push_back(num(small(rng)));
    } else {
      out.push_back(Value::flt(std::round(real(rng) * 100) / 100));
    }
  }
  return out;
}

}  // namespace

// ---- expressions ----

TEST(Eval, Arithmetic) {
  EXPECT_EQ(eval("1 + 2 * 3"), "7");
  EXPECT_EQ(eval("7 / 2"), "3.5");
  EXPECT_EQ(eval("4 / 2"), "2.0");
  EXPECT_EQ(eval("2 * 1.5"), "3.0");
  EXPECT_EQ(eval("-3 - 4"), "-7");
  EXPECT_EQ(eval("4294967296 * 4294967296 * 4294967296"), "79228162514264337593543950336");
}

TEST(Eval, ComparisonsAcrossNumericKinds) {
  EXPECT_EQ(eval("1 = 1.0"), "true");
  EXPECT_EQ(eval("1 <> 1.0"), "false");
  EXPECT_EQ(eval("3 < 3.5"), "true");
  // 2^53 + 1 is not representable as a double, so a lossy comparison
  // would call these equal.
  EXPECT_EQ(eval("9007199254740993 = 9007199254740992.0"), "false");
  EXPECT_EQ(eval("9007199254740993 > 9007199254740992.0"), "true");
}

TEST(Eval, ListsAndIndexing) {
  EXPECT_EQ(eval("[1, 2.5, \"s\"][2]"), "2.5");
  EXPECT_EQ(eval("nops([1, 2, 3])"), "3");
  EXPECT_EQ(eval("l[1]", {{"l", Value::list({num(4), num(5)})}}), "4");
  EXPECT_EQ(eval("[[1, 2], [3]][1][2]"), "2");
}

TEST(Eval, TypeTests) {
  EXPECT_EQ(eval("type(1, integer)"), "true");
  EXPECT_EQ(eval("type(1, float)"), "false");
  EXPECT_EQ(eval("type(1.0, Or(integer,float))"), "true");
  EXPECT_EQ(eval("type([1, 2.0], list(Or(integer,float)))"), "true");
  // A bracket literal is a list; only typed boundaries turn it into a tuple.
  EXPECT_EQ(eval("type([1, 2.0], [integer,float])"), "false");
  EXPECT_EQ(eval("type([], list(string))"), "true");
  EXPECT_EQ(eval("type(q, symbol)"), "true");
}

TEST(Eval, ShortCircuit) {
  EXPECT_EQ(eval("false and 1 / 0 > 0"), "false");
  EXPECT_EQ(eval("true or 1 / 0 > 0"), "true");
  EXPECT_EQ(eval("not (1 > 2)"), "true");
}

TEST(Eval, RuntimeErrors) {
  EXPECT_EQ(eval_error("[1, 2][3]"), "INDEX-OUT-OF-RANGE");
  EXPECT_EQ(eval_error("[1, 2][0]"), "INDEX-OUT-OF-RANGE");
  EXPECT_EQ(eval_error("1 / 0"), "DIV-BY-ZERO");
  EXPECT_EQ(eval_error("1 + \"s\""), "TYPE-ERROR");
  EXPECT_EQ(eval_error("g(1)"), "NOT-A-PROC");
}

TEST(Eval, FloatRendering) {
  EXPECT_EQ(render(Value::flt(1.0)), "1.0");
  EXPECT_EQ(render(Value::flt(12849.76224)), "12849.76224");
  EXPECT_EQ(render(Value::flt(0.1 + 0.2)), "0.3");
  EXPECT_EQ(render(Value::flt(1e20)), "1e+20");
  EXPECT_EQ(render(Value::list({num(1), Value::flt(2.5), Value::str("a")})), "[1, 2.5, \"a\"]");
}

// ---- the product procedure against an independent model ----

TEST(Product, ReferenceInput) {
  auto r = run(read_fixture("product.mpl"));
  ASSERT_FALSE(r.result.error) << r.result.error->message;
  // Floats multiply left to right, as in the loop.
  const double sf = 1.0 * 8.54 * 34.4 * 8.1 * 5.4;
  const Value* result = r.result.global("result");
  ASSERT_NE(result, nullptr);
  const auto* items = result->items();
  ASSERT_TRUE(items && items->size() == 2u);
  EXPECT_EQ((*items)[0].get<BigInt>(), BigInt(1 * 6 * 10 * 12));
  EXPECT_EQ((*items)[1].get<double>(), sf);
  EXPECT_NEAR(sf, 12849.76224, 1e-6);
  EXPECT_EQ(r.global("status"), "-1");
}

TEST(Product, AgreesWithModelOnRandomLists) {
  auto program = mmtest::parse_ok(read_fixture("product_annotated.mpl"));
  std::mt19937 rng(2024);
  int stopped_early = 0;
  for (int k = 0; k < 600; ++k) {
    const auto l = random_mixed_list(rng);
    const ProductOutcome want = product_model(l, -1);
    if (want.status != -1) ++stopped_early;
    RunResult got = run_program(*program, {}, EntryCall{"prod", {Value::list(l)}});
    ASSERT_FALSE(got.error) << got.error->message;
    EXPECT_TRUE(got.violations.empty()) << render(Value::list(l));
    ASSERT_TRUE(got.entry_result);
    const auto* items = got.entry_result->items();
    ASSERT_TRUE(items && items->size() == 2u);
    EXPECT_EQ((*items)[0].get<BigInt>(), want.si) << render(Value::list(l));
    EXPECT_EQ((*items)[1].get<double>(), want.sf) << render(Value::list(l));
    EXPECT_EQ(got.global("status")->get<BigInt>(), BigInt(want.status));
  }
  EXPECT_GT(stopped_early, 60);  // both exits are exercised
}

TEST(Product, EdgeInputs) {
  auto program = mmtest::parse_ok(read_fixture("product_annotated.mpl"));
  auto go = [&](std::vector<Value> l) {
    RunResult r = run_program(*program, {}, EntryCall{"prod", {Value::list(std::move(l))}});
    EXPECT_TRUE(r.ok());
    return render(*r.entry_result) + " " + render(*r.global("status"));
  };
  EXPECT_EQ(go({}), "[1, 1.0] -1");
  EXPECT_EQ(go({num(2), num(0), Value::flt(3.0)}), "[2, 1.0] 2");
  EXPECT_EQ(go({Value::flt(0.25)}), "[1, 1.0] 1");
  EXPECT_EQ(go({Value::flt(0.5), num(-3)}), "[-3, 0.5] -1");
}

TEST(Product, MutantsViolateTheContract) {
  const auto mutants = mmtest::product_mutants(read_fixture("product_annotated.mpl"));
  ASSERT_EQ(mutants.size(), 4u);
  for (const auto& m : mutants) {
    ASSERT_FALSE(m.source.empty()) << m.name;
    EXPECT_EQ(!check(m.source).result.ok(), m.statically_rejected) << m.name;
    auto r = run(m.source);
    ASSERT_FALSE(r.result.violations.empty()) << m.name;
    EXPECT_EQ(r.result.violations[0].kind, ViolationKind::Postcondition) << m.name;
    auto off = run(m.source, RunOptions{.contracts = false});
    if (m.statically_rejected) {
      EXPECT_EQ(off.error(), "RETURN-TYPE") << m.name;
    } else {
      EXPECT_TRUE(off.result.ok()) << m.name;
    }
  }
}

TEST(Product, ViolationNamesTheCallAndWitness) {
  const auto mutants = mmtest::product_mutants(read_fixture("product_annotated.mpl"));
  auto r = run(mutants[0].source);
  ASSERT_EQ(r.result.violations.size(), 1u);
  const auto& v = r.result.violations[0];
  EXPECT_EQ(v.call, "prod([1, 8.54, 34.4, 6, 8.1, 10, 12, 5.4])");
  EXPECT_NE(v.witness.find("RESULT = [30, 12849.76224]"), std::string::npos) << v.witness;
  EXPECT_NE(v.witness.find("status = -1"), std::string::npos) << v.witness;
}

// ---- quantifiers against direct folds ----

TEST(Quantifiers, FoldsMatchDirectComputation) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> len(0, 7);
  std::uniform_int_distribution<int> val(-5, 5);
  int cases = 0;
  for (int k = 0; k < 600; ++k) {
    std::vector<Value> l;
    std::vector<long> xs;
    for (int n = len(rng); n > 0; --n) {
      xs.push_back(val(rng));
      l.push_back(num(xs.back()));
    }
    const long t = val(rng);
    const Bindings vars = {{"l", Value::list(l)}, {"t", num(t)}};

    long sum = 0;
    BigInt prod = 1;
    std::optional<long> lo;
    std::optional<long> hi;
    std::vector<Value> kept;
    for (long x : xs) {
      if (x <= t) continue;
      sum += x;
      prod *= x;
      lo = lo ? std::min(*lo, x) : x;
      hi = hi ? std::max(*hi, x) : x;
      kept.push_back(num(x));
    }
    EXPECT_EQ(render(spec("add(e, e in l, e > t)", vars)), std::to_string(sum));
    EXPECT_EQ(spec("mul(e, e in l, e > t)", vars).get<BigInt>(), prod);
    EXPECT_EQ(render(spec("seq(e, e in l, e > t)", vars)), render(Value::list(kept)));
    EXPECT_EQ(render(spec("add(l[i], i = 1..nops(l), l[i] > t)", vars)), std::to_string(sum));
    if (lo) {
      EXPECT_EQ(render(spec("min(e, e in l, e > t)", vars)), std::to_string(*lo));
      EXPECT_EQ(render(spec("max(e, e in l, e > t)", vars)), std::to_string(*hi));
    } else {
      Parsed p = formula("min(e, e in l, e > t)");
      try {
        eval_formula(*p.expr, vars);
        ADD_FAILURE() << "min over an empty selection";
      } catch (const RuntimeError& e) {
        EXPECT_EQ(e.code(), "EMPTY-MIN-MAX");
      }
    }

    const bool all = std::all_of(xs.begin(), xs.end(), [&](long x) { return x > t; });
    const bool any = std::any_of(xs.begin(), xs.end(), [&](long x) { return x == t; });
    EXPECT_EQ(spec("forall(i::integer, 1 <= i and i <= nops(l) implies l[i] > t)", vars).get<bool>(),
              all);
    EXPECT_EQ(spec("exists(i::integer, 1 <= i and i <= nops(l) and l[i] = t)", vars).get<bool>(), any);
    EXPECT_EQ(spec("forall(i::integer, (1 <= i and i < nops(l) + 1) implies l[i] > t)", vars)
                  .get<bool>(),
              all);
    ++cases;
  }
  EXPECT_GE(cases, 500);
}

TEST(Quantifiers, EmptyFoldIdentities) {
  const Bindings vars = {{"l", Value::list({})}};
  EXPECT_EQ(render(spec("add(e, e in l, true)", vars)), "0");
  EXPECT_EQ(render(spec("mul(e, e in l, true)", vars)), "1");
  EXPECT_EQ(render(spec("seq(e, e in l, true)", vars)), "[]");
  EXPECT_EQ(render(spec("forall(i::integer, 1 <= i and i <= 0 implies false)", vars)), "true");
  EXPECT_EQ(render(spec("exists(i::integer, 1 <= i and i <= 0 and true)", vars)), "false");
}

TEST(Quantifiers, FloatBoundsRoundInward) {
  const Bindings none;
  EXPECT_EQ(render(spec("add(i, i = 1..3, true)", none)), "6");
  EXPECT_EQ(render(spec("seq(i, i = 0..4, true)", none)), "[0, 1, 2, 3, 4]");
  EXPECT_EQ(
      render(spec("exists(i::integer, 0.5 <= i and i <= 2.5 and i * i = 4)", none)), "true");
  EXPECT_EQ(
      render(spec("forall(i::integer, 0.5 <= i and i <= 2.5 implies i >= 1 and i <= 2)", none)),
      "true");
}

TEST(Quantifiers, UnboundedShapeIsAnError) {
  Parsed p = formula("forall(i::integer, i > 0)");
  try {
    eval_formula(*p.expr, {});
    ADD_FAILURE() << "expected an error";
  } catch (const RuntimeError& e) {
    EXPECT_EQ(e.code(), "UNBOUNDED-QUANTIFIER");
  }
}

// ---- contracts ----

TEST(Contracts, Precondition) {
  auto r = run("f := (*@ requires n > 0; @*) proc(n::integer)::integer; return n; end proc;\n"
               "a := f(1);\nb := f(0);\n");
  EXPECT_EQ(r.kinds(), std::vector<ViolationKind>{ViolationKind::Precondition});
  EXPECT_EQ(r.result.violations[0].call, "f(0)");
  EXPECT_EQ(r.result.violations[0].clause_span.line, 1);
  EXPECT_EQ(r.global("a"), "1");
  EXPECT_EQ(r.global("b"), "<unbound>");
}

TEST(Contracts, LoopInvariantAndDecreases) {
  auto ok = run(read_fixture("while_contracts.mpl"));
  EXPECT_TRUE(ok.result.ok());
  EXPECT_EQ(ok.global("total"), "55");
  EXPECT_EQ(ok.global("none"), "0");

  auto inv = run(mmtest::replace_once(read_fixture("while_contracts.mpl"), "s := s + k;",
                                      "s := s + 1;"));
  ASSERT_FALSE(inv.result.violations.empty());
  EXPECT_EQ(inv.result.violations[0].kind, ViolationKind::Invariant);

  auto dec = run("f := proc(n::integer)::integer;\n  local k::integer := 0;\n"
                 "  (*@ decreases n - k; @*)\n  while k < n do\n    k := k + 0;\n"
                 "    if k = 0 then k := n; end if;\n  end do;\n  return k;\nend proc;\n"
                 "g := proc(n::integer)::integer;\n  local k::integer := 0;\n"
                 "  (*@ decreases n - k; @*)\n  while k < n + 2 do\n    k := k + 1;\n"
                 "  end do;\n  return k;\nend proc;\n"
                 "a := f(3);\nb := g(3);\n");
  EXPECT_EQ(dec.kinds(), std::vector<ViolationKind>{ViolationKind::Decreases});
  EXPECT_EQ(dec.global("a"), "3");
}

TEST(Contracts, Assertion) {
  auto r = run(mmtest::replace_once(read_fixture("while_contracts.mpl"),
                                    "s = n * (n + 1) / 2", "s = n * n"));
  ASSERT_EQ(r.result.violations.size(), 1u);
  EXPECT_EQ(r.result.violations[0].kind, ViolationKind::Assertion);
  EXPECT_EQ(r.result.violations[0].call, "sumto(10)");
}

TEST(Contracts, FrameRule) {
  auto r = run("g := 0;\nf := (*@ ensures true; @*)\nproc()::integer;\n  global g;\n  g := 1;\n"
               "  return 0;\nend proc;\na := f();\n");
  EXPECT_EQ(r.kinds(), std::vector<ViolationKind>{ViolationKind::Frame});
  EXPECT_NE(r.result.violations[0].detail.find("g"), std::string::npos);
}

TEST(Contracts, KeepGoingContinuesAtTopLevel) {
  const std::string src = "f := (*@ requires n > 0; @*) proc(n::integer)::integer; return n; "
                          "end proc;\na := f(0);\nb := f(2);\nc := f(-1);\n";
  auto stop = run(src);
  EXPECT_EQ(stop.result.violations.size(), 1u);
  EXPECT_EQ(stop.global("b"), "<unbound>");
  auto go = run(src, RunOptions{.keep_going = true});
  EXPECT_EQ(go.result.violations.size(), 2u);
  EXPECT_EQ(go.global("b"), "2");
}

TEST(Contracts, UninterpretedSymbolsAreRejectedBeforeRunning) {
  const std::string src = "(*@ pred sorted(list(integer)); @*)\n"
                          "f := (*@ ensures sorted(l); @*) proc(l::list(integer))::integer; "
                          "return 0; end proc;\na := f([1]);\n";
  auto on = run(src);
  ASSERT_EQ(on.result.static_errors.size(), 1u);
  EXPECT_EQ(on.result.static_errors[0].code, "SPEC-UNINTERPRETED");
  EXPECT_EQ(on.global("a"), "<unbound>");
  auto off = run(src, RunOptions{.contracts = false});
  EXPECT_TRUE(off.result.ok());
  EXPECT_EQ(off.global("a"), "0");
}

TEST(Contracts, NeutralWhenSatisfied) {
  for (const char* name : {"product_annotated.mpl", "while_contracts.mpl", "quantifiers.mpl",
                           "globals.mpl", "narrowing.mpl", "toplevel.mpl"}) {
    auto on = run(read_fixture(name));
    auto off = run(read_fixture(name), RunOptions{.contracts = false});
    ASSERT_TRUE(on.result.ok()) << name;
    ASSERT_TRUE(off.result.ok()) << name;
    ASSERT_EQ(on.result.globals.size(), off.result.globals.size()) << name;
    for (std::size_t i = 0; i < on.result.globals.size(); ++i) {
      EXPECT_EQ(on.result.globals[i].first, off.result.globals[i].first);
      EXPECT_EQ(render(on.result.globals[i].second), render(off.result.globals[i].second));
    }
  }
}

// ---- procedures ----

TEST(Procedures, FixtureResults) {
  auto g = run(read_fixture("globals.mpl"));
  ASSERT_TRUE(g.result.ok());
  EXPECT_EQ(g.global("f5"), "120");
  EXPECT_EQ(g.global("big"), "15511210043330985984000000");
  EXPECT_EQ(g.global("calls"), "32");
  EXPECT_EQ(g.global("b"), "[-1.0, 7.25]");

  auto n = run(read_fixture("narrowing.mpl"));
  ASSERT_TRUE(n.result.ok());
  EXPECT_EQ(n.global("a"), "\"word\"");
  EXPECT_EQ(n.global("b"), "\"integer\"");
  EXPECT_EQ(n.global("c"), "\"float\"");
  EXPECT_EQ(n.global("d"), "3.0");
  EXPECT_EQ(n.global("e"), "true");
  EXPECT_EQ(n.global("f"), "false");

  auto q = run(read_fixture("quantifiers.mpl"));
  ASSERT_TRUE(q.result.ok());
  EXPECT_EQ(q.global("m"), "9");
  EXPECT_EQ(q.global("p"), "3");
}

TEST(Procedures, TopLevelLoopLeavesNoVariable) {
  auto r = run(read_fixture("toplevel.mpl"));
  ASSERT_TRUE(r.result.ok());
  EXPECT_EQ(r.global("n"), "10");
  EXPECT_EQ(r.global("k"), "<unbound>");
  EXPECT_EQ(r.global("z"), "5.0");
  EXPECT_EQ(r.global("x"), "[1, 2.5]");
}

TEST(Procedures, CallErrors) {
  const std::string sq = "sq := proc(n::integer)::integer; return n * n; end proc;\n";
  EXPECT_EQ(run(sq + "a := sq(1, 2);").error(), "WRONG-ARITY");
  EXPECT_EQ(run(sq + "a := sq(1.5);").error(), "ARG-TYPE");
  EXPECT_EQ(run("h := proc()::integer; return 1.5; end proc;\na := h();").error(), "RETURN-TYPE");
  EXPECT_EQ(run("r := proc(n::integer)::integer; return r(n + 1); end proc;\na := r(0);").error(),
            "RECURSION-LIMIT");
  EXPECT_EQ(run("u := proc()::integer; local v::integer; return v; end proc;\na := u();").error(),
            "UNASSIGNED-LOCAL");
  EXPECT_EQ(run("for i from 1 by 0 to 3 do y := i; end do;").error(), "LOOP-STEP-ZERO");
}

TEST(Procedures, LoopBoundsAreEvaluatedOnce) {
  auto r = run("n := 3;\nc := 0;\nfor i from 1 to n do\n  n := n + 1;\n  c := c + 1;\nend do;\n");
  EXPECT_EQ(r.global("c"), "3");
}

TEST(Procedures, FallingOffTheEndYieldsNull) {
  auto r = run("f := proc() local v; v := 1; end proc;\na := f();\n");
  EXPECT_EQ(r.global("a"), "NULL");
}

TEST(Procedures, ListsBecomeTuplesAtTypedReturns) {
  auto r = run("f := proc()::[integer,float]; return [1, 2.0]; end proc;\na := f();\n"
               "b := type(a, [integer,float]);\n");
  EXPECT_TRUE(r.result.ok());
  EXPECT_EQ(r.global("a"), "[1, 2.0]");
  EXPECT_EQ(r.global("b"), "true");
  EXPECT_TRUE(r.result.global("a")->is<Value::Tuple>());
}

TEST(Procedures, TraceRecordsStatements) {
  auto r = run("x := 1;\nif x = 1 then\n  y := 2;\nend if;\n", RunOptions{.trace = true});
  EXPECT_EQ(r.result.trace, (std::vector<std::string>{"1: assign", "2: if", "3: assign"}));
}

// ---- static snapshots agree with live values ----

TEST(Soundness, SnapshotsDescribeEveryReachedState) {
  for (const char* name : {"product.mpl", "product_annotated.mpl", "narrowing.mpl",
                           "while_contracts.mpl", "quantifiers.mpl", "globals.mpl",
                           "toplevel.mpl", "test_always_true.mpl", "test_always_false.mpl",
                           "unused_local.mpl"}) {
    auto c = check(read_fixture(name));
    ASSERT_TRUE(c.result.ok()) << name;
    RunOptions opts;
    opts.soundness = &c.result.snapshots;
    RunResult r = run_program(*c.program, opts);
    EXPECT_TRUE(r.ok()) << name;
    EXPECT_GT(r.snapshots_checked, 0u) << name;
    for (const auto& f : r.soundness_failures) {
      ADD_FAILURE() << name << ":" << f.line << " " << f.name << " = " << f.value
                    << " is not a " << f.expected.str();
    }
  }
}

TEST(Soundness, RandomProductInputs) {
  auto c = check(read_fixture("product.mpl"));
  ASSERT_TRUE(c.result.ok());
  RunOptions opts;
  opts.soundness = &c.result.snapshots;
  std::mt19937 rng(5);
  std::size_t checked = 0;
  for (int k = 0; k < 200; ++k) {
    RunResult r = run_program(*c.program, opts, EntryCall{"prod", {Value::list(random_mixed_list(rng))}});
    EXPECT_TRUE(r.soundness_failures.empty());
    checked += r.snapshots_checked;
  }
  EXPECT_GT(checked, 2000u);
}

TEST(Soundness, StopsWhenKeepGoingSkipsAStatement) {
  auto c = check(read_fixture("violations.mpl"));
  ASSERT_TRUE(c.result.ok());
  RunOptions opts;
  opts.soundness = &c.result.snapshots;
  opts.keep_going = true;
  RunResult r = run_program(*c.program, opts);
  EXPECT_EQ(r.violations.size(), 2u);
  EXPECT_TRUE(r.soundness_failures.empty());
  ASSERT_TRUE(r.soundness_stopped_at.has_value());
  EXPECT_EQ(*r.soundness_stopped_at, 13);
}
