// Flow-sensitive checking: π snapshots, narrowing, merges, loops, and
// diagnostics.

#include <gtest/gtest.h>

#include <random>

#include "minimaple/parser.hpp"
#include "minimaple/typechecker.hpp"
#include "pi_comments.hpp"
#include "support.hpp"

using namespace minimaple;
using mmtest::check;
using mmtest::read_fixture;

namespace {

Type T(const char* text) { return parse_type(text).type.value(); }

std::string proc(const std::string& body) { return "p := proc(" + body + "end proc;"; }

}  // namespace

TEST(ProductProcedure, EverySnapshotCommentMatches) {
  const std::string src = read_fixture("product.mpl");
  auto c = check(src);
  const auto comments = mmtest::pi_comments(src);
  ASSERT_EQ(comments.size(), 8u);
  const int expected_lines[] = {3, 6, 9, 11, 17, 23, 25, 27};
  for (std::size_t i = 0; i < comments.size(); ++i) {
    EXPECT_EQ(comments[i].line, expected_lines[i]);
    EXPECT_EQ(mmtest::match_comment(comments[i], c.result.snapshots), "");
  }
}

TEST(ProductProcedure, ExactEnvironmentsAtKeyLines) {
  auto c = check(read_fixture("product.mpl"));
  const std::string full = "l:list(Or(integer,float)), i:symbol, x:Or(integer,float), "
                           "si:integer, sf:float, status:";
  EXPECT_EQ(c.pi_at(5), "π={" + full + "anything}");
  EXPECT_EQ(c.pi_at(24), "π={" + full + "anything}");
  EXPECT_EQ(c.pi_at(26), "π={" + full + "integer}");
  EXPECT_EQ(c.pi_at(2), "π={l:list(Or(integer,float))}");
}

TEST(ProductProcedure, ChecksWithoutAnyDiagnostics) {
  EXPECT_TRUE(check(read_fixture("product.mpl")).result.diagnostics.empty());
  auto spec = check(read_fixture("product_annotated.mpl"));
  EXPECT_TRUE(spec.result.diagnostics.empty()) << spec.dump();
}

TEST(ProductProcedure, AnnotatedLocalsStaySpecialized) {
  auto c = check(read_fixture("product.mpl"));
  const std::map<std::string, Type> declared = {
      {"x", T("Or(integer,float)")}, {"si", Type::integer()}, {"sf", Type::float_()}};
  int seen = 0;
  for (const auto& s : c.result.snapshots) {
    for (const auto& [n, t] : s.entries) {
      auto it = declared.find(n);
      if (it == declared.end()) continue;
      ++seen;
      EXPECT_TRUE(is_subtype(t, it->second)) << n << ":" << t.str() << " at " << s.line;
    }
  }
  EXPECT_GT(seen, 30);
}

TEST(ProductProcedure, CheckingIsDeterministic) {
  const std::string src = read_fixture("product_annotated.mpl");
  auto a = check(src);
  auto b = check(src);
  ASSERT_EQ(a.result.snapshots.size(), b.result.snapshots.size());
  for (std::size_t i = 0; i < a.result.snapshots.size(); ++i) {
    EXPECT_EQ(a.result.snapshots[i].line, b.result.snapshots[i].line);
    EXPECT_EQ(a.result.snapshots[i].render(), b.result.snapshots[i].render());
  }
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(GlobalContext, AssignmentsRetypeFreely) {
  auto c = check("x := 1;\nx := \"s\";\n");
  EXPECT_TRUE(c.result.diagnostics.empty());
  EXPECT_EQ(c.pi_at(2), "π={x:string}");
}

TEST(GlobalContext, UnknownNamesAreSymbols) {
  auto c = check("y := x;\n");
  EXPECT_TRUE(c.result.diagnostics.empty());
  EXPECT_EQ(c.pi_at(1), "π={y:symbol}");
}

TEST(LocalContext, AnnotatedLocalRejectsWiderValues) {
  auto c = check(proc(")\n local si::integer := 1;\n si := 1.5;\n return si;\n"));
  EXPECT_TRUE(c.has("TYPE-ASSIGN-MISMATCH")) << c.dump();
}

TEST(LocalContext, InitializerMustFitTheAnnotation) {
  EXPECT_TRUE(check(proc(") local s::string := 3; return s; ")).has("TYPE-ASSIGN-MISMATCH"));
}

TEST(LocalContext, UnannotatedLocalsRebindFreely) {
  auto c = check(proc(")::string; local v; v := 1; v := \"s\"; return v; "));
  EXPECT_TRUE(c.result.ok()) << c.dump();
}

TEST(LocalContext, ParametersAreNotAssignable) {
  EXPECT_TRUE(check(proc("n::integer) n := 2; return n; ")).has("TYPE-PARAM-ASSIGN"));
}

TEST(LocalContext, UndeclaredNames) {
  EXPECT_TRUE(check(proc(") y := 1; ")).has("UNDECLARED-LOCAL"));
  EXPECT_TRUE(check("g := 0;\n" + proc(") g := 1; ")).has("UNDECLARED-LOCAL"));
  EXPECT_TRUE(check("g := 0;\n" + proc(") global g; g := 1; ")).result.ok());
}

TEST(LocalContext, GlobalsEnterAsAnything) {
  auto c = check("g := 0;\np := proc()\n  global g;\n  return g;\nend proc;\n");
  EXPECT_EQ(c.pi_at(3), "π={g:anything}");
}

TEST(LocalContext, DuplicateDeclarations) {
  auto c = check(read_fixture("dup_decl.mpl"));
  EXPECT_TRUE(c.has("DUP-DECL"));
  EXPECT_TRUE(check(proc(") local a, a; a := 1; return a; ")).has("DUP-DECL"));
  EXPECT_TRUE(check(proc("a) local a; a := 1; return a; ")).has("DUP-DECL"));
}

TEST(Returns, MismatchAndMissingReturn) {
  EXPECT_TRUE(check(proc(")::integer; return 1.5; ")).has("TYPE-RETURN-MISMATCH"));
  EXPECT_TRUE(check(proc("n::integer)::integer; if n > 0 then return n; end if; "))
                  .has("TYPE-MISSING-RETURN"));
  auto all_paths = check(proc(
      "n::integer)::integer; if n > 0 then return n; elif n < 0 then return -n; else return 0; "
      "end if; "));
  EXPECT_FALSE(all_paths.has("TYPE-MISSING-RETURN")) << all_paths.dump();
  EXPECT_TRUE(check("return 1;").has("RETURN-OUTSIDE-PROC"));
}

TEST(Returns, BracketLiteralsMatchTupleReturnTypes) {
  EXPECT_TRUE(check(proc(")::[integer,float]; return [1, 2.0]; ")).result.ok());
  EXPECT_TRUE(check(proc(")::[integer,float]; return [2.0, 1]; ")).has("TYPE-RETURN-MISMATCH"));
  EXPECT_TRUE(check(proc(")::list(integer); return [1, 2, 3]; ")).result.ok());
}

TEST(Expressions, OperandErrors) {
  EXPECT_TRUE(check("x := 1 + \"s\";").has("TYPE-OPERAND"));
  EXPECT_TRUE(check("x := 1 < \"s\";").has("TYPE-OPERAND"));
  EXPECT_TRUE(check("x := 1 and true;").has("TYPE-OPERAND"));
  EXPECT_TRUE(check("x := 5; y := x[1];").has("TYPE-INDEX"));
  EXPECT_TRUE(check("l := [1, 2]; y := l[1.5];").has("TYPE-INDEX"));
  EXPECT_TRUE(check("if 1 then x := 1; end if;").has("TYPE-CONDITION"));
  EXPECT_TRUE(check("x := frobnicate(1);").has("UNKNOWN-PROC"));
  EXPECT_TRUE(check("x := nops(1, 2);").has("TYPE-CALL-ARGS"));
}

TEST(Expressions, DivisionYieldsFloat) {
  auto c = check("x := 4 / 2;\n");
  EXPECT_EQ(c.pi_at(1), "π={x:float}");
}

TEST(Expressions, MixedArithmeticJoins) {
  auto c = check("l := [1, 2.5];\ny := l[1] * 2;\nz := 1 + 2;\n");
  EXPECT_EQ(c.pi_at(1), "π={l:list(Or(integer,float))}");
  EXPECT_EQ(c.pi_at(3), "π={l:list(Or(integer,float)), y:Or(integer,float), z:integer}");
}

TEST(Calls, ArgumentsAreCheckedAgainstParameters) {
  const std::string def = "sq := proc(n::integer)::integer; return n * n; end proc;\n";
  EXPECT_TRUE(check(def + "y := sq(3);").result.ok());
  EXPECT_TRUE(check(def + "y := sq(1.5);").has("TYPE-CALL-ARGS"));
  EXPECT_TRUE(check(def + "y := sq(1, 2);").has("TYPE-CALL-ARGS"));
  auto c = check(def + "y := sq(3);\n");
  EXPECT_EQ(c.pi_at(2), "π={sq:proc(integer)::integer, y:integer}");
}

TEST(Calls, UserCallsWidenGlobals) {
  auto c = check("s := 0;\nbump := proc() global s; s := s + 1; end proc;\nbump();\n");
  EXPECT_EQ(c.pi_at(3), "π={s:anything, bump:proc()::anything}");
}

TEST(Narrow, UnionSplitsIntoMeetAndComplement) {
  TypeEnv env(true);
  env.set({"x", T("Or(integer,float)"), BindingKind::Local, T("Or(integer,float)")});
  auto p = mmtest::parse_ok("c := type(x, integer);");
  const Expr& cond = *p->statements[0]->as<Assign>()->value;
  auto r = narrow(cond, env);
  ASSERT_TRUE(r.then_env && r.else_env);
  EXPECT_EQ(r.then_env->find("x")->type.str(), "integer");
  EXPECT_EQ(r.else_env->find("x")->type.str(), "float");
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_EQ(r.complemented.count("x"), 1u);
}

TEST(Narrow, NotSwapsAndRedundantTestsWarn) {
  TypeEnv env(true);
  env.set({"x", Type::integer(), BindingKind::Local, Type::integer()});
  auto p = mmtest::parse_ok("a := not type(x, integer); b := type(x, float);");
  auto swapped = narrow(*p->statements[0]->as<Assign>()->value, env);
  EXPECT_FALSE(swapped.then_env.has_value());
  ASSERT_TRUE(swapped.else_env.has_value());
  ASSERT_EQ(swapped.diagnostics.size(), 1u);
  EXPECT_EQ(swapped.diagnostics[0].code, "TEST-ALWAYS-TRUE");
  auto never = narrow(*p->statements[1]->as<Assign>()->value, env);
  EXPECT_FALSE(never.then_env.has_value());
  ASSERT_TRUE(never.else_env.has_value());
  EXPECT_EQ(never.else_env->find("x")->type, Type::integer());
  ASSERT_EQ(never.diagnostics.size(), 1u);
  EXPECT_EQ(never.diagnostics[0].code, "TEST-ALWAYS-FALSE");
}

TEST(Narrow, ConjunctionsRefineTheThenSide) {
  TypeEnv env(true);
  env.set({"x", T("Or(integer,float,string)"), BindingKind::Param, std::nullopt});
  env.set({"y", T("Or(integer,string)"), BindingKind::Param, std::nullopt});
  auto p = mmtest::parse_ok("a := type(x, Or(integer,float)) and type(y, string);");
  auto r = narrow(*p->statements[0]->as<Assign>()->value, env);
  ASSERT_TRUE(r.then_env && r.else_env);
  EXPECT_EQ(r.then_env->find("x")->type.str(), "Or(integer,float)");
  EXPECT_EQ(r.then_env->find("y")->type.str(), "string");
  // No complement on the else side of a conjunction.
  EXPECT_EQ(r.else_env->find("x")->type, env.find("x")->type);
  EXPECT_EQ(r.else_env->find("y")->type, env.find("y")->type);
}

TEST(Narrow, DisjunctionsRefineTheElseSide) {
  TypeEnv env(true);
  env.set({"x", T("Or(integer,float,string)"), BindingKind::Param, std::nullopt});
  auto p = mmtest::parse_ok("a := type(x, integer) or type(x, float);");
  auto r = narrow(*p->statements[0]->as<Assign>()->value, env);
  ASSERT_TRUE(r.then_env && r.else_env);
  EXPECT_EQ(r.else_env->find("x")->type.str(), "string");
  EXPECT_EQ(r.then_env->find("x")->type, env.find("x")->type);
}

TEST(Narrow, SoundOnRandomTypes) {
  std::mt19937 rng(61);
  const std::vector<Type> pool = {Type::integer(), Type::float_(), Type::string(),
                                  Type::boolean(), Type::symbol(), T("list(integer)"),
                                  T("list(Or(integer,float))"), T("[integer,float]")};
  auto pick = [&] { return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]; };
  for (int i = 0; i < 1000; ++i) {
    const Type u = std::uniform_int_distribution<int>(0, 2)(rng) ? Type::union_of({pick(), pick(), pick()}) : pick();
    const Type t = std::uniform_int_distribution<int>(0, 1)(rng) ? Type::union_of({pick(), pick()}) : pick();
    const NarrowOutcome o = narrow_type(u, t);
    if (o.then_type) {
      EXPECT_TRUE(is_subtype(*o.then_type, u)) << u.str() << " / " << t.str();
      EXPECT_TRUE(is_subtype(*o.then_type, t)) << u.str() << " / " << t.str();
    }
    if (o.else_type) EXPECT_TRUE(is_subtype(*o.else_type, u)) << u.str() << " / " << t.str();
    EXPECT_EQ(o.always_true, is_subtype(u, t));
    EXPECT_EQ(o.always_false, !meet(u, t).has_value());
  }
}

TEST(Merge, OneSidedAssignmentJoinsWithSymbol) {
  auto c = check("p := proc(b::boolean)\n  local y;\n  if b then\n    y := 1.0;\n  end if;\n"
                 "  return y;\nend proc;\n");
  EXPECT_TRUE(c.result.ok()) << c.dump();
  EXPECT_EQ(c.pi_at(5), "π={b:boolean, y:Or(symbol,float)}");
}

TEST(Merge, BothBranchesAgree) {
  auto c = check("p := proc(b::boolean)\n  local y;\n  if b then\n    y := 1;\n  else\n"
                 "    y := 2;\n  end if;\n  return y;\nend proc;\n");
  EXPECT_EQ(c.pi_at(7), "π={b:boolean, y:integer}");
}

TEST(Merge, IsAnUpperBoundOfBothSides) {
  std::mt19937 rng(71);
  const std::vector<Type> pool = {Type::integer(), Type::float_(), Type::string(),
                                  Type::symbol(), T("list(integer)"), Type::anything()};
  auto pick = [&] { return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]; };
  const char* names[] = {"a", "b", "c", "d"};
  for (int i = 0; i < 1000; ++i) {
    TypeEnv l(true);
    TypeEnv r(true);
    for (const char* n : names) {
      const int mode = std::uniform_int_distribution<int>(0, 3)(rng);
      if (mode != 1) l.set({n, pick(), BindingKind::Local, std::nullopt});
      if (mode != 2) r.set({n, pick(), BindingKind::Local, std::nullopt});
    }
    const TypeEnv m = merge(l, r);
    for (const char* n : names) {
      const Binding* bm = m.find(n);
      const Binding* bl = l.find(n);
      const Binding* br = r.find(n);
      if (!bl && !br) continue;
      ASSERT_NE(bm, nullptr) << n;
      EXPECT_TRUE(is_subtype(bl ? bl->type : Type::symbol(), bm->type));
      EXPECT_TRUE(is_subtype(br ? br->type : Type::symbol(), bm->type));
    }
  }
}

TEST(Merge, AnnotatedLocalKeepsWithinItsDeclaration) {
  TypeEnv l(true);
  TypeEnv r(true);
  const Type decl = T("Or(integer,float,string)");
  l.set({"x", Type::integer(), BindingKind::Local, decl});
  r.set({"x", Type::float_(), BindingKind::Local, decl});
  const TypeEnv m = merge(l, r);
  EXPECT_EQ(m.find("x")->type.str(), "Or(integer,float)");
  EXPECT_TRUE(is_subtype(m.find("x")->type, decl));
}

TEST(Loops, VariableRevertsAndOthersJoin) {
  auto c = check(
      "p := proc(n::integer)\n  global s;\n  local i;\n  for i from 1 to n do\n    s := i;\n"
      "  end do;\n  return s;\nend proc;\n");
  EXPECT_TRUE(c.result.ok()) << c.dump();
  EXPECT_EQ(c.pi_at(5), "π={n:integer, i:integer, s:integer}");
  EXPECT_EQ(c.pi_at(6), "π={n:integer, i:symbol, s:anything}");
}

TEST(Loops, BodyWithoutAssignmentsLeavesTheEnvironment) {
  auto c = check("p := proc(n::integer)\n  local i, t::integer := 0;\n  for i from 1 to n do\n"
                 "    t := t;\n  end do;\n  return t;\nend proc;\n");
  EXPECT_EQ(c.pi_at(2), c.pi_at(5));
}

TEST(Loops, FloatBoundsGiveAFloatVariable) {
  auto c = check("for k from 0.5 by 0.5 to 2 do\n  y := k;\nend do;\n");
  EXPECT_EQ(c.pi_at(2), "π={k:float, y:float}");
  EXPECT_EQ(c.pi_at(3), "π={y:Or(symbol,float)}");
}

TEST(Loops, GrowingTypesReachAFixpoint) {
  auto c = check("p := proc(n::integer)\n  local i, acc;\n  acc := 0;\n  for i from 1 to n do\n"
                 "    acc := [acc];\n  end do;\n  return acc;\nend proc;\n");
  EXPECT_TRUE(c.result.ok()) << c.dump();
  EXPECT_EQ(c.pi_at(4), "π={n:integer, i:integer, acc:anything}");
  EXPECT_EQ(c.pi_at(5), "π={n:integer, i:integer, acc:list(anything)}");
  EXPECT_EQ(c.pi_at(6), "π={n:integer, i:symbol, acc:Or(integer,list(anything))}");
}

TEST(Loops, BoundsMustBeNumeric) {
  EXPECT_TRUE(check("for k from 1 to \"s\" do y := k; end do;").has("TYPE-LOOP-BOUNDS"));
}

TEST(Loops, WhileConditionNarrows) {
  auto c = check("p := proc(v::Or(integer,string))::integer\n  local w::Or(integer,string) := v;\n"
                 "  while type(w, string) do\n    w := 0;\n  end do;\n  return w;\nend proc;\n");
  EXPECT_TRUE(c.result.ok()) << c.dump();
}

TEST(Warnings, RedundantTestFixtures) {
  auto yes = check(read_fixture("test_always_true.mpl"));
  EXPECT_EQ(yes.codes(), std::vector<std::string>{"TEST-ALWAYS-TRUE"});
  auto no = check(read_fixture("test_always_false.mpl"));
  EXPECT_EQ(no.codes(), std::vector<std::string>{"TEST-ALWAYS-FALSE"});
  EXPECT_TRUE(yes.result.ok());
  EXPECT_TRUE(no.result.ok());
}

TEST(Warnings, ElifAfterComplementIsQuiet) {
  // The same test in `if` position is reported.
  auto c = check(proc("x::Or(integer,float))::integer; if type(x, integer) then return 1; "
                      "elif type(x, float) then return 2; end if; return 3; "));
  EXPECT_FALSE(c.has("TEST-ALWAYS-TRUE")) << c.dump();
  auto d = check(proc("x::Or(integer,float))::integer; if type(x, integer) then return 1; end if; "
                      "if type(x, float) then return 2; end if; return 3; "));
  EXPECT_TRUE(d.has("TEST-ALWAYS-TRUE")) << d.dump();
}

TEST(Warnings, UnusedVariables) {
  auto c = check(read_fixture("unused_local.mpl"));
  EXPECT_EQ(c.codes(), std::vector<std::string>{"UNUSED-VAR"});
  EXPECT_TRUE(check(proc("n::integer)::integer; return 0; ")).has("UNUSED-VAR"));
  EXPECT_FALSE(check(read_fixture("product.mpl")).has("UNUSED-VAR"));
}

TEST(Conditions, GuardedOperandsUseTheNarrowing) {
  auto c = check(proc("v::Or(integer,string))::boolean; return type(v, integer) and v > 0; "));
  EXPECT_TRUE(c.result.ok()) << c.dump();
  auto d = check(proc("v::Or(integer,string))::boolean; return type(v, string) or v > 0; "));
  EXPECT_TRUE(d.result.ok()) << d.dump();
  auto e = check(proc("v::Or(integer,string))::boolean; return type(v, string) and v > 0; "));
  EXPECT_TRUE(e.has("TYPE-OPERAND")) << e.dump();
}

TEST(Corpus, CleanFixturesCheckWithoutErrors) {
  for (const char* name : {"product.mpl", "product_annotated.mpl", "narrowing.mpl",
                           "while_contracts.mpl", "quantifiers.mpl", "globals.mpl",
                           "toplevel.mpl"}) {
    auto c = check(read_fixture(name));
    EXPECT_TRUE(c.result.diagnostics.empty()) << name << "\n" << c.dump();
  }
}
