from pathlib import Path

import pytest

import minimaple as mm

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture(name):
    return (FIXTURES / name).read_text()


def test_product_checks_clean():
    report = mm.check(fixture("product.mpl"))
    assert report.ok
    assert report.diagnostics == []
    by_line = {s.line: str(s) for s in report.snapshots}
    assert by_line[26].endswith("status:integer}")
    assert "i:symbol" in by_line[24]


def test_snapshot_entries_are_name_type_pairs():
    report = mm.check("x := 1;\ny := [x, 2.5];\n")
    assert report.snapshots[-1].entries == [("x", "integer"), ("y", "list(Or(integer,float))")]
    assert report.dump_pi().splitlines()[-1] == "2: π={x:integer, y:list(Or(integer,float))}"


def test_diagnostics_carry_code_and_position():
    report = mm.check(fixture("test_always_false.mpl"))
    assert report.ok
    [d] = report.diagnostics
    assert (d.severity, d.code) == ("warning", "TEST-ALWAYS-FALSE")
    assert d.line > 0 and d.column > 0
    assert '"TEST-ALWAYS-FALSE"' in report.to_json("f.mpl")


def test_run_product_entry():
    src = fixture("product_annotated.mpl")
    r = mm.run(src, "prod", [[2, 0, 3.0]])
    assert r.ok
    assert r.result == (2, 1.0)
    assert r.globals["status"] == 2
    assert mm.run(src, "prod", [[]]).result == (1, 1.0)


def test_run_returns_python_values():
    r = mm.run('a := 4294967296 * 4294967296;\nb := "s";\nc := [true, q];\n')
    assert r.globals["a"] == 2**64
    assert r.globals["b"] == "s"
    assert r.globals["c"] == [True, mm.Symbol("q")]


def test_mutant_reports_postcondition_violation():
    src = fixture("product_annotated.mpl").replace("si:=si*x", "si:=si+x", 1)
    r = mm.run(src)
    assert not r.ok
    [v] = r.violations
    assert v.kind == "postcondition"
    assert "RESULT = [30, 12849.76224]" in v.witness
    assert mm.run(src, contracts=False).ok


def test_runtime_error_report():
    r = mm.run("x := [1, 2][5];\n")
    assert r.error.code == "INDEX-OUT-OF-RANGE"
    assert r.error.line == 1


def test_programs_with_errors_need_force():
    src = fixture("frame_violation.mpl")
    with pytest.raises(mm.ProgramError, match="SPEC-FRAME-VIOLATION"):
        mm.run(src)
    r = mm.run(src, force=True)
    assert [v.kind for v in r.violations] == ["frame"]


def test_soundness_mode_counts_snapshots():
    r = mm.run(fixture("globals.mpl"), soundness=True)
    assert r.ok
    assert r.snapshots_checked > 0
    assert r.soundness_failures == []


def test_bad_arguments_raise_type_error():
    with pytest.raises(TypeError):
        mm.run(fixture("product_annotated.mpl"), "prod", [object()])


def test_type_operations():
    assert mm.normalize("Or(integer, Or(float, integer))") == "Or(integer,float)"
    assert mm.is_subtype("integer", "Or(integer,float)")
    assert not mm.is_subtype("[integer,float]", "list(Or(integer,float))")
    assert mm.lub("integer", "float") == "Or(integer,float)"
    assert mm.meet("Or(integer,float)", "float") == "float"
    assert mm.meet("integer", "string") is None
    assert mm.subtract("Or(integer,float)", "integer") == "float"
    with pytest.raises(ValueError):
        mm.normalize("Or(")


def test_format_round_trips():
    src = fixture("product.mpl")
    once = mm.format_source(src)
    assert mm.format_source(once) == once
    assert mm.syntax_tree("x := 1;").startswith("(")
    with pytest.raises(mm.ProgramError):
        mm.format_source("x := ;")
