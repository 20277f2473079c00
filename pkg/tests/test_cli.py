"""End-to-end runs of the command-line front end."""

import json

import pytest

from src.cli import run
from src.fileformat import load_system, parse_system
from src.rank_one import SolveMode
from tests.conftest import FIXTURES, Q

GOLDEN = json.loads((FIXTURES.parent / "tests" / "golden" / "expected_outputs.json").read_text(encoding="utf-8"))


def invoke(argv) -> int:
    try:
        return run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)


@pytest.mark.parametrize("case", GOLDEN, ids=[c["name"] for c in GOLDEN])
def test_golden_outputs(case, capsys):
    argv = [a.replace("{fixtures}", str(FIXTURES)) for a in case["argv"]]
    code = invoke(argv)
    out = capsys.readouterr().out
    assert code == case["exit_code"]
    for needle in case["stdout_contains"]:
        assert needle in out


def test_errors_go_to_stderr(capsys):
    assert invoke(["solve", str(FIXTURES / "does_not_exist.bls")]) == 3
    err = capsys.readouterr().err
    assert err.startswith("dyad: error:")


def test_parse_error_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.bls"
    bad.write_text("field Q\nsize 1 1\nequation 1\n  1.5\n", encoding="utf-8")
    assert invoke(["solve", str(bad)]) == 3
    assert "line 4, column 3" in capsys.readouterr().err


def test_solve_json(capsys):
    assert invoke(["solve", str(FIXTURES / "trace_corners_unsolvable.bls"), "--format", "json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["status"] == "NoSolution"
    assert data["exit_code"] == 1
    assert data["certificate"]["kind"] == "R1NoCommonRoot"
    assert data["certificate"]["discriminants"] == ["-3"]


def test_mode_flag_overrides_file(capsys):
    assert invoke(["solve", str(FIXTURES / "cross_homogeneous.bls"), "--field", "GF(5)", "--mode", "any"]) == 0
    assert "x=(0, 0) y=(0, 0)" in capsys.readouterr().out


def test_budget_flag(capsys):
    argv = ["solve", str(FIXTURES / "cross_homogeneous.bls"), "--field", "GF(3)", "--budget", "5"]
    assert invoke(argv) == 2
    assert "HeuristicsFailed" in capsys.readouterr().out


def test_gen_random_then_solve(tmp_path, capsys):
    out = tmp_path / "random.bls"
    assert invoke(["gen-random", "--field", "GF(3)", "--size", "2", "2", "-m", "3", "--seed", "7",
                   "-o", str(out)]) == 0
    sys = load_system(out).system
    assert (sys.p, sys.q, sys.m) == (2, 2, 3)
    assert invoke(["solve", str(out)]) in (0, 1)


def test_gen_random_is_seeded(capsys):
    invoke(["gen-random", "--size", "2", "3", "-m", "2", "--seed", "11"])
    first = capsys.readouterr().out
    invoke(["gen-random", "--size", "2", "3", "-m", "2", "--seed", "11"])
    assert capsys.readouterr().out == first


def test_gen_quaternion_matches_fixture(capsys):
    assert invoke(["gen-quaternion", "0", "0", "0", "1"]) == 0
    generated = parse_system(capsys.readouterr().out)
    assert generated.system == load_system(FIXTURES / "quaternion_e3.bls").system


def test_gen_commuting_matches_fixture(capsys):
    assert invoke(["gen-commuting", "*0/0*", "0*/*0"]) == 0
    text = capsys.readouterr().out
    generated = parse_system(text)
    assert generated.mode is SolveMode.TOTALLY_NONZERO
    assert generated.system == load_system(FIXTURES / "commuting_diag_antidiag.bls").system
    assert "y1=P11 y2=P22" in text


def test_gen_commuting_without_equations(capsys):
    assert invoke(["gen-commuting", "*", "*"]) == 0
    assert "no equations" in capsys.readouterr().out


@pytest.mark.parametrize("pattern", ["00/00", "*0/*", "*x/0*"])
def test_gen_commuting_rejects_bad_patterns(pattern, capsys):
    assert invoke(["gen-commuting", pattern, "*0/0*"]) == 3
    captured = capsys.readouterr()
    assert captured.err.startswith("dyad: error:")
    assert "Traceback" not in captured.err
    assert captured.out == ""


def test_record_and_history(tmp_path, capsys):
    db = tmp_path / "runs.db"
    assert invoke(["solve", str(FIXTURES / "trace_corners_solvable.bls"), "--record", "--db", str(db)]) == 0
    assert invoke(["solve", str(FIXTURES / "trace_corners_unsolvable.bls"), "--record", "--db", str(db)]) == 1
    capsys.readouterr()
    assert invoke(["history", "--db", str(db)]) == 0
    out = capsys.readouterr().out
    assert "2 run(s) over 2 system(s): 1 solved, 1 refuted, 0 undecided" in out

    assert invoke(["history", "--db", str(db), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["summary"]["n"] == 2
    assert {r["status"] for r in data["runs"]} == {"Solutions", "NoSolution"}


def test_history_of_one_system_lists_its_solutions(tmp_path, capsys):
    db = tmp_path / "runs.db"
    solvable = str(FIXTURES / "trace_corners_solvable.bls")
    assert invoke(["solve", solvable, "--record", "--db", str(db)]) == 0
    assert invoke(["solve", str(FIXTURES / "trace_corners_unsolvable.bls"), "--record", "--db", str(db)]) == 1
    capsys.readouterr()

    assert invoke(["history", "--db", str(db), "--system", solvable]) == 0
    out = capsys.readouterr().out
    assert "1 run(s) of" in out
    assert "x=(2, 2) y=(1, 1/2)" in out and "x=(1, 2) y=(1, 1)" in out
    assert "NoSolution" not in out

    assert invoke(["history", "--db", str(db), "--system", solvable, "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert [r["status"] for r in data["runs"]] == ["Solutions"]
    assert {"x": "(1, 2)", "y": "(1, 1)"} in data["runs"][0]["solutions"]


def test_pencil_on_inconsistent_system(tmp_path, capsys):
    f = tmp_path / "inconsistent.bls"
    f.write_text("field Q\nsize 1 1\nequation 1\n  1\nequation 3\n  2\n", encoding="utf-8")
    assert invoke(["pencil", str(f)]) == 3
    assert invoke(["solve", str(f)]) == 1
    assert "InconsistentReduction" in capsys.readouterr().out


def test_symbolic_pencil(capsys):
    assert invoke(["pencil", str(FIXTURES / "three_parameter.bls"), "--symbolic"]) == 0
    assert "pencil over Q(g1,g2,g3)" in capsys.readouterr().out


def test_analyze_dependent_matrices(tmp_path, capsys):
    f = tmp_path / "dependent.bls"
    f.write_text("field Q\nsize 1 2\nequation 1\n  1 0\nequation 2\n  2 0\nequation 5\n  0 1\n",
                 encoding="utf-8")
    assert invoke(["analyze", str(f)]) == 0
    out = capsys.readouterr().out
    assert "always solvable: NO (matrices are linearly dependent)" in out
    assert "m̂=2" in out


def test_missing_subcommand_exits_3():
    assert invoke([]) == 3


def test_scalar_fixture_field_is_rational():
    assert load_system(FIXTURES / "trace_corners_solvable.bls").system.field == Q
