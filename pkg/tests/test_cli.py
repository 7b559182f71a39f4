"""CLI surface: subcommands, exit codes, output shapes."""

import pytest

from adtxn.cli import main

DEDUCTION = """\
object s stack ()
txn T1
  op s EMPTY
end commit
txn T2
  op s POP
end commit
schedule steps T1 T2 T2 T1 T2
"""

ABORTER = """\
object s stack a
txn T1
  op s PUSH b
end abort
schedule steps T1 T1
"""


@pytest.fixture
def wl(tmp_path):
    def write(text, name="w.wl"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def test_run_prints_the_trace(wl, capsys):
    assert main(["run", wl(DEDUCTION)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("0 BEGIN txn=T1")
    assert "5 DEDUCE txn=T2 obj=s op=POP in=[] out=[_,EmptyStack]" in out


def test_run_trace_file_and_summary(wl, tmp_path, capsys):
    trace_path = tmp_path / "out.trace"
    assert main(["run", wl(DEDUCTION), "--trace", str(trace_path)]) == 0
    out = capsys.readouterr().out
    assert "txn T1 committed" in out and "txn T2 committed" in out
    assert "final s = ()" in out
    assert trace_path.read_text().splitlines()[-1].startswith("7 COMMIT")


def test_run_metrics_flag(wl, capsys):
    assert main(["run", wl(DEDUCTION), "--metrics"]) == 0
    out = capsys.readouterr().out
    assert "deductions 1" in out
    assert "max_in_execution s 1" in out


def test_run_rejects_a_bad_file(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", str(tmp_path / "missing.wl")])
    assert exc.value.code == 2
    bad = tmp_path / "bad.wl"
    bad.write_text("object s bogus\n")
    with pytest.raises(SystemExit) as exc:
        main(["run", str(bad)])
    assert exc.value.code == 2
    assert "line 1" in capsys.readouterr().err


def test_run_propagates_simulation_errors(wl, capsys):
    text = "object s stack\ntxn T\n op s PUSH a\n op s POP\nend commit\n" \
           "schedule seed 1 steps 1\n"
    assert main(["run", wl(text)]) == 2
    assert "error" in capsys.readouterr().err


def test_check_explicit_schedule_single_run(wl, capsys):
    assert main(["check", wl(DEDUCTION)]) == 0
    out = capsys.readouterr().out
    assert "PASS seed=- serial_order=" in out
    assert "checked 1 run(s), 0 failure(s)" in out


def test_check_sweeps_seeds_for_random_schedules(wl, capsys):
    text = """\
object s stack ()
txn T1
  op s PUSH a
end commit
txn T2
  op s POP
end commit
schedule seed 10 steps 100
"""
    assert main(["check", wl(text), "--runs", "5"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5
    for k in range(5):
        assert f"seed={10 + k}" in out


def test_check_covers_transparency_for_aborting_workloads(wl, capsys):
    assert main(["check", wl(ABORTER)]) == 0
    assert "PASS" in capsys.readouterr().out


def test_verify_tables_single_and_unknown(capsys):
    assert main(["verify-tables", "boolean"]) == 0
    out = capsys.readouterr().out
    assert "PASS boolean translation" in out
    assert "PASS boolean containment" in out
    assert main(["verify-tables", "bogus"]) == 2
    assert "bogus" in capsys.readouterr().err


def test_verify_tables_all(capsys):
    assert main(["verify-tables", "all", "--depth", "2"]) == 0
    out = capsys.readouterr().out
    # 4 types x 5 checks, every line a PASS with counted cases
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 20
    assert all(l.startswith("PASS") and "cases=" in l for l in lines)


def test_fuzz_smoke(capsys):
    assert main(["fuzz", "--runs", "10", "--seed", "42"]) == 0
    out = capsys.readouterr().out
    assert "mode=commit: 10/10 runs passed" in out
    assert "mode=abort: 10/10 runs passed" in out


def test_fuzz_no_aborts_skips_the_second_mode(capsys):
    assert main(["fuzz", "--runs", "5", "--no-aborts"]) == 0
    out = capsys.readouterr().out
    assert "mode=commit" in out and "mode=abort" not in out


def test_fuzz_txn_cap(capsys):
    assert main(["fuzz", "--txns", "9", "--runs", "1"]) == 2
    assert "capped" in capsys.readouterr().err
