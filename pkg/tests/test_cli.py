import io
import subprocess
import sys

import pytest

from bubbly.cli import main

from conftest import CORPUS, BMI_EXPR


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def values(text):
    return sorted(line for line in text.splitlines() if not line.startswith("--"))


def test_eval_coin():
    code, out, _ = cli("eval", CORPUS / "coin.fl", "-e", "0 ? 1")
    assert code == 0
    assert values(out) == ["0", "1"]
    assert "exhausted=yes" in out


def test_eval_with_no_values_exits_one(tmp_path):
    prog = tmp_path / "f.fl"
    prog.write_text("f 0 = 1\n")
    code, out, _ = cli("eval", prog, "-e", "f 1")
    assert code == 1 and "values=0" in out


def test_strategies_print_the_same_values():
    for name, expr in [("perm", "perm [1,2,3]"), ("bmi", BMI_EXPR)]:
        a = cli("eval", CORPUS / f"{name}.fl", "-e", expr)
        b = cli("eval", CORPUS / f"{name}.fl", "-e", expr, "--strategy", "copying")
        assert values(a[1]) == values(b[1])


def test_dominators_table_for_bmi():
    code, out, _ = cli("dominators", CORPUS / "bmi.fl", "-e", BMI_EXPR)
    assert code == 0
    rows = [line.split() for line in out.splitlines()[1:] if not line.startswith("--")]
    by_label = {r[1]: r for r in rows}
    slash = by_label["/"][0]
    assert by_label["?"][2] == slash == by_label["?"][3]
    assert all(r[4] == "yes" for r in rows)


def test_check_reports_diagnostics(tmp_path):
    code, out, _ = cli("check", CORPUS / "isin.fl")
    assert code == 0 and out.startswith("ok:")
    bad = tmp_path / "bad.fl"
    bad.write_text("f 0 = 1\nf x = 2\n")
    code, out, _ = cli("check", bad)
    assert code == 1 and "overlap" in out


def test_missing_file_and_parse_error_exit_two():
    assert cli("eval", "no/such.fl", "-e", "1")[0] == 2
    code, _, err = cli("eval", CORPUS / "coin.fl", "-e", "1 +")
    assert code == 2 and "unexpected" in err


def test_usage_errors_exit_two():
    assert cli("eval", CORPUS / "coin.fl")[0] == 2
    assert cli("eval", CORPUS / "coin.fl", "-e", "1", "--max-steps", "0")[0] == 2
    assert cli("frobnicate")[0] == 2


def test_stats_report_attribute_writes():
    code, out, _ = cli("eval", CORPUS / "perm.fl", "-e", "perm [1,2,3]", "--stats")
    assert code == 0
    assert "rewrites=" in out and "bubbles=" in out
    assert "dominators=" in out and "attribute overhead" in out


def test_trace_streams_steps_then_values():
    code, out, _ = cli("trace", CORPUS / "coin.fl", "-e", "coin")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].split("\t")[2] == "rewrite"
    assert values("\n".join(l for l in lines if "\t" not in l)) == ["0", "1"]


def test_trace_flag_goes_to_stderr():
    code, out, err = cli("eval", CORPUS / "coin.fl", "-e", "coin", "--trace")
    assert "\t" not in out and "split" in err


def test_dot_dir(tmp_path):
    code, out, _ = cli("eval", CORPUS / "coin.fl", "-e", "coin", "--dot", tmp_path / "dots")
    assert code == 0
    assert len(list((tmp_path / "dots").glob("*.dot"))) == 4


def test_unwritable_dot_dir(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = cli("eval", CORPUS / "coin.fl", "-e", "coin", "--dot", blocker / "x")
    assert code == 2


def test_validate_flag_runs_clean():
    code, out, _ = cli("eval", CORPUS / "psort.fl", "-e", "psort [3,1,2]", "--validate")
    assert code == 0 and values(out) == ["[1,2,3]"]


def test_validate_flag_fails_on_unsound_attribute(monkeypatch):
    import bubbly.evaluator as ev
    from bubbly.dominance import DominatorEntry, DominatorReport

    monkeypatch.setattr(
        ev, "validate_attribute", lambda g: DominatorReport([DominatorEntry(0, 1, 2, False)])
    )
    code, _, err = cli("eval", CORPUS / "coin.fl", "-e", "coin", "--validate")
    assert code == 1 and "unsound" in err


def test_console_entry_point_runs():
    res = subprocess.run(
        [sys.executable, "-m", "bubbly.cli", "eval", str(CORPUS / "coin.fl"), "-e", "coin"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and values(res.stdout) == ["0", "1"]
