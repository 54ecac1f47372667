import json
import math
import subprocess
import sys

import pytest

from bellexcess import cli
from bellexcess.textio import format_matrix
from bellexcess.tightness import TableRow

from conftest import chsh_matrix


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@pytest.fixture
def chsh_file(tmp_path):
    p = tmp_path / "chsh.txt"
    p.write_text(format_matrix(chsh_matrix()))
    return str(p)


@pytest.fixture
def core_file(tmp_path):
    p = tmp_path / "core.txt"
    p.write_text("0-+\n+0-\n-+0\n")
    return str(p)


def test_lhv_file_and_builtin(capsys, chsh_file):
    code, out, _ = run(capsys, "lhv", chsh_file, "--format", "json", "--threads", "1")
    assert code == 0 and records(out)[0]["value"] == 2
    code, out, _ = run(capsys, "lhv", "--builtin", "4/0", "--count", "--format", "json")
    rec = records(out)[0]
    assert code == 0 and rec["value"] == 8 and rec["optimizer_count"] > 0
    code, out, _ = run(capsys, "lhv", "--file", chsh_file)
    assert code == 0 and "C = 2" in out


def test_core_file(capsys, core_file):
    code, out, _ = run(capsys, "lhv", core_file, "--as-core", "--format", "json")
    assert code == 0 and records(out)[0]["value"] == 4
    code, out, _ = run(capsys, "excess", core_file, "--as-core", "--format", "json")
    assert records(out)[0]["excess"] == 0


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--builtin", "4/0", "--format", "json")
    rec = records(out)[0]
    assert code == 0 and rec["sigma_bound"] == pytest.approx(8)
    assert [rec["best_lower"], rec["best_upper"]] == [6, 8]
    code, out, _ = run(capsys, "bounds", "--builtin", "2/0", "--normalize", "--format", "json")
    rec = records(out)[0]
    assert rec["normalized"] is True and rec["lhv_value"] == 2
    code, out, _ = run(capsys, "bounds", "--builtin", "2/0")
    assert "unavailable" not in out and "n sigma" in out


def test_tightness(capsys, core_file):
    code, out, _ = run(capsys, "tightness", "--builtin", "8/0", "--format", "json")
    rec = records(out)[0]
    assert code == 0 and (rec["vertex_count"], rec["affine_rank"], rec["tight"]) == (64, 63, True)
    code, _, err = run(capsys, "tightness", "--builtin", "2/0", "--budget", "1")
    assert code == 2 and "refused" in err


def test_witness(capsys):
    code, out, _ = run(capsys, "witness", "--format", "json")
    assert code == 0 and records(out)[0]["witness"] == pytest.approx(3 * math.sqrt(3), abs=1e-9)
    code, out, _ = run(capsys, "witness", "--builtin", "2/0", "--alice", "0", "pi/4",
                       "--bob", "pi/8", "7pi/8", "--format", "json")
    assert code == 0 and records(out)[0]["witness"] == pytest.approx(2 * math.sqrt(2), abs=1e-9)


def test_parse_angle():
    assert cli.parse_angle("7pi/12") == pytest.approx(7 * math.pi / 12)
    assert cli.parse_angle("2*pi/3") == pytest.approx(2 * math.pi / 3)
    assert cli.parse_angle("-pi") == pytest.approx(-math.pi)
    assert cli.parse_angle("0.5") == 0.5
    with pytest.raises(cli.InputError):
        cli.parse_angle("tau")


def test_construct(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "sylvester", "2")
    assert code == 0 and out.splitlines()[0] == "++++"
    code, out, _ = run(capsys, "construct", "fourier-square", "3", "--format", "json")
    rec = records(out)[0]
    assert rec["lhv_value"] == pytest.approx(27)
    code, out, _ = run(capsys, "construct", "gyni", "2", "--format", "json")
    rec = records(out)[0]
    assert rec["lhv_value"] == 2 and rec["fourier_square_value"] == 8
    target = tmp_path / "paley.txt"
    code, out, _ = run(capsys, "construct", "paley", "11", "--output", str(target))
    assert code == 0 and "order=12" in out and len(target.read_text().split()) == 12
    code, out, _ = run(capsys, "construct", "circulant", "-1", "1", "1", "1")
    assert out.splitlines()[0] == "-+++"
    code, _, err = run(capsys, "construct", "paley", "13")
    assert code == 1 and "error" in err


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog", "list", "--format", "json")
    recs = records(out)
    assert code == 0 and len(recs) == 13
    assert sum(1 for r in recs if r["order"] == 16 and r["constant_row_sum"] is not None) == 3
    code, out, _ = run(capsys, "catalog", "show", "2/0")
    assert out.split() == ["++", "+-"]
    code, _, err = run(capsys, "catalog", "show", "16/9")
    assert code == 1
    code, _, err = run(capsys, "catalog", "show")
    assert code == 1


def test_verify_mquwm(capsys, tmp_path):
    code, out, _ = run(capsys, "verify-mquwm", "--fixture", "8/A", "--a", "16", "--format", "json")
    recs = records(out)
    assert code == 0 and len(recs) == 28 and all(r["ok"] and r["l"] == 4 for r in recs)
    code, out, _ = run(capsys, "verify-mquwm", "--fixture", "8/A", "--a", "4")
    assert code == 1 and "fail" in out
    p = tmp_path / "w.txt"
    p.write_text("++\n+-\n\n++\n+-\n")
    code, out, _ = run(capsys, "verify-mquwm", str(p), "--a", "2")
    assert code == 1
    code, out, _ = run(capsys, "verify-mquwm", str(p), "--a", "4")
    assert code == 0 and "MQUWM(2,2,1,4)" in out


def test_input_errors(capsys, tmp_path, chsh_file):
    assert run(capsys, "lhv")[0] == 1
    assert run(capsys, "lhv", str(tmp_path / "missing.txt"))[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1 3\n0 0 0\n0 0,1 0\n0 0 0,1\n")
    code, _, err = run(capsys, "lhv", str(bad))
    assert code == 1 and "error" in err
    bad.write_text("4 2 2\n1 2\n")
    assert run(capsys, "excess", str(bad))[0] == 1
    assert run(capsys, "lhv", chsh_file, "--builtin", "2/0")[0] == 1
    assert run(capsys, "lhv", "--builtin", "7/0")[0] == 1
    assert run(capsys, "tightness", chsh_file)[0] == 1


def test_threads_env(capsys, monkeypatch, chsh_file):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.default_threads() == 3
    monkeypatch.setenv(cli.THREADS_ENV, "zero")
    assert run(capsys, "lhv", chsh_file)[0] == 1


def test_usage_error_is_input_error(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["lhv", "--no-such-flag"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["lhv", "--threads", "0"])
    assert info.value.code == 1


def test_budget_refusal(capsys):
    code, _, err = run(capsys, "lhv", "--builtin", "16/0", "--budget", "100")
    assert code == 2 and "refused" in err


def test_table1_mismatch_exit_code(capsys, monkeypatch):
    rows = (TableRow("2", 2, 0, 4, 3, True, False), TableRow("8", 8, 0, 64, 63, True, False))
    monkeypatch.setattr(cli.tg, "TABLE_I", rows)
    code, out, _ = run(capsys, "table1", "--format", "json")
    assert code == 0 and all(r["match"] for r in records(out))
    monkeypatch.setattr(cli.tg, "TABLE_I", rows + (TableRow("4*", 4, 0, 8, 3, False, True),))
    code, out, err = run(capsys, "table1")
    assert code == 3 and "MISMATCH: vertices 4 != 8" in out


def test_output_file(capsys, tmp_path, chsh_file):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "lhv", chsh_file, "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert records(target.read_text())[0]["value"] == 2


def test_module_entry_point(chsh_file):
    res = subprocess.run([sys.executable, "-m", "bellexcess", "excess", chsh_file], capture_output=True, text=True)
    assert res.returncode == 0 and "excess = 2" in res.stdout
