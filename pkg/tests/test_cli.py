import csv
import json
import subprocess
import sys

import pytest

from supq.cli import CLAIMS, build_parser, run
from supq.results import SWEEP_COLUMNS, ExperimentResult, canonical_json, read_result

FAST = {
    "overlap": ["--p", "1", "--q", "2", "--n", "1", "--d", "30"],
    "covariance": ["--p", "2", "--q", "1"],
    "symplectic-check": ["--p", "2", "--q", "2"],
    "dim-scan": ["--p", "1", "--q", "2", "--n", "2", "--d", "2"],
    "kernel-scan": ["--p", "1", "--q", "1", "--n", "2", "--d", "3"],
    "su11-verify": ["--n", "3", "--d", "6"],
    "su22-verify": ["--n", "2", "--max-weight", "2"],
    "identity-check": ["--n", "3", "--jmax", "4"],
    "definetti-gap": ["--n", "2", "--k", "2", "--d", "2"],
    "haar-tv": ["--n", "2", "--m", "60", "--budget", "20000", "--threads", "1"],
    "count-fidelity": ["--m", "64", "--alpha2", "0.5"],
}


def _run(tmp_path, name, extra=(), seed=0):
    out = tmp_path / name
    code = run([name, *FAST[name], "--seed", str(seed), "--out", str(out), *extra])
    return code, out


def test_every_command_has_a_claim():
    assert set(FAST) | {"report"} == set(CLAIMS)
    build_parser()


@pytest.mark.parametrize("name", sorted(FAST))
def test_subcommand_passes_and_writes_result(tmp_path, name, capsys):
    code, out = _run(tmp_path, name)
    assert code == 0, capsys.readouterr().out
    res = read_result(out / "result.json")
    assert res.experiment == name and res.verdict == "pass"
    assert res.claim == CLAIMS[name]
    assert {"started", "finished"} <= set(res.timestamps)


@pytest.mark.parametrize("name", ["overlap", "identity-check", "definetti-gap", "haar-tv", "covariance"])
def test_rerun_is_byte_identical(tmp_path, name):
    _, a = _run(tmp_path / "a", name, seed=5)
    _, b = _run(tmp_path / "b", name, seed=5)
    ta, tb = (p.joinpath("result.json").read_text() for p in (a, b))
    assert canonical_json(ta) == canonical_json(tb)
    if name == "haar-tv":
        assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_seed_changes_output(tmp_path):
    _, a = _run(tmp_path / "a", "overlap", seed=1)
    _, b = _run(tmp_path / "b", "overlap", seed=2)
    assert canonical_json((a / "result.json").read_text()) != canonical_json((b / "result.json").read_text())


def test_haar_csv_files(tmp_path):
    _, out = _run(tmp_path, "haar-tv")
    with open(out / "sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == SWEEP_COLUMNS and len(rows) == 5
    with open(out / "plotdata.csv") as fh:
        assert next(csv.reader(fh)) == ["x", "y", "err"]


def test_scan_prints_value(tmp_path, capsys):
    _run(tmp_path, "dim-scan")
    assert capsys.readouterr().out.splitlines()[0].strip() == "6"


def test_conjecture_failure_is_a_finding(tmp_path):
    code = run(["su22-verify", "--n", "2", "--max-weight", "4", "--variant", "alternative", "--out", str(tmp_path)])
    assert code == 2
    assert read_result(tmp_path / "result.json").verdict == "finding"


@pytest.mark.parametrize("argv", [
    ["overlap", "--bogus"],
    ["no-such-command"],
    ["haar-tv", "--n", "2", "--m", "60", "--budget", "100"],
    ["dim-scan", "--p", "0"],
])
def test_errors_exit_one(tmp_path, argv):
    with pytest.raises(SystemExit) as ei:
        code = run([*argv, "--out", str(tmp_path)])
        raise SystemExit(code)
    assert ei.value.code == 1


def test_report_collects(tmp_path, capsys):
    _run(tmp_path, "dim-scan")
    _run(tmp_path, "count-fidelity")
    capsys.readouterr()
    assert run(["report", "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "dim-scan" in text and "count-fidelity" in text
    rep = json.loads((tmp_path / "report" / "result.json").read_text())
    assert len(rep["estimates"]["results"]) == 2


def test_result_roundtrip():
    r = ExperimentResult("x", "claim", {"a": 1}, 3, estimates={"v": 1.5}).finish()
    again = ExperimentResult.from_json_obj(json.loads(r.dumps()))
    assert again.dumps() == r.dumps()
    with pytest.raises(ValueError):
        ExperimentResult("x", "c", {}, 0).finish("maybe")


def test_module_entry_point(tmp_path):
    cmd = [sys.executable, "-m", "supq", "dim-scan", "--p", "1", "--q", "1", "--n", "1", "--d", "2", "--out", str(tmp_path)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines()[0].strip() == "3"
