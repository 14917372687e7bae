import csv

import numpy as np
import pytest

from weighted_hardy import ParameterError
from weighted_hardy.cli import parse_matrix, run


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_verify_hardy_example(tmp_path, capsys):
    out = tmp_path / "h"
    assert run(["verify-hardy", "--d", "3", "--p", "2", "--A", "identity", "--out", str(out)]) == 0
    rows = read_csv(out / "hardy.csv")
    assert len(rows) == 50
    assert all(float(r["deficit"]) >= -float(r["error_budget"]) for r in rows)
    assert (out / "summary.txt").exists()
    assert "PASS" in capsys.readouterr().out


def test_sweep_example(tmp_path):
    out = tmp_path / "s"
    assert run(["sweep-optimality", "--d", "1", "--p", "2", "--lambda", "0.3", "--A", "1",
                "--out", str(out)]) == 0
    summary = read_csv(out / "sweep_summary.csv")
    assert summary[0]["diverged"] == "true"
    rows = read_csv(out / "sweep.csv")
    assert {"gamma", "quotient"} <= set(rows[0])
    plots = sorted(p.name for p in (out / "plot").iterdir())
    assert plots and all(name.endswith(".dat") for name in plots)


def test_sweep_subcritical_passes(tmp_path):
    assert run(["sweep-optimality", "--d", "1", "--p", "2", "--lambda", "0.2", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "sweep_summary.csv")[0]["diverged"] == "false"


def test_poincare_precondition(tmp_path, capsys):
    assert run(["verify-poincare", "--d", "2", "--p", "2", "--out", str(tmp_path)]) == 1
    assert "p > d" in capsys.readouterr().err


def test_poincare_admissible(tmp_path):
    assert run(["verify-poincare", "--d", "1", "--p", "3", "--out", str(tmp_path)]) == 0


def test_usage_errors(tmp_path):
    assert run(["no-such-command"]) == 1
    assert run(["verify-hardy", "--p", "2", "--out", str(tmp_path)]) == 1
    assert run(["verify-hardy", "--d", "x", "--p", "2", "--out", str(tmp_path)]) == 1
    assert run(["verify-hardy", "--d", "2", "--p", "2", "--A", "1,2,3", "--out", str(tmp_path)]) == 1
    assert run(["verify-hardy", "--d", "2", "--p", "2", "--A", "1,2,0,1", "--out", str(tmp_path)]) == 1
    assert run(["verify-hardy", "--d", "2", "--p", "2", "--A", "diag:1,-1", "--out", str(tmp_path)]) == 1


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(["check-moments", "--d", "1", "--p", "2", "--out", str(blocker / "sub")]) == 1
    assert str(blocker) in capsys.readouterr().err


def test_failed_check_exit_code(tmp_path):
    # a sweep whose outcome contradicts lam > C: the grid stops before divergence
    assert run(["sweep-optimality", "--d", "1", "--p", "2", "--lambda", "0.2501", "--gamma-points", "5",
                "--out", str(tmp_path)]) == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "job.ini"
    cfg.write_text("[problem]\nd = 1\np = 2\nlambda = 0.3\n[output]\nout = %s\n" % (tmp_path / "a"))
    assert run(["sweep-optimality", "--config", str(cfg)]) == 0
    assert read_csv(tmp_path / "a" / "sweep_summary.csv")[0]["diverged"] == "true"
    assert run(["sweep-optimality", "--config", str(cfg), "--lambda", "0.2", "--out", str(tmp_path / "b")]) == 0
    assert read_csv(tmp_path / "b" / "sweep_summary.csv")[0]["diverged"] == "false"
    assert "lambda = 0.2" in (tmp_path / "b" / "summary.txt").read_text()


def test_bad_config(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[grid]\nbogus = 1\n")
    assert run(["check-moments", "--config", str(cfg), "--d", "1", "--p", "2"]) == 1
    cfg.write_text("not an ini file")
    assert run(["check-moments", "--config", str(cfg), "--d", "1", "--p", "2"]) == 1


def test_parse_matrix():
    assert np.array_equal(parse_matrix("identity", 2), np.eye(2))
    assert np.array_equal(parse_matrix("diag:1,4", 2), np.diag([1.0, 4.0]))
    assert np.array_equal(parse_matrix("[1, 0.5; 0.5, 2]", 2), np.array([[1, 0.5], [0.5, 2]]))
    with pytest.raises(ParameterError):
        parse_matrix("diag:1", 2)
    with pytest.raises(ParameterError):
        parse_matrix("a,b,c,d", 2)


def test_determinism(tmp_path):
    args = ["verify-hardy", "--d", "1", "--p", "1.5", "--seed", "7"]
    assert run(args + ["--out", str(tmp_path / "x")]) == 0
    assert run(args + ["--out", str(tmp_path / "y")]) == 0
    assert (tmp_path / "x" / "hardy.csv").read_bytes() == (tmp_path / "y" / "hardy.csv").read_bytes()


def test_seed_shuffles_corpus(tmp_path):
    run(["verify-hardy", "--d", "1", "--p", "2", "--out", str(tmp_path / "plain")])
    run(["verify-hardy", "--d", "1", "--p", "2", "--seed", "3", "--out", str(tmp_path / "shuf")])
    plain = [r["function"] for r in read_csv(tmp_path / "plain" / "hardy.csv")]
    shuf = [r["function"] for r in read_csv(tmp_path / "shuf" / "hardy.csv")]
    assert plain != shuf and sorted(plain) == sorted(shuf)


def test_simulate_pde_artifacts(tmp_path):
    out = tmp_path / "pde"
    code = run(["simulate-pde", "--p", "1.5", "--lambda", "0", "--nodes", "100", "--dt", "0.02", "--T", "0.4",
                "--snapshot-every", "5", "--out", str(out)])
    assert code == 0
    hist = read_csv(out / "pde_history.csv")
    assert len(hist) == 21
    assert all(float(r["norm"]) <= float(r["bound"]) * 1.1 for r in hist)
    assert (out / "report.json").exists()
    assert read_csv(out / "snapshots.csv")[0].keys() == {"t", "x", "u"}
    assert {"pde_history_norm.dat", "pde_history_bound.dat"} <= {p.name for p in (out / "plot").iterdir()}


def test_probe_nonexistence(tmp_path):
    assert run(["probe-nonexistence", "--p", "1.5", "--lambda", "0.1", "--nodes", "100", "--dt", "0.02",
                "--T", "0.4", "--out", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "gk_probe.csv")) > 0


def test_csv_cells():
    from weighted_hardy.reporting import _cell
    assert [_cell(v) for v in (True, np.bool_(False), np.int64(3), 0.1, np.float64(2.5), None, "x")] == \
        ["true", "false", "3", "0.1", "2.5", "", "x"]
