"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criteria 2 to 5 run through the command-line front end so that criterion 8
can rerun them and compare the CSV artifacts byte for byte.
"""
import csv
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from weighted_hardy import (Bump, Grid1D, PdeConfig, ProblemParams, gk_nonexistence_probe, hardy_constant,
                            solve, steklov_average, threshold_bisection, weak_residual)
from weighted_hardy.cli import run

C15 = hardy_constant(1, 1.5)

HARDY_CASES = [("1", "2", "1"), ("1", "1.5", "1"), ("3", "2", "identity"), ("2", "3", "diag:1,4")]
CKN_CASES = [("a0", lambda p: ["--a", "0"]), ("beta0", lambda p: ["--beta", "0"]),
             ("beta_pa", lambda p: ["--a", "0.25", "--beta", repr(0.25 * p)])]
SWEEP_CASES = [(1, 2.0), (1, 1.5), (3, 2.0)]
PDE_GRIDS = [(400, 1e-2, 1e-3), (800, 5e-3, 5e-4)]  # nodes, subcritical dt, supercritical dt


def _jobs():
    """(name, argv) for every CLI job behind criteria 2 to 5."""
    jobs = [("moments_d1_p2", ["check-moments", "--d", "1", "--p", "2"]),
            ("moments_d1_p1.5", ["check-moments", "--d", "1", "--p", "1.5"]),
            ("moments_d3_p2", ["check-moments", "--d", "3", "--p", "2"])]
    for d, p, A in HARDY_CASES:
        jobs.append((f"hardy_{d}_{p}_{A}", ["verify-hardy", "--d", d, "--p", p, "--A", A]))
    for tag, extra in CKN_CASES:
        jobs.append((f"ckn_{tag}", ["verify-ckn", "--d", "3", "--p", "2"] + extra(2.0)))
        jobs.append((f"ckn1_{tag}", ["verify-ckn", "--d", "1", "--p", "1.5"] + extra(1.5)))
    for d, p in SWEEP_CASES:
        C = hardy_constant(d, p)
        for f in (1.1, 0.9):
            jobs.append((f"sweep_{d}_{p}_{f}", ["sweep-optimality", "--d", str(d), "--p", str(p),
                                                "--lambda", repr(f * C), "--min-offset", "1e-6"]))
    for n, dt_sub, dt_sup in PDE_GRIDS:
        for f in (0.0, 0.5):
            jobs.append((f"pde_{n}_{f}", ["simulate-pde", "--p", "1.5", "--lambda", repr(f * C15),
                                          "--nodes", str(n), "--dt", repr(dt_sub), "--T", "2",
                                          "--u0-center", "0.5", "--u0-width", "0.4"]))
        jobs.append((f"pde_{n}_2", ["simulate-pde", "--p", "1.5", "--lambda", repr(2 * C15), "--m", "1e4",
                                    "--nodes", str(n), "--dt", repr(dt_sup), "--T", "1",
                                    "--u0-center", "0.02", "--u0-width", "0.015", "--u0-amplitude", "0.01"]))
    return jobs


def _run_all(root: Path):
    codes = {}
    for name, argv in _jobs():
        codes[name] = run(argv + ["--out", str(root / name)])
    return codes


@pytest.fixture(scope="module")
def cli_runs(tmp_path_factory):
    root = tmp_path_factory.mktemp("acceptance")
    start = time.perf_counter()
    codes = _run_all(root)
    return root, codes, time.perf_counter() - start


def verdict(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_criterion_1_sharp_constant(capsys):
    a = hardy_constant(3, 2)
    b = hardy_constant(1, 1.5)
    ok = a == 0.25 and abs(b - (1 / 3) ** 1.5) <= 1e-15
    verdict(capsys, 1, ok, f"C(3,2)={a!r}, C(1,1.5)={b!r}")


def test_criterion_2_moments(capsys, cli_runs):
    root, codes, _ = cli_runs
    worst = {}
    for name in ("moments_d1_p2", "moments_d1_p1.5", "moments_d3_p2"):
        worst[name] = max(float(r["rel_error"]) for r in rows(root / name / "moments.csv"))
    ok = (all(codes[n] == 0 for n in worst) and worst["moments_d1_p2"] <= 1e-8
          and worst["moments_d1_p1.5"] <= 1e-8 and worst["moments_d3_p2"] <= 1e-5)
    verdict(capsys, 2, ok, "max rel errors " + ", ".join(f"{k}={v:.1e}" for k, v in worst.items()))


def test_criterion_3_inequality_suite(capsys, cli_runs):
    root, codes, _ = cli_runs
    parts, ok = [], True
    for d, p, A in HARDY_CASES:
        name = f"hardy_{d}_{p}_{A}"
        table = rows(root / name / "hardy.csv")
        good = sum(r["status"] == "ok" for r in table)
        ok &= codes[name] == 0 and good == 50
        parts.append(f"({d},{p},{A}) {good}/50")
    red = 0
    for tag, _ in CKN_CASES:
        for prefix in ("ckn", "ckn1"):
            name = f"{prefix}_{tag}"
            table = rows(root / name / "ckn_reduction.csv")
            ok &= codes[name] == 0 and len(table) > 0 and all(r["ok"] == "true" for r in table)
            red += len(table)
    verdict(capsys, 3, ok, "; ".join(parts) + f"; {red} CKN reduction identities within 2x budgets")


def test_criterion_4_optimality(capsys, cli_runs):
    root, codes, _ = cli_runs
    ok, parts = True, []
    for d, p in SWEEP_CASES:
        up = rows(root / f"sweep_{d}_{p}_1.1" / "sweep_summary.csv")[0]
        down = rows(root / f"sweep_{d}_{p}_0.9" / "sweep_summary.csv")[0]
        lo, hi = threshold_bisection(ProblemParams.isotropic(d, p), M=10.0, offset=1e-6)
        C = hardy_constant(d, p)
        bracket = 0.95 * C <= lo and hi <= 1.05 * C
        ok &= (up["diverged"] == "true" and down["diverged"] == "false" and bracket
               and codes[f"sweep_{d}_{p}_1.1"] == 0 and codes[f"sweep_{d}_{p}_0.9"] == 0)
        parts.append(f"(d={d},p={p}) bracket [{lo / C:.4f}, {hi / C:.4f}]C")
    verdict(capsys, 4, ok, "1.1C diverges, 0.9C bounded; " + "; ".join(parts))


def test_criterion_5_pde_dichotomy(capsys, cli_runs):
    root, codes, elapsed = cli_runs
    ok, parts, times = True, [], []
    for n, _, _ in PDE_GRIDS:
        dx = Grid1D.graded(n, 1.5).dx
        for f in (0.0, 0.5):
            hist = rows(root / f"pde_{n}_{f}" / "pde_history.csv")
            worst = max(float(r["norm"]) / float(r["bound"]) for r in hist)
            ok &= codes[f"pde_{n}_{f}"] == 0 and worst <= 1 + 5 * dx
            parts.append(f"N={n} lam={f}C max norm/bound={worst:.6f}")
        rep = json.loads((root / f"pde_{n}_2" / "report.json").read_text())
        ok &= rep["blowup"] and codes[f"pde_{n}_2"] == 0
        times.append(rep["blowup_time"])
    agree = None not in times and abs(times[0] - times[1]) <= 0.2 * max(times)
    verdict(capsys, 5, ok and agree,
            "; ".join(parts) + f"; lam=2C blow-up times {times} (CLI jobs for criteria 2-5: {elapsed:.0f} s)")


def test_criterion_6_weak_form(capsys):
    class Phi:
        b = Bump(1.5, 1.0)

        def __call__(self, t, x):
            return (1 + t) * self.b(x)

        def dt(self, t, x):
            return self.b(x)

    res = []
    for n, dt in ((200, 0.02), (400, 0.01)):
        g = Grid1D.graded(n, 2.0, grading=1.0)
        cfg = PdeConfig(p=2.0, lam=0.0, m=1e4, dt=dt, T=1.0)
        rep = solve(cfg, g, Bump(1.0, 0.6)(g.x), store_states=True)
        res.append(abs(weak_residual(rep, Phi(), 0.0, 1.0, cfg, g)))
    order = math.log2(res[0] / res[1])
    bad = [s + np.where((g.x > 1.0) & (g.x < 1.5), 1.0, 0.0) for s in rep.states]
    control = abs(weak_residual(rep, Phi(), 0.0, 1.0, cfg, g, states=bad))
    verdict(capsys, 6, order >= 0.8 and control > 0.1,
            f"residuals {res[0]:.3e} -> {res[1]:.3e}, order {order:.2f}, corrupted control {control:.3f}")


def test_criterion_7_steklov_gk(capsys):
    t = np.linspace(0, 2, 4001)
    errs = []
    for h in (0.1, 0.05, 0.025):
        ts, vh = steklov_average(t, np.exp(t), h)
        common = ts <= 1.0
        errs.append(np.max(np.abs(vh - np.exp(ts))[common]))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    phi = Bump(0.8, 0.6)
    n_probes, all_hold, mono = 0, True, True
    for lam in (0.0, 0.5 * C15, 0.9 * C15):
        g = Grid1D.graded(400, 1.5)
        cfg = PdeConfig(p=1.5, lam=lam, m=1e4, dt=1e-2, T=2.0)
        rep = solve(cfg, g, Bump(0.5, 0.4)(g.x), store_states=True)
        for tt in (0.5, 1.0, 2.0):
            probes = [gk_nonexistence_probe(rep, phi, k, tt, cfg, g) for k in (1, 4, 16)]
            n_probes += len(probes)
            all_hold &= all(q.holds for q in probes)
            mono &= probes[0].lhs_growth <= probes[1].lhs_growth <= probes[2].lhs_growth
    ok = min(orders) >= 1 and all_hold and mono
    verdict(capsys, 7, ok, f"Steklov orders {orders[0]:.3f}, {orders[1]:.3f}; "
                           f"{n_probes} g_k probes hold={all_hold}, monotone in k={mono}")


def test_criterion_8_determinism(capsys, cli_runs, tmp_path):
    root, _, _ = cli_runs
    _run_all(tmp_path)
    compared, differing = 0, []
    for first in sorted(root.rglob("*.csv")):
        second = tmp_path / first.relative_to(root)
        compared += 1
        if not second.exists() or second.read_bytes() != first.read_bytes():
            differing.append(str(first.relative_to(root)))
    verdict(capsys, 8, compared > 0 and not differing,
            f"{compared} CSV files compared, {len(differing)} differ {differing[:3]}")
