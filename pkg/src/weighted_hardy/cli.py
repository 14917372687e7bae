"""Command-line front end.

    weighted-hardy verify-hardy --d 3 --p 2 --A identity --out results/
    weighted-hardy sweep-optimality --d 1 --p 2 --lambda 0.3 --A 1
    weighted-hardy simulate-pde --p 1.5 --lambda 0.385 --m 1e4 --nodes 400 --dt 1e-3 --T 2

Exit status: 0 when every check passes, 2 when some inequality or consistency
check fails, 1 for usage, configuration or I/O errors.  A ``--config`` file
(INI syntax, sections ``problem``, ``grid``, ``pde``, ``forcing``, ``output``)
may supply any option under its flag name; flags given on the command line win.
"""
from __future__ import annotations

import argparse
import configparser
import logging
import math
import sys

import numpy as np

from . import __version__
from .errors import InfiniteMeasureError, MembershipError, ParameterError, PreconditionError
from .functionals import (ckn_a_deficit, ckn_beta_deficit, hardy_deficit, poincare_report)
from .measure import ProblemParams, hardy_constant
from .optimality import CSV_COLUMNS, optimality_sweep
from .pkolmogorov import (Grid1D, PdeConfig, gk_nonexistence_probe, solve, write_snapshots)
from .profiles import Bump, load_corpus
from .quad import moment_comparison
from .reporting import CheckResult, emit_report

log = logging.getLogger(__name__)

# a corpus entry outside the function space of the current setting is skipped, not failed
NOT_ADMISSIBLE = (MembershipError, InfiniteMeasureError)

COMMANDS = ("verify-hardy", "verify-ckn", "verify-poincare", "sweep-optimality", "check-moments",
            "simulate-pde", "probe-nonexistence")

# option name -> (type, default); None defaults are resolved per command
OPTIONS = {
    "d": (int, None),
    "p": (float, None),
    "A": (str, "identity"),
    "c": (float, 1.0),
    "lambda": (float, None),
    "gamma_points": (int, None),
    "M": (float, 10.0),
    "a": (float, None),
    "beta": (float, None),
    "xmin": (float, 1e-3),
    "xmax": (float, None),
    "nodes": (int, 400),
    "grading": (float, 3.0),
    "dt": (float, 1e-3),
    "T": (float, 1.0),
    "m": (float, 1e4),
    "delta": (float, 1e-8),
    "theta": (float, 1.0),
    "bc": (str, "dirichlet"),
    "u0_center": (float, 0.5),
    "u0_width": (float, 0.4),
    "u0_amplitude": (float, 1.0),
    "forcing_amplitude": (float, 0.0),
    "forcing_center": (float, 1.0),
    "forcing_width": (float, 0.5),
    "phi_center": (float, 0.8),
    "phi_width": (float, 0.6),
    "min_offset": (float, 1e-6),
    "snapshot_every": (int, 10),
    "out": (str, "weighted_hardy_out"),
    "tol": (float, None),
    "seed": (int, None),
    "corpus": (str, None),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_matrix(text: str, d: int) -> np.ndarray:
    """``identity``, ``diag:a,b,...`` or a row-major list of ``d*d`` numbers."""
    text = text.strip()
    if text == "identity":
        return np.eye(d)
    try:
        if text.startswith("diag:"):
            vals = [float(v) for v in text[5:].split(",")]
            if len(vals) != d:
                raise ParameterError(f"diag needs {d} entries, got {len(vals)}")
            return np.diag(vals)
        vals = [float(v) for v in text.strip("[]").replace(";", ",").replace(" ", ",").split(",") if v]
    except ValueError as exc:
        raise ParameterError(f"cannot parse matrix {text!r}") from exc
    if len(vals) != d * d:
        raise ParameterError(f"matrix literal needs {d * d} entries, got {len(vals)}")
    return np.array(vals).reshape(d, d)


def build_parser():
    parser = _Parser(prog="weighted-hardy", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = _Parser(add_help=False)
    for name in OPTIONS:
        common.add_argument("--" + name.replace("_", "-"), dest=name, type=str, default=None)
    common.add_argument("--config", default=None)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common])
    return parser


def resolve_options(ns) -> dict:
    """Merge defaults, config file and flags (flags win) into typed values."""
    merged = {name: default for name, (_, default) in OPTIONS.items()}
    if ns.config:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            with open(ns.config) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise UsageError(f"cannot read config {ns.config!r}: {exc}") from exc
        for section in cp.sections():
            for key, value in cp.items(section):
                name = key.replace("-", "_")
                if section == "forcing" and not name.startswith("forcing_"):
                    name = "forcing_" + name
                if name not in OPTIONS:
                    raise UsageError(f"unknown config key {key!r} in section [{section}]")
                merged[name] = value
    for name in OPTIONS:
        value = getattr(ns, name)
        if value is not None:
            merged[name] = value
    out = {}
    for name, (typ, _) in OPTIONS.items():
        value = merged[name]
        if value is None or typ is str:
            out[name] = value
            continue
        try:
            out[name] = typ(float(value)) if typ is int else typ(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"option {name}: cannot parse {value!r}") from exc
    return out


def _params(opts, default_d=None):
    d = opts["d"] if opts["d"] is not None else default_d
    if d is None or opts["p"] is None:
        raise UsageError("--d and --p are required")
    return ProblemParams(d, opts["p"], parse_matrix(opts["A"], d), opts["c"])


def _corpus(opts):
    fns = load_corpus(opts["corpus"])
    order = list(range(len(fns)))
    if opts["seed"] is not None:
        order = [int(i) for i in np.random.default_rng(opts["seed"]).permutation(len(fns))]
    return [(i, fns[i]) for i in order]


def _status(report):
    return "ok" if report.holds else "violated"


def cmd_verify_hardy(opts):
    params = _params(opts)
    rows, failed, skipped = [], 0, 0
    for i, u in _corpus(opts):
        try:
            r = hardy_deficit(u, params, rel_tol=opts["tol"])
        except NOT_ADMISSIBLE as exc:
            skipped += 1
            log.info("%s not admissible: %s", u.spec, exc)
            rows.append((i, u.spec, None, None, None, None, None, None, "not-admissible"))
            continue
        failed += not r.holds
        rows.append((i, u.spec, r.gradient_term, r.hardy_term, r.drift_term, r.constant, r.deficit,
                     r.error_budget, _status(r)))
    ok = [r for r in rows if r[-1] != "not-admissible"]
    res = CheckResult(
        "hardy",
        ("index", "function", "gradient_term", "hardy_term", "drift_term", "constant", "deficit",
         "error_budget", "status"),
        rows, failed == 0,
        f"{len(ok) - failed}/{len(ok)} deficits >= -budget ({skipped} not admissible), C={hardy_constant(params.d, params.p)!r}",
        {"deficit": ([r[0] for r in ok], [r[6] for r in ok])},
    )
    return [res]


def cmd_verify_ckn(opts):
    params = _params(opts)
    p = params.p
    variants = []
    if opts["a"] is not None or opts["beta"] is None:
        a = 0.0 if opts["a"] is None else opts["a"]
        variants.append(("a", a, lambda u, a=a: ckn_a_deficit(u, params, a, opts["tol"])))
    if opts["beta"] is not None:
        b = opts["beta"]
        variants.append(("beta", b, lambda u, b=b: ckn_beta_deficit(u, params, b, opts["tol"])))
    rows, red_rows, failed = [], [], 0
    for i, u in _corpus(opts):
        reports = {}
        for kind, value, fn in variants:
            try:
                r = fn(u)
            except NOT_ADMISSIBLE:
                rows.append((i, u.spec, kind, value, None, None, None, None, None, None, "not-admissible"))
                continue
            reports[kind] = r
            failed += not r.holds
            rows.append((i, u.spec, kind, value, r.gradient_term, r.hardy_term, r.drift_term, r.constant,
                         r.deficit, r.error_budget, _status(r)))
        # reduction identities: a = 0 and beta = 0 give Hardy, beta = p a gives the a-variant
        pairs = []
        for kind, value, _ in variants:
            if value == 0 and kind in reports:
                pairs.append((kind, "hardy", reports[kind], None))
        if "a" in reports and "beta" in reports and math.isclose(opts["beta"], p * variants[0][1]):
            pairs.append(("beta", "a", reports["beta"], reports["a"]))
        for left, right, r1, r2 in pairs:
            if r2 is None:
                try:
                    r2 = hardy_deficit(u, params, opts["tol"])
                except NOT_ADMISSIBLE:
                    continue
            diff = abs(r1.deficit - r2.deficit)
            allowed = 2 * (r1.error_budget + r2.error_budget)
            good = diff <= allowed
            failed += not good
            red_rows.append((i, u.spec, left, right, r1.deficit, r2.deficit, diff, allowed, good))
    results = [CheckResult(
        "ckn",
        ("index", "function", "variant", "parameter", "gradient_term", "singular_term", "drift_term",
         "constant", "deficit", "error_budget", "status"),
        rows, all(r[-1] != "violated" for r in rows),
        f"{sum(r[-1] == 'ok' for r in rows)} ok, {sum(r[-1] == 'violated' for r in rows)} violated, "
        f"{sum(r[-1] == 'not-admissible' for r in rows)} not admissible",
    )]
    if red_rows:
        results.append(CheckResult(
            "ckn_reduction",
            ("index", "function", "variant", "reference", "deficit", "reference_deficit", "difference",
             "allowed", "ok"),
            red_rows, all(r[-1] for r in red_rows),
            f"{sum(r[-1] for r in red_rows)}/{len(red_rows)} reduction identities within 2x budgets",
        ))
    return results


def cmd_verify_poincare(opts):
    params = _params(opts)
    if not params.p > params.d:
        raise PreconditionError(f"verify-poincare needs p > d (p={params.p}, d={params.d})")
    if not params.positive_definite:
        raise PreconditionError("verify-poincare needs a positive definite A")
    rows, failed = [], 0
    for i, u in _corpus(opts):
        try:
            r = poincare_report(u, params, opts["tol"])
        except NOT_ADMISSIBLE:
            rows.append((i, u.spec, None, None, None, None, None, "not-admissible"))
            continue
        good = r.deficit >= -r.error_budget
        failed += not good
        rows.append((i, u.spec, r.gradient_term, r.mass_term, r.constant, r.deficit, r.error_budget,
                     "ok" if good else "violated"))
    ok = [r for r in rows if r[-1] != "not-admissible"]
    return [CheckResult(
        "poincare",
        ("index", "function", "gradient_term", "mass_term", "constant", "deficit", "error_budget", "status"),
        rows, failed == 0, f"{len(ok) - failed}/{len(ok)} deficits >= -budget",
        {"deficit": ([r[0] for r in ok], [r[5] for r in ok])},
    )]


def cmd_sweep_optimality(opts):
    params = _params(opts)
    if opts["lambda"] is None:
        raise UsageError("--lambda is required")
    lam = opts["lambda"]
    C = hardy_constant(params.d, params.p)
    sweep = optimality_sweep(lam, params, n_points=opts["gamma_points"], M=opts["M"],
                             min_offset=opts["min_offset"], rel_tol=opts["tol"])
    expected = lam > C
    consistent = sweep.diverged == expected
    summary_row = (lam, C, opts["M"], sweep.diverged, sweep.crossing_gamma, len(sweep.failures),
                   sweep.breakdown or "")
    text = (f"lambda={lam!r} C={C!r} diverged={str(sweep.diverged).lower()}"
            + (f" crossing_gamma={sweep.crossing_gamma!r}" if sweep.crossing_gamma is not None else ""))
    if not consistent:
        text += " (expected divergence iff lambda > C)"
    res = [
        CheckResult("sweep", CSV_COLUMNS, list(sweep.rows()), consistent, text,
                    {"quotient": (sweep.gamma_values, sweep.quotients)}),
        CheckResult("sweep_summary", ("lambda", "C", "M", "diverged", "crossing_gamma", "failures",
                                      "breakdown"), [summary_row], consistent, text),
    ]
    if sweep.bounds:
        res.append(CheckResult(
            "sweep_bounds", ("gamma", "quotient", "upper", "lower", "displayed_upper"),
            [(g, q) + tuple(b) for g, q, b in zip(sweep.gamma_values, sweep.quotients, sweep.bounds)],
            True, "closed-form bounds for anisotropic A"))
    return res


def cmd_check_moments(opts):
    if opts["d"] is None or opts["p"] is None:
        raise UsageError("--d and --p are required")
    d, p = opts["d"], opts["p"]
    tol = opts["tol"] if opts["tol"] is not None else (1e-8 if d == 1 else 1e-5)
    rows = moment_comparison(d, p)
    worst = max(r[4] for r in rows)
    return [CheckResult("moments", ("beta", "alpha", "closed_form", "quadrature", "rel_error"), rows,
                        worst <= tol, f"max relative error {worst:.3e} (tolerance {tol:.0e})")]


def _pde_setup(opts):
    if opts["d"] not in (None, 1):
        raise PreconditionError("the parabolic solver is one-dimensional (d = 1)")
    if opts["p"] is None:
        raise UsageError("--p is required")
    alpha = float(parse_matrix(opts["A"], 1)[0, 0])
    if alpha < 0:
        raise ParameterError("A must be nonnegative")
    p = opts["p"]
    lam = 0.0 if opts["lambda"] is None else opts["lambda"]
    grid = Grid1D.graded(opts["nodes"], p, x_min=opts["xmin"], x_max=opts["xmax"], grading=opts["grading"],
                         alpha=alpha, c=opts["c"])
    cfg = PdeConfig(p=p, lam=lam, m=opts["m"], dt=opts["dt"], T=opts["T"], delta=opts["delta"],
                    theta=opts["theta"], bc=opts["bc"])
    u0 = opts["u0_amplitude"] * Bump(opts["u0_center"], opts["u0_width"])(grid.x)
    f = None
    if opts["forcing_amplitude"] > 0:
        fb = Bump(opts["forcing_center"], opts["forcing_width"])
        amp = opts["forcing_amplitude"]

        def f(t, x):
            return amp * fb(x)

    return grid, cfg, u0, f


def _pde_results(report, grid, cfg):
    hist = np.array(report.history)
    bound = np.array(report.bound_history)
    C = hardy_constant(1, cfg.p)
    slack = 1 + 5 * grid.dx
    within = bool(np.all(hist[:, 1] <= bound[:, 1] * slack))
    rows = [(t, n, b, n <= b * slack) for (t, n), (_, b) in zip(report.history, report.bound_history)]
    if cfg.lam <= C:
        passed = within and not report.aborted and not report.blowup
        verdict = f"lambda <= C(1,p): growth bound {'respected' if within else 'VIOLATED'}"
    else:
        passed = not report.aborted
        verdict = (f"lambda > C(1,p): blow-up {'detected at t=%.6g' % report.blowup_time if report.blowup else 'not detected'}"
                   + ("" if 1 < cfg.p < 2 else " (exploratory, p >= 2)"))
    text = (f"{verdict}; {report.refinement_tag}; clipped={report.clipped}; "
            f"rejected={report.rejected_steps}; boundary: {report.boundary}")
    if report.aborted:
        text += f"; aborted: {report.abort_reason}"
    return CheckResult("pde_history", ("t", "norm", "bound", "within_bound"), rows, passed, text,
                       {"norm": (hist[:, 0], hist[:, 1]), "bound": (bound[:, 0], bound[:, 1])})


def cmd_simulate_pde(opts):
    grid, cfg, u0, f = _pde_setup(opts)
    report = solve(cfg, grid, u0, f, store_states=True)
    res = _pde_results(report, grid, cfg)
    return [res], report, grid


def cmd_probe_nonexistence(opts):
    grid, cfg, u0, f = _pde_setup(opts)
    if not 1 < cfg.p < 2:
        raise PreconditionError("the g_k probe needs 1 < p < 2")
    report = solve(cfg, grid, u0, f, store_states=True, stop_on_blowup=False)
    phi = Bump(opts["phi_center"], opts["phi_width"])
    t_end = report.times[-1]
    n = len(report.times) - 1
    probe_times = sorted({report.times[max(1, n // 4)], report.times[max(1, n // 2)], t_end})
    rows, good = [], True
    for t in probe_times:
        last = -math.inf
        for k in (1, 4, 16):
            q = gk_nonexistence_probe(report, phi, k, t, cfg, grid)
            mono = q.lhs_growth >= last
            last = q.lhs_growth
            good &= q.holds and mono
            rows.append((k, q.t, q.lhs_growth, q.rhs_cap, q.budget, q.ratio, q.holds, mono))
    res = CheckResult("gk_probe", ("k", "t", "lhs_growth", "rhs_cap", "budget", "ratio", "holds",
                                   "monotone_in_k"), rows, good,
                      f"{sum(r[6] for r in rows)}/{len(rows)} probes hold, monotone in k: "
                      f"{str(all(r[7] for r in rows)).lower()}")
    return [res, _pde_results(report, grid, cfg)], report, grid


def run(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        opts = resolve_options(ns)
        header = [f"command: {ns.command}"] + [f"{k} = {v}" for k, v in sorted(opts.items()) if v is not None]
        report = grid = None
        if ns.command == "verify-hardy":
            results = cmd_verify_hardy(opts)
        elif ns.command == "verify-ckn":
            results = cmd_verify_ckn(opts)
        elif ns.command == "verify-poincare":
            results = cmd_verify_poincare(opts)
        elif ns.command == "sweep-optimality":
            results = cmd_sweep_optimality(opts)
        elif ns.command == "check-moments":
            results = cmd_check_moments(opts)
        elif ns.command == "simulate-pde":
            results, report, grid = cmd_simulate_pde(opts)
        else:
            results, report, grid = cmd_probe_nonexistence(opts)
        emit_report(results, opts["out"], header)
        if report is not None:
            with open(f"{opts['out']}/report.json", "w") as fh:
                fh.write(report.to_json() + "\n")
            write_snapshots(report, grid, f"{opts['out']}/snapshots.csv", every=opts["snapshot_every"])
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ParameterError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.summary}")
    print(f"artifacts written to {opts['out']}")
    return 0 if all(r.passed for r in results) else 2


def main():
    sys.exit(run())


__all__ = ["main", "parse_matrix", "run"]
