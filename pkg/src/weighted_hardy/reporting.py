"""Writing check results to an output directory.

Each check becomes ``<name>.csv`` (header row, comma separated, shortest
round-trip floats, LF line ends) plus optional two-column ``plot/<name>_<series>.dat``
files; ``summary.txt`` collects one status line per check and the run header.
"""
from __future__ import annotations

import os

import numpy as np
from dataclasses import dataclass, field


@dataclass
class CheckResult:
    name: str
    header: tuple
    rows: list
    passed: bool
    summary: str = ""
    plots: dict = field(default_factory=dict)  # series name -> (x values, y values)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, np.integer):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def emit_report(results, directory, header_lines=()):
    """Write ``summary.txt``, one CSV per check and the plot data; returns the written paths."""
    written = []
    try:
        os.makedirs(directory, exist_ok=True)
        for res in results:
            path = os.path.join(directory, f"{res.name}.csv")
            write_csv(path, res.header, res.rows)
            written.append(path)
            for series, (xs, ys) in sorted(res.plots.items()):
                plot_dir = os.path.join(directory, "plot")
                os.makedirs(plot_dir, exist_ok=True)
                path = os.path.join(plot_dir, f"{res.name}_{series}.dat")
                with open(path, "w") as fh:
                    for x, y in zip(xs, ys):
                        fh.write(f"{float(x)!r} {float(y)!r}\n")
                written.append(path)
        path = os.path.join(directory, "summary.txt")
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            for res in results:
                status = "PASS" if res.passed else "FAIL"
                fh.write(f"{status} {res.name}: {res.summary}\n")
            if not results:
                fh.write("no checks were run\n")
        written.append(path)
    except OSError as exc:
        raise OSError(f"cannot write report to {directory!r}: {exc}") from exc
    return written
