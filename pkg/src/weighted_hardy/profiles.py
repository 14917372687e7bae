"""Radial test functions with analytic derivatives and the versioned corpus.

A manifest holds one function per line as ``kind;param1;param2``::

    power;0.75
    bump;1.0;0.5
    window;power:0.75;bump:1.5:1.2     # product of two functions
    sum;bump:1:0.5;bump:2.5:0.8         # sum of functions

Composite kinds take nested specs with ``:`` in place of ``;``.  Blank lines
and ``#`` comments are ignored.
"""
from __future__ import annotations

import math
from importlib import resources

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import ParameterError


def _fmt(x):
    return repr(float(x))


class TestFunction:
    """Base class for radial profiles ``u(|x|)`` on ]0, inf[."""

    __test__ = False  # keep pytest from collecting the class
    kind = "abstract"
    support = (0.0, math.inf)

    def __call__(self, r):
        raise NotImplementedError

    def derivative(self, r):
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec}>"

    def __eq__(self, other):
        return isinstance(other, TestFunction) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)


class Power(TestFunction):
    """``u(r) = r^gamma``."""

    kind = "power"

    def __init__(self, gamma):
        self.gamma = float(gamma)

    def __call__(self, r):
        return np.power(r, self.gamma)

    def derivative(self, r):
        if self.gamma == 0:
            return np.zeros_like(np.asarray(r, dtype=float))
        return self.gamma * np.power(r, self.gamma - 1)

    @property
    def spec(self):
        return f"power;{_fmt(self.gamma)}"


class Bump(TestFunction):
    """Smooth bump ``exp(-1 / (1 - s^2))``, ``s = (r - r0) / w``, supported in ]0, inf[."""

    kind = "bump"

    def __init__(self, r0, w):
        self.r0, self.w = float(r0), float(w)
        if not (self.w > 0 and self.r0 - self.w > 0):
            raise ParameterError(f"bump support [{r0 - w}, {r0 + w}] must lie in ]0, inf[")
        self.support = (self.r0 - self.w, self.r0 + self.w)

    def _parts(self, r):
        s = (np.asarray(r, dtype=float) - self.r0) / self.w
        inside = np.abs(s) < 1
        q = np.where(inside, 1 - s * s, 1.0)
        val = np.where(inside, np.exp(-1 / q), 0.0)
        return s, q, inside, val

    def __call__(self, r):
        return self._parts(r)[3]

    def derivative(self, r):
        s, q, inside, val = self._parts(r)
        return np.where(inside, val * (-2 * s / q**2) / self.w, 0.0)

    @property
    def spec(self):
        return f"bump;{_fmt(self.r0)};{_fmt(self.w)}"


class Tabulated(TestFunction):
    """Cubic Hermite interpolant of tabulated values and derivatives; zero off the grid.

    Derivative data must agree with central differences of the values to
    within 1e-3 of the largest derivative magnitude.
    """

    kind = "tabulated"

    def __init__(self, grid, values, derivatives):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        derivatives = np.asarray(derivatives, dtype=float)
        if grid.ndim != 1 or len(grid) < 3 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
            raise ParameterError("grid must be increasing, nonnegative, with >= 3 points")
        if values.shape != grid.shape or derivatives.shape != grid.shape:
            raise ParameterError("values/derivatives must match the grid")
        central = (values[2:] - values[:-2]) / (grid[2:] - grid[:-2])
        scale = max(np.max(np.abs(derivatives)), np.max(np.abs(central)), 1e-300)
        if np.max(np.abs(central - derivatives[1:-1])) > 1e-3 * scale:
            raise ParameterError("derivative table inconsistent with the values")
        self.grid, self.values, self.derivatives = grid, values, derivatives
        self._spline = CubicHermiteSpline(grid, values, derivatives, extrapolate=False)
        self._dspline = self._spline.derivative()
        self.support = (float(grid[0]), float(grid[-1]))

    def __call__(self, r):
        return np.nan_to_num(self._spline(r), nan=0.0)

    def derivative(self, r):
        return np.nan_to_num(self._dspline(r), nan=0.0)

    @property
    def spec(self):
        return f"tabulated;n={len(self.grid)};{_fmt(self.grid[0])};{_fmt(self.grid[-1])}"


class Sum(TestFunction):
    kind = "sum"

    def __init__(self, *terms):
        if not terms:
            raise ParameterError("sum needs at least one term")
        self.terms = tuple(terms)
        self.support = (min(t.support[0] for t in terms), max(t.support[1] for t in terms))

    def __call__(self, r):
        return sum(t(r) for t in self.terms)

    def derivative(self, r):
        return sum(t.derivative(r) for t in self.terms)

    @property
    def spec(self):
        return "sum;" + ";".join(t.spec.replace(";", ":") for t in self.terms)


class Product(TestFunction):
    """Pointwise product, used to window a power by a bump."""

    kind = "window"

    def __init__(self, first, second):
        self.first, self.second = first, second
        lo = max(first.support[0], second.support[0])
        hi = min(first.support[1], second.support[1])
        self.support = (lo, max(lo, hi))

    def __call__(self, r):
        return self.first(r) * self.second(r)

    def derivative(self, r):
        return self.first.derivative(r) * self.second(r) + self.first(r) * self.second.derivative(r)

    @property
    def spec(self):
        return f"window;{self.first.spec.replace(';', ':')};{self.second.spec.replace(';', ':')}"


class Scaled(TestFunction):
    """``s * u`` for a positive scalar ``s``."""

    kind = "scaled"

    def __init__(self, factor, inner):
        self.factor, self.inner = float(factor), inner
        self.support = inner.support

    def __call__(self, r):
        return self.factor * self.inner(r)

    def derivative(self, r):
        return self.factor * self.inner.derivative(r)

    @property
    def spec(self):
        return f"scaled;{_fmt(self.factor)};{self.inner.spec.replace(';', ':')}"


def _parse_tokens(tokens, line):
    """Recursive descent over ``:``-separated tokens; each kind has a fixed arity."""
    if not tokens:
        raise ParameterError(f"bad manifest entry {line!r}: truncated")
    kind = tokens.pop(0)
    if kind == "power":
        return Power(float(tokens.pop(0)))
    if kind == "bump":
        return Bump(float(tokens.pop(0)), float(tokens.pop(0)))
    if kind == "scaled":
        factor = float(tokens.pop(0))
        return Scaled(factor, _parse_tokens(tokens, line))
    if kind == "window":
        first = _parse_tokens(tokens, line)
        return Product(first, _parse_tokens(tokens, line))
    raise ParameterError(f"bad manifest entry {line!r}: unknown or unnestable kind {kind!r}")


def _parse_nested(text, line):
    tokens = [t.strip() for t in text.split(":")]
    fn = _parse_tokens(tokens, line)
    if tokens:
        raise ParameterError(f"bad manifest entry {line!r}: trailing {':'.join(tokens)!r}")
    return fn


def parse_spec(line: str) -> TestFunction:
    """Build a test function from one manifest line (or a nested ``:`` spec)."""
    parts = [s.strip() for s in line.split(";")]
    kind, args = parts[0], parts[1:]
    try:
        if len(parts) == 1:
            return _parse_nested(line, line)
        if kind == "power" and len(args) == 1:
            return Power(float(args[0]))
        if kind == "bump" and len(args) == 2:
            return Bump(float(args[0]), float(args[1]))
        if kind == "window" and len(args) == 2:
            return Product(_parse_nested(args[0], line), _parse_nested(args[1], line))
        if kind == "sum" and args:
            return Sum(*(_parse_nested(a, line) for a in args))
        if kind == "scaled" and len(args) == 2:
            return Scaled(float(args[0]), _parse_nested(args[1], line))
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"bad manifest entry {line!r}: {exc}") from exc
    raise ParameterError(f"bad manifest entry {line!r}")


def parse_manifest(text: str) -> list[TestFunction]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(parse_spec(line))
    return out


def format_manifest(functions, header="") -> str:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [f.spec for f in functions]
    return "\n".join(lines) + "\n"


def load_corpus(path=None) -> list[TestFunction]:
    """The versioned corpus shipped with the package, or a manifest at ``path``."""
    if path is None:
        text = resources.files("weighted_hardy").joinpath("data/corpus.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_manifest(text)


def default_corpus() -> list[TestFunction]:
    """Generator of the shipped corpus (50 functions).

    Every member lies in the weighted Sobolev space for all acceptance settings:
    bare powers have exponent above 1/2, everything else is compactly supported
    away from the origin.
    """
    fns: list[TestFunction] = [Power(g) for g in (0.6, 0.75, 0.9, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0)]
    for r0, w in [(0.2, 0.1), (0.5, 0.25), (0.5, 0.45), (1.0, 0.5), (1.0, 0.9), (1.5, 0.5),
                  (1.5, 1.2), (2.0, 1.0), (2.0, 0.3), (2.5, 1.5), (3.0, 1.0), (3.0, 2.5),
                  (0.05, 0.04), (0.1, 0.09), (0.8, 0.1), (1.2, 0.2), (4.0, 2.0), (0.3, 0.2),
                  (0.7, 0.6), (5.0, 4.5)]:
        fns.append(Bump(r0, w))
    for g, (r0, w) in [(0.75, (1.5, 1.2)), (-0.5, (1.0, 0.8)), (-2.0, (1.0, 0.5)), (2.0, (1.0, 0.9)),
                       (0.3, (0.5, 0.4)), (1.5, (2.0, 1.5)), (-1.0, (0.4, 0.3)), (3.0, (2.0, 1.0)),
                       (0.5, (3.0, 2.9)), (-0.25, (0.2, 0.15))]:
        fns.append(Product(Power(g), Bump(r0, w)))
    fns += [
        Sum(Bump(1.0, 0.5), Bump(2.0, 0.5)),
        Sum(Bump(0.5, 0.4), Bump(1.5, 1.0)),
        Sum(Power(1.0), Bump(1.0, 0.5)),
        Sum(Power(0.75), Power(2.0)),
        Sum(Bump(0.2, 0.1), Bump(0.25, 0.1)),
        Sum(Power(1.5), Scaled(3.0, Bump(0.6, 0.5))),
        Sum(Bump(1.0, 0.9), Scaled(0.5, Bump(3.0, 1.0))),
        Sum(Power(0.6), Scaled(2.0, Power(1.0))),
        Sum(Product(Power(-1.0), Bump(1.0, 0.8)), Bump(2.0, 1.5)),
        Sum(Bump(0.1, 0.05), Bump(4.0, 3.0), Bump(1.0, 0.2)),
    ]
    return fns
