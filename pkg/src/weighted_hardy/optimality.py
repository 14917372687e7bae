"""Numerical sharpness check for the Hardy constant.

For ``phi(x) = |x|^gamma`` the shifted quotient

    Q(gamma) = [ int |grad phi|^p + lam^(1-1/p) sgn(d-p) int |phi|^p (x^T A x)^(p/2)/|x|^p
                 - lam int |phi|^p / |x|^p ] / int |phi|^p

is computed by quadrature on a grid of exponents approaching the critical
value ``1 - d/p``.  For ``lam > C(d, p)`` the quotient falls below every
level, for ``lam <= C(d, p)`` it stays bounded.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoWitnessFound, PreconditionError
from .functionals import (check_window, closed_form_power_functional, gamma_window,
                          integrate_profile, coarse_sandwich_bound, sgn_factor)
from .measure import ProblemParams, hardy_constant
from .profiles import Power

OFFSET_FLOOR = 1e-8
CSV_COLUMNS = ("gamma", "quotient", "grad_term", "drift_term", "hardy_term", "denom", "err_budget")


@dataclass(frozen=True)
class QuotientTerms:
    gamma: float
    lam: float
    grad_term: float
    drift_term: float
    hardy_term: float
    denom: float
    err_budget: float
    drift_coef: float

    @property
    def quotient(self) -> float:
        num = self.grad_term + self.drift_coef * self.drift_term - self.lam * self.hardy_term
        return num / self.denom


def quotient_terms(gamma: float, lam: float, params: ProblemParams, rel_tol=None) -> QuotientTerms:
    """The four integrals of the shifted quotient of ``|x|^gamma``, with an error budget."""
    d, p = params.d, params.p
    check_window(gamma, d, p)
    if lam < 0:
        raise PreconditionError("lam must be nonnegative")
    phi = Power(gamma)
    support = (0.0, math.inf)
    absphi_p = lambda r: np.abs(phi(r)) ** p  # noqa: E731
    absdphi_p = lambda r: np.abs(phi.derivative(r)) ** p  # noqa: E731
    grad, e_grad = integrate_profile(absdphi_p, params, 0.0, rel_tol, support)
    hardy, e_hardy = integrate_profile(absphi_p, params, p, rel_tol, support)
    denom, e_denom = integrate_profile(absphi_p, params, 0.0, rel_tol, support)
    if params.is_zero:
        drift, e_drift = 0.0, 0.0
    else:
        drift, e_drift = integrate_profile(absphi_p, params, 0.0, rel_tol, support, directional=True)
    coef = lam ** (1 - 1 / p) * sgn_factor(d, p)
    num = grad + coef * drift - lam * hardy
    budget = (e_grad + abs(coef) * e_drift + lam * e_hardy) / denom + abs(num / denom) * e_denom / denom
    return QuotientTerms(gamma, lam, grad, drift, hardy, denom, budget, coef)


def shifted_quotient(gamma: float, lam: float, params: ProblemParams, rel_tol=None) -> float:
    return quotient_terms(gamma, lam, params, rel_tol).quotient


@dataclass
class SweepResult:
    lam: float
    M: float
    gamma_values: list = field(default_factory=list)
    offsets: list = field(default_factory=list)
    quotients: list = field(default_factory=list)
    terms: list = field(default_factory=list)
    bounds: list = field(default_factory=list)
    failures: dict = field(default_factory=dict)
    diverged: bool = False
    crossing_gamma: float | None = None
    breakdown: str | None = None

    def rows(self):
        for t in self.terms:
            yield (t.gamma, t.quotient, t.grad_term, t.drift_term, t.hardy_term, t.denom, t.err_budget)


def sweep_offsets(d, p, n_points=None, min_offset=1e-6):
    """Offsets ``width * 2^-k`` (k = 1, 2, ...) from the critical exponent."""
    lo, hi = gamma_window(d, p)
    width = hi - lo
    if n_points is None:
        n_points = max(5, math.ceil(math.log2(width / min_offset)))
    if n_points < 5:
        raise PreconditionError("a sweep needs at least 5 points")
    return lo, width * 0.5 ** np.arange(1, n_points + 1)


def optimality_sweep(lam: float, params: ProblemParams, n_points=None, M=10.0, min_offset=1e-6,
                     rel_tol=None) -> SweepResult:
    """Evaluate the shifted quotient on a geometric grid approaching ``1 - d/p``.

    ``diverged`` is set when some grid point has quotient ``< -M``.  Offsets
    below ``OFFSET_FLOOR`` are not evaluated and are reported as a breakdown;
    quadrature failures are recorded per point in ``failures``.
    """
    if lam < 0 or M <= 0:
        raise PreconditionError("need lam >= 0 and M > 0")
    d, p = params.d, params.p
    crit, offsets = sweep_offsets(d, p, n_points, min_offset)
    res = SweepResult(lam, M)
    anisotropic = params.alpha is None
    for off in offsets:
        gamma = crit + off
        if off < OFFSET_FLOOR:
            res.breakdown = f"offset {off:.2e} below floor {OFFSET_FLOOR:.0e}"
            break
        try:
            t = quotient_terms(gamma, lam, params, rel_tol)
        except ArithmeticError as exc:
            res.failures[float(gamma)] = str(exc)
            continue
        q = t.quotient
        if not math.isfinite(q):
            res.failures[float(gamma)] = "non-finite quotient"
            continue
        res.gamma_values.append(float(gamma))
        res.offsets.append(float(off))
        res.quotients.append(float(q))
        res.terms.append(t)
        if anisotropic and params.positive_definite:
            res.bounds.append(closed_form_power_functional(gamma, lam, params)
                              + (coarse_sandwich_bound(gamma, lam, params),))
        if q < -M and not res.diverged:
            res.diverged = True
            res.crossing_gamma = float(gamma)
    return res


def threshold_bisection(params: ProblemParams, M=10.0, offset=1e-5, lo_factor=0.5, hi_factor=2.0,
                        iterations=12):
    """Bracket the smallest ``lam`` whose sweep (down to ``offset``) crosses ``-M``.

    Returns ``(lam_lo, lam_hi)`` with a bounded sweep at ``lam_lo`` and a
    diverging one at ``lam_hi``.
    """
    C = hardy_constant(params.d, params.p)
    lo, hi = lo_factor * C, hi_factor * C

    def diverges(lam):
        return optimality_sweep(lam, params, M=M, min_offset=offset).diverged

    if diverges(lo) or not diverges(hi):
        raise ArithmeticError("initial bracket does not straddle the transition")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if diverges(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def find_violating_function(lam: float, M: float, params: ProblemParams, min_offset=OFFSET_FLOOR,
                            rel_tol=None) -> Power:
    """A power ``|x|^gamma`` whose shifted quotient is below ``-M``.

    Only exists for ``lam > C(d, p)``; raises :class:`NoWitnessFound` (with
    the sweep attached) if the grid hits the offset floor first.
    """
    C = hardy_constant(params.d, params.p)
    if not lam > C:
        raise PreconditionError(f"lam={lam} <= C(d,p)={C}: the inequality holds, no witness exists")
    sweep = optimality_sweep(lam, params, M=M, min_offset=min_offset, rel_tol=rel_tol)
    if sweep.crossing_gamma is None:
        raise NoWitnessFound(
            f"no quotient below -{M} down to offset {sweep.offsets[-1] if sweep.offsets else 'n/a'}"
            + (f"; {sweep.breakdown}" if sweep.breakdown else ""),
            sweep=sweep,
        )
    return Power(sweep.crossing_gamma)


def write_sweep_csv(sweep: SweepResult, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in sweep.rows():
            w.writerow([repr(float(v)) for v in row])
