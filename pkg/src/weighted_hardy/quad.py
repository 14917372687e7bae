"""Quadrature against mu for integrands that may blow up like a power at the origin.

Radial integrals are mapped through ``r = exp(t)``.  A power singularity
``r^(s)`` with ``s > -1`` becomes the exponentially decaying ``exp((s + 1) t)``,
which composite Gauss-Legendre panels integrate easily on ``[t_lo, log R]``.
The remaining piece ``]-inf, t_lo]`` is summed in closed form after reading
off the decay rate of the mapped integrand; a rate that is not positive means
the integral diverges at the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivergentIntegralError, InfiniteMeasureError, ParameterError, WrongEntryPointError
from .measure import ProblemParams, angular_factor, closed_form_moment

LOW_ORDER = 10
HIGH_ORDER = 20
TAIL_EXPONENT = 40.0  # integrand tail beyond R is below exp(-40)
DEFAULT_REL_TOL = {1: 1e-10, 2: 1e-7, 3: 1e-7}

_T_LO = -50.0
_T_STRIDE = 60.0
_MIN_DECAY = 1e-12
_MAX_PANELS = 40000


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    transform: str
    target_rel_tol: float

    def __post_init__(self):
        if len(self.nodes) < 8:
            raise ParameterError("a rule needs at least 8 nodes")
        if np.any(np.diff(self.nodes) <= 0):
            raise ParameterError("rule nodes must be strictly increasing")
        if not np.all(np.isfinite(self.weights)):
            raise ParameterError("rule weights must be finite")

    def apply(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    nodes_used: int
    converged: bool = True
    tail_value: float = 0.0
    cutoff: float = math.inf
    rule: QuadratureRule | None = None


@lru_cache(maxsize=None)
def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_sums(h, lo, hi, n):
    x, w = _gauss(n)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(h(t.ravel()), dtype=float).reshape(t.shape)
    return (vals @ w) * half


def adaptive_panels(h, edges, rel_tol, abs_tol=0.0, max_panels=_MAX_PANELS):
    """Composite Gauss-Legendre on the panels ``edges``, bisecting until converged.

    Each panel is integrated with a 10- and a 20-point rule; the difference is
    the panel's error estimate and the 20-point value is kept.  Returns
    ``(value, error, nodes_used, converged, lo, hi)`` with the final panels.
    """
    lo = np.asarray(edges[:-1], dtype=float)
    hi = np.asarray(edges[1:], dtype=float)
    coarse = _panel_sums(h, lo, hi, LOW_ORDER)
    fine = _panel_sums(h, lo, hi, HIGH_ORDER)
    used = len(lo) * (LOW_ORDER + HIGH_ORDER)
    err = np.abs(fine - coarse)
    converged = False
    while True:
        order = np.argsort(lo, kind="stable")
        lo, hi, fine, err = lo[order], hi[order], fine[order], err[order]
        total = float(np.sum(fine))
        estimate = float(np.sum(err))
        if not (np.isfinite(total) and np.isfinite(estimate)):
            break
        target = max(rel_tol * abs(total), abs_tol, 1e-15 * float(np.sum(np.abs(fine))))
        if estimate <= target:
            converged = True
            break
        if len(lo) >= max_panels:
            break
        bad = err > target / len(lo)
        if not np.any(bad):
            bad = err >= np.max(err)
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.concatenate([lo[bad], mid])
        new_hi = np.concatenate([mid, hi[bad]])
        c2 = _panel_sums(h, new_lo, new_hi, LOW_ORDER)
        f2 = _panel_sums(h, new_lo, new_hi, HIGH_ORDER)
        used += len(new_lo) * (LOW_ORDER + HIGH_ORDER)
        keep = ~bad
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        fine = np.concatenate([fine[keep], f2])
        err = np.concatenate([err[keep], np.abs(f2 - c2)])
    return total, estimate, used, converged, lo, hi


def _rule_from_panels(lo, hi, rel_tol):
    x, w = _gauss(HIGH_ORDER)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    r = np.exp(t)
    return QuadratureRule(r, wt * r, "log-graded", rel_tol)


def _origin_tail(h, t_lo):
    """Closed-form integral of ``h`` over ]-inf, t_lo] assuming ``h ~ C exp(k t)``.

    Returns ``(value, error, decay_rate)``.
    """
    ts = np.array([t_lo, t_lo - _T_STRIDE, t_lo - 2 * _T_STRIDE])
    with np.errstate(all="ignore"):
        hv = np.asarray(h(ts), dtype=float)
    if not np.all(np.isfinite(hv)):
        raise DivergentIntegralError("integrand is not finite near the origin")
    a = np.abs(hv)
    if a[0] == 0:
        return 0.0, 0.0, math.inf
    if a[1] == 0:
        # underflow over one stride: the decay rate exceeds 10, bound the tail
        return 0.0, a[0] / 10.0, math.inf
    k1 = math.log(a[0] / a[1]) / _T_STRIDE
    k2 = math.log(a[1] / a[2]) / _T_STRIDE if a[2] > 0 else k1
    if k1 <= _MIN_DECAY or k2 <= _MIN_DECAY:
        raise DivergentIntegralError(
            f"integrand does not decay at the origin (local exponent {k1 - 1:.3g} <= -1)",
            exponent=k1,
        )
    value = hv[0] / k1
    # a pure power gives k1 == k2 up to rounding
    error = abs(value) * (abs(k1 - k2) / k1 + 1e-15 / (_T_STRIDE * k1))
    return value, error, k1


def integrate_halfline(g, a, b, rel_tol, abs_tol=0.0):
    """Integrate ``g(r)`` over ``[a, b]`` with ``0 <= a < b < inf``.

    ``g`` is vectorised over ``r``.  When ``a == 0`` the piece next to the
    origin is handled by the power-law tail and a non-decaying tail raises
    :class:`DivergentIntegralError`.
    """
    if not 0 <= a < b < math.inf:
        raise ParameterError(f"bad interval [{a}, {b}]")

    def h(t):
        r = np.exp(t)
        return g(r) * r

    t_hi = math.log(b)
    if a > 0:
        t_start = math.log(a)
    else:
        t_start = min(_T_LO, t_hi - 50.0)
    n0 = max(8, int(math.ceil(t_hi - t_start)))
    edges = np.linspace(t_start, t_hi, n0 + 1)
    tail, tail_err = 0.0, 0.0
    if a == 0:
        tail, tail_err, _ = _origin_tail(h, t_start)
    value, err, used, converged, lo, hi = adaptive_panels(h, edges, rel_tol, abs_tol)
    total = value + tail
    err = err + tail_err
    used += 3 if a == 0 else 0
    converged = converged and (tail_err == 0 or tail_err <= max(rel_tol * abs(total), abs_tol))
    rule = _rule_from_panels(lo, hi, rel_tol)
    return IntegralResult(total, err, used, converged, tail, b, rule)


def tail_radius(alpha: float, p: float) -> float:
    """Radius where ``alpha^(p/2) R^p / p`` reaches the tail exponent."""
    return (TAIL_EXPONENT * p / alpha ** (p / 2)) ** (1.0 / p)


def _default_tol(d):
    return DEFAULT_REL_TOL.get(d, 1e-7)


def _profile_support(profile):
    lo, hi = getattr(profile, "support", (0.0, math.inf))
    return float(lo), float(hi)


def _extend_cutoff(g, a, b, b_max, rel_tol, abs_tol):
    """Integrate over [a, b], pushing b outwards while the end value is not negligible."""
    res = integrate_halfline(g, a, b, rel_tol, abs_tol)
    for _ in range(8):
        if b >= b_max:
            break
        edge = abs(float(np.asarray(g(np.array([b])))[0])) * b
        if edge <= 1e-3 * rel_tol * max(abs(res.value), abs_tol):
            break
        b = min(2 * b, b_max)
        res = integrate_halfline(g, a, b, rel_tol, abs_tol)
    return res


def radial_integral(profile, d: int, params: ProblemParams, rel_tol=None, r_max=None,
                    abs_tol=0.0) -> IntegralResult:
    """Integral of the radial function ``profile(|x|)`` against mu.

    Only isotropic matrices ``A = alpha I`` (or ``A = 0``) are accepted.  The
    integration range is the intersection of ``profile.support`` (if the
    profile has one), ``]0, r_max]`` and ``]0, R]`` with ``R`` from the
    exp(-40) tail rule.
    """
    if d != params.d:
        raise ParameterError(f"d={d} does not match params.d={params.d}")
    alpha = params.alpha
    if alpha is None:
        raise WrongEntryPointError("radial_integral needs A = alpha * I; use full_integral")
    rel_tol = _default_tol(d) if rel_tol is None else rel_tol
    p, c = params.p, params.c
    a, b = _profile_support(profile)
    if r_max is not None:
        b = min(b, r_max)
    if alpha > 0:
        R = tail_radius(alpha, p)
        b_max = b
        b = min(b, R)
        b_max = max(b_max if math.isfinite(b_max) else 64 * R, b)
    elif math.isfinite(b):
        b_max = b
    else:
        raise InfiniteMeasureError("A = 0 needs a profile with bounded support or r_max")
    if a >= b:
        return IntegralResult(0.0, 0.0, 0, True, 0.0, b)
    k = alpha ** (p / 2) / p

    def g(r):
        return profile(r) * r ** (d - 1) * (c * np.exp(-k * r**p))

    res = _extend_cutoff(g, a, b, b_max, rel_tol, abs_tol)
    s = angular_factor(d)
    return IntegralResult(
        s * res.value, s * res.error_estimate, res.nodes_used, res.converged,
        s * res.tail_value, res.cutoff, res.rule,
    )


def sphere_rule(d: int, n: int):
    """Directions and weights on the unit sphere (the half-line direction for d = 1).

    d = 2 uses the n-point trapezoid rule in the angle; d = 3 uses Gauss-Legendre
    in cos(theta) times a 2n-point trapezoid rule in the azimuth.
    """
    if d == 1:
        return np.ones((1, 1)), np.ones(1)
    if d == 2:
        th = 2 * np.pi * np.arange(n) / n
        return np.stack([np.cos(th), np.sin(th)], axis=-1), np.full(n, 2 * np.pi / n)
    if d == 3:
        z, wz = _gauss(n)
        m = 2 * n
        ph = 2 * np.pi * np.arange(m) / m
        s = np.sqrt(1 - z**2)
        dirs = np.stack(
            [
                (s[:, None] * np.cos(ph)[None, :]).ravel(),
                (s[:, None] * np.sin(ph)[None, :]).ravel(),
                np.repeat(z, m),
            ],
            axis=-1,
        )
        w = (wz[:, None] * np.full(m, 2 * np.pi / m)[None, :]).ravel()
        return dirs, w
    raise ParameterError("full_integral supports d <= 3")


def _spherical_integral(integrand, params, n_dir, a, b, b_max, rel_tol, abs_tol):
    dirs, wdir = sphere_rule(params.d, n_dir)
    q = params.quadratic_form(dirs)
    p, c = params.p, params.c
    d = params.d

    def g(r):
        pts = r[:, None, None] * dirs[None, :, :]
        vals = integrand(pts)
        dens = c * np.exp(-np.power(q[None, :], p / 2) * (r[:, None] ** p) / p)
        return (vals * dens) @ wdir * r ** (d - 1)

    return _extend_cutoff(g, a, b, b_max, rel_tol, abs_tol)


def full_integral(integrand, params: ProblemParams, rel_tol=None, r_max=None, r_min=0.0,
                  abs_tol=0.0) -> IntegralResult:
    """Integral of ``integrand(x)`` against mu over ]0, inf[ (d = 1) or R^d (d = 2, 3).

    ``integrand`` receives points stacked along the last axis (shape ``(..., d)``)
    and may be singular at the origin like ``|x|^(-s)`` with ``s < d``.  The
    integral is computed in polar/spherical coordinates: the angular part by a
    product rule whose size is doubled until two successive sizes agree, the
    radial part by :func:`integrate_halfline` out to the exp(-40) tail radius
    of the smallest eigenvalue of A.
    """
    d = params.d
    if d > 3:
        raise ParameterError("full_integral supports d <= 3")
    rel_tol = _default_tol(d) if rel_tol is None else rel_tol
    alpha1 = params.bounds.alpha1
    b = math.inf if r_max is None else float(r_max)
    if alpha1 > 0:
        R = tail_radius(alpha1, params.p)
        b_max = max(b if math.isfinite(b) else 64 * R, min(b, R))
        b = min(b, R)
    elif math.isfinite(b):
        b_max = b
    else:
        raise InfiniteMeasureError("singular A needs a bounded integration radius r_max")
    if d == 1:
        return _spherical_integral(integrand, params, 1, r_min, b, b_max, rel_tol, abs_tol)
    n = 16 if d == 2 else 8
    magnitude = _spherical_integral(lambda x: np.abs(integrand(x)), params, n, r_min, b, b_max,
                                    1e-6, abs_tol).value
    abs_tol = max(abs_tol, 1e-13 * magnitude)
    prev = _spherical_integral(integrand, params, n, r_min, b, b_max, rel_tol / 4, abs_tol)
    used = prev.nodes_used * len(sphere_rule(d, n)[1])
    for _ in range(6):
        n *= 2
        cur = _spherical_integral(integrand, params, n, r_min, b, b_max, rel_tol / 4, abs_tol)
        used += cur.nodes_used * len(sphere_rule(d, n)[1])
        ang_err = abs(cur.value - prev.value)
        err = cur.error_estimate + ang_err
        target = max(rel_tol * abs(cur.value), abs_tol)
        if ang_err <= target / 2:
            return IntegralResult(cur.value, err, used, err <= target, cur.tail_value, cur.cutoff)
        prev = cur
    return IntegralResult(cur.value, err, used, False, cur.tail_value, cur.cutoff)


MOMENT_ALPHAS = (0.5, 1.0, 2.0)


def moment_betas(d: int, p: float):
    return (-d / p + 0.1, 0.0, 0.5, 1.0, 2.0)


def moment_comparison(d: int, p: float, betas=None, alphas=MOMENT_ALPHAS, rel_tol=None):
    """Rows ``(beta, alpha, closed_form, quadrature, rel_error)`` for the radial moments."""
    betas = moment_betas(d, p) if betas is None else betas
    rows = []
    for beta in betas:
        for alpha in alphas:
            params = ProblemParams.isotropic(d, p, alpha)

            def prof(r, beta=beta):
                return np.power(r, p * beta)

            exact = closed_form_moment(d, p, beta, alpha)
            num = radial_integral(prof, d, params, rel_tol=rel_tol).value
            rows.append((float(beta), float(alpha), exact, num, abs(num - exact) / exact))
    return rows
