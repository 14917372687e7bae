"""Hardy, Poincare and Caffarelli-Kohn-Nirenberg deficits on radial test functions.

A deficit is the right-hand side minus the left-hand side of an inequality;
a nonnegative deficit (up to the quadrature error budget) confirms the
inequality on that function.

All three inequalities share one shape, indexed by an exponent ``q``::

    K^p int |u|^p |x|^-q dmu  <=  int |grad u|^p |x|^(p-q) dmu
                                  + K^(p-1) sgn(d-q) int |u|^p (x^T A x)^(p/2) |x|^-q dmu

with ``K = |d - q| / p``.  ``q = p`` is the weighted Hardy inequality,
``q = p(a+1)`` and ``q = p + beta`` are the two CKN variants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegralError, MembershipError, PreconditionError
from .measure import ProblemParams, closed_form_moment, hardy_constant
from .quad import full_integral, radial_integral

# two successive refinements must agree to this for an integral to count as finite
CERTIFY_REL_TOL = 1e-6


@dataclass(frozen=True)
class HardyReport:
    gradient_term: float
    hardy_term: float
    drift_term: float
    constant: float
    deficit: float
    error_budget: float
    exponent: float = math.nan
    sign: int = 0

    @property
    def holds(self) -> bool:
        return self.deficit >= -self.error_budget


def sgn_factor(d, p) -> int:
    """Sign of ``d - p`` with ``sgn(0) = 0``."""
    return int(np.sign(d - p))


def integrate_profile(u_part, params, q_weight, rel_tol, support, directional=False):
    """int u_part(|x|) |x|^(-q_weight) dmu, times ``(x^T A x / |x|^2)^(p/2)`` if directional."""
    d, p = params.d, params.p
    alpha = params.alpha
    lo, hi = support

    if alpha is not None:
        scale = alpha ** (p / 2) if directional else 1.0
        if scale == 0:
            return 0.0, 0.0

        def prof(r):
            return u_part(r) * r ** (-q_weight) if q_weight else u_part(r)

        prof.support = support
        res = radial_integral(prof, d, params, rel_tol=rel_tol)
        return scale * res.value, scale * res.error_estimate

    def integrand(x):
        r = np.linalg.norm(x, axis=-1)
        val = u_part(r) * r ** (-q_weight)
        if directional:
            val = val * np.power(params.quadratic_form(x) / (r * r), p / 2)
        return val

    res = full_integral(integrand, params, rel_tol=rel_tol, r_min=lo,
                        r_max=None if math.isinf(hi) else hi)
    return res.value, res.error_estimate


def _certified(name, u_part, params, q_weight, rel_tol, support, directional=False):
    try:
        value, err = integrate_profile(u_part, params, q_weight, rel_tol, support, directional)
    except DivergentIntegralError as exc:
        raise MembershipError(f"{name} integral diverges: {exc}", exponent=exc.exponent) from exc
    if not (math.isfinite(value) and err <= max(CERTIFY_REL_TOL * abs(value), 1e-300)):
        if value != 0:
            raise MembershipError(f"{name} integral not certified (value {value:.3e}, error {err:.1e})")
    return value, err


def weighted_report(u, params: ProblemParams, q: float, rel_tol=None) -> HardyReport:
    """Deficit of the weighted inequality with singular exponent ``q`` (see module doc)."""
    p, d = params.p, params.d
    support = tuple(getattr(u, "support", (0.0, math.inf)))
    absu_p = lambda r: np.abs(u(r)) ** p  # noqa: E731
    absdu_p = lambda r: np.abs(u.derivative(r)) ** p  # noqa: E731
    grad, e_grad = _certified("gradient", absdu_p, params, q - p, rel_tol, support)
    hardy, e_hardy = _certified("Hardy", absu_p, params, q, rel_tol, support)
    if params.is_zero:
        drift, e_drift = 0.0, 0.0
    else:
        drift, e_drift = _certified("drift", absu_p, params, q - p, rel_tol, support,
                                    directional=True)
    k = abs(d - q) / p
    constant = k**p
    sign = sgn_factor(d, q)
    drift_coef = k ** (p - 1) * sign
    deficit = grad + drift_coef * drift - constant * hardy
    budget = e_grad + abs(drift_coef) * e_drift + constant * e_hardy
    return HardyReport(grad, hardy, drift, constant, deficit, budget, q, sign)


def hardy_deficit(u, params: ProblemParams, rel_tol=None) -> HardyReport:
    """The weighted Hardy inequality with constant ``C(d, p) = (|d-p|/p)^p``."""
    return weighted_report(u, params, params.p, rel_tol)


def ckn_a_deficit(u, params: ProblemParams, a: float, rel_tol=None) -> HardyReport:
    """CKN variant with gradient weight ``|x|^(-pa)`` and singular weight ``|x|^(-p(a+1))``."""
    return weighted_report(u, params, params.p * (a + 1), rel_tol)


def ckn_beta_deficit(u, params: ProblemParams, beta: float, rel_tol=None) -> HardyReport:
    """CKN variant with gradient weight ``|x|^(-beta)`` and singular weight ``|x|^(-(p+beta))``."""
    return weighted_report(u, params, params.p + beta, rel_tol)


@dataclass(frozen=True)
class PoincareReport:
    gradient_term: float
    mass_term: float
    constant: float
    deficit: float
    error_budget: float


def poincare_report(u, params: ProblemParams, rel_tol=None) -> PoincareReport:
    p, d = params.p, params.d
    if not p > d:
        raise PreconditionError(f"the Poincare inequality needs p > d (p={p}, d={d})")
    if not params.positive_definite:
        raise PreconditionError("the Poincare inequality needs a positive definite A")
    support = tuple(getattr(u, "support", (0.0, math.inf)))
    grad, e_grad = _certified("gradient", lambda r: np.abs(u.derivative(r)) ** p, params, 0.0,
                              rel_tol, support)
    mass, e_mass = _certified("mass", lambda r: np.abs(u(r)) ** p, params, 0.0, rel_tol, support)
    constant = ((p - d) / p) ** (p - 1) * params.bounds.alpha1 ** (p / 2)
    return PoincareReport(grad, mass, constant, grad - constant * mass, e_grad + constant * e_mass)


def poincare_deficit(u, params: ProblemParams, rel_tol=None) -> float:
    """``int |grad u|^p dmu - ((p-d)/p)^(p-1) lambda_min(A)^(p/2) int |u|^p dmu``."""
    return poincare_report(u, params, rel_tol).deficit


def gamma_window(d: int, p: float) -> tuple[float, float]:
    """Open interval of exponents gamma for which ``|x|^gamma`` is used in the sharpness argument."""
    if p == d:
        raise PreconditionError("no exponent window when p == d")
    return 1 - d / p, (0.0 if p < d else 1.0)


def check_window(gamma, d, p):
    lo, hi = gamma_window(d, p)
    if not lo < gamma < hi:
        raise PreconditionError(f"gamma={gamma} outside the window ]{lo}, {hi}[")


def _moment(params, beta, alpha):
    return params.c * closed_form_moment(params.d, params.p, beta, alpha)


def closed_form_power_functional(gamma: float, lam: float, params: ProblemParams):
    """Closed-form bounds ``(upper, lower)`` on the shifted quotient of ``|x|^gamma``.

    The quotient is ``(|gamma|^p - lam) I(gamma-1)/I(gamma) + sgn(d-p) lam^(1-1/p) J/I(gamma)``
    with ``I(b) = int |x|^(pb) dmu`` and ``J = int |x|^(p gamma - p) (x^T A x)^(p/2) dmu``.
    Each moment is sandwiched between its isotropic values at the extreme
    eigenvalues, and every term takes the side that matches its sign.  For
    ``A = alpha I`` both bounds equal the exact quotient.
    """
    d, p = params.d, params.p
    check_window(gamma, d, p)
    if not params.positive_definite:
        raise PreconditionError("closed-form bounds need a positive definite A")
    a1, a2 = params.bounds
    # ratio I(gamma-1)/I(gamma): bigger when the numerator decays slowly (alpha1)
    ratio_hi = _moment(params, gamma - 1, a1) / _moment(params, gamma, a2)
    ratio_lo = _moment(params, gamma - 1, a2) / _moment(params, gamma, a1)
    if a1 == a2:
        ratio_hi = ratio_lo = _moment(params, gamma - 1, a1) / _moment(params, gamma, a1)
    lead = abs(gamma) ** p - lam
    drift = sgn_factor(d, p) * lam ** (1 - 1 / p)
    lead_hi = lead * (ratio_hi if lead >= 0 else ratio_lo)
    lead_lo = lead * (ratio_lo if lead >= 0 else ratio_hi)
    drift_hi = drift * (a2 if drift >= 0 else a1) ** (p / 2)
    drift_lo = drift * (a1 if drift >= 0 else a2) ** (p / 2)
    return lead_hi + drift_hi, lead_lo + drift_lo


def coarse_sandwich_bound(gamma: float, lam: float, params: ProblemParams) -> float:
    """The textbook upper estimate: smallest-eigenvalue moments on top, largest below,
    and ``|A|^(p/2)`` on the drift term regardless of its sign."""
    d, p = params.d, params.p
    check_window(gamma, d, p)
    if not params.positive_definite:
        raise PreconditionError("closed-form bounds need a positive definite A")
    a1, a2 = params.bounds
    num = (abs(gamma) ** p - lam) * closed_form_moment(d, p, gamma - 1, a1) + (
        a2 ** (p / 2) * lam ** (1 - 1 / p) * closed_form_moment(d, p, gamma, a1)
    )
    return num / closed_form_moment(d, p, gamma, a2)


__all__ = [
    "HardyReport", "PoincareReport", "ckn_a_deficit", "ckn_beta_deficit", "closed_form_power_functional",
    "gamma_window", "hardy_constant", "hardy_deficit", "coarse_sandwich_bound", "poincare_deficit",
    "poincare_report", "sgn_factor", "weighted_report",
]
