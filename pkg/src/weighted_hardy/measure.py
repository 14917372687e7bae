"""The Gaussian-type measure d(mu) = rho(x) dx and its closed-form radial moments.

The density is ``rho(x) = c * exp(-(x^T A x)^(p/2) / p)``.  In one dimension
every integral is taken over the half-line ]0, inf[, in higher dimensions over
all of R^d.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DivergentIntegralError, InfiniteMeasureError, ParameterError

# relative slack under which a computed eigenvalue is treated as zero
_EIG_ZERO = 1e-13


class SpectralBounds(NamedTuple):
    alpha1: float
    alpha2: float


def spectral_bounds(A) -> SpectralBounds:
    """Smallest and largest eigenvalue of the symmetric matrix ``A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise ParameterError(f"A must be square, got shape {A.shape}")
    if not np.array_equal(A, A.T):
        raise ParameterError("A must be symmetric")
    eig = np.linalg.eigvalsh(A)
    scale = max(np.max(np.abs(eig)), 1.0)
    lo, hi = float(eig[0]), float(eig[-1])
    if abs(lo) <= _EIG_ZERO * scale:
        lo = 0.0
    if abs(hi) <= _EIG_ZERO * scale:
        hi = 0.0
    return SpectralBounds(lo, hi)


@dataclass(frozen=True)
class ProblemParams:
    """Dimension ``d``, exponent ``p``, matrix ``A`` and density scale ``c``."""

    d: int
    p: float
    A: np.ndarray
    c: float = 1.0
    bounds: SpectralBounds = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ParameterError(f"d must be a positive integer, got {self.d}")
        if not self.p > 1:
            raise ParameterError(f"p must be > 1, got {self.p}")
        if not self.c > 0:
            raise ParameterError(f"c must be > 0, got {self.c}")
        A = np.array(self.A, dtype=float).reshape(self.d, self.d)
        bounds = spectral_bounds(A)
        if bounds.alpha1 < 0:
            raise ParameterError("A must be positive semi-definite")
        A.setflags(write=False)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def isotropic(cls, d, p, alpha=1.0, c=1.0):
        return cls(d, p, alpha * np.eye(d), c)

    @property
    def positive_definite(self) -> bool:
        return self.bounds.alpha1 > 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.A)

    @property
    def alpha(self):
        """The scalar ``alpha`` if ``A = alpha * I``, otherwise None."""
        diag = np.diag(self.A)
        if np.array_equal(self.A, diag[0] * np.eye(self.d)):
            return float(diag[0])
        return None

    @property
    def norm_A(self) -> float:
        """Spectral norm of A (its largest eigenvalue)."""
        return self.bounds.alpha2

    def quadratic_form(self, x):
        """``x^T A x`` for points stacked along the last axis."""
        x = np.asarray(x, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            return self.A[0, 0] * x * x
        return np.einsum("...i,ij,...j->...", x, self.A, x)


def eval_density(params: ProblemParams, x):
    """``rho(x) = c exp(-(x^T A x)^(p/2) / p)``; vectorised over leading axes."""
    q = params.quadratic_form(x)
    return params.c * np.exp(-np.power(q, params.p / 2) / params.p)


def sphere_surface(d: int) -> float:
    """Surface measure of the unit sphere in R^d, ``2 pi^(d/2) / Gamma(d/2)``."""
    if d < 2:
        raise ParameterError("sphere_surface needs d >= 2; d = 1 uses the half-line factor 1")
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def angular_factor(d: int) -> float:
    # d = 1 lives on the half-line, so there is a single direction
    return 1.0 if d == 1 else sphere_surface(d)


def closed_form_moment(d: int, p: float, beta: float, alpha: float) -> float:
    """Exact value of the integral of ``|x|^(p beta) exp(-alpha^(p/2) |x|^p / p)``.

    Finite iff ``beta > -d/p``; the value is
    ``angular(d) p^((p beta + d - p)/p) alpha^(-(p beta + d)/2) Gamma(beta + d/p)``.
    """
    if not alpha > 0:
        raise ParameterError("alpha must be > 0")
    shape = beta + d / p
    if not shape > 0:
        raise DivergentIntegralError(
            f"moment with beta={beta} <= -d/p={-d / p} diverges at the origin", exponent=shape
        )
    log_value = (
        (p * beta + d - p) / p * math.log(p)
        - (p * beta + d) / 2 * math.log(alpha)
        + math.lgamma(shape)
    )
    return angular_factor(d) * math.exp(log_value)


def hardy_constant(d: int, p: float) -> float:
    """The sharp constant ``(|d - p| / p)^p``."""
    return (abs(d - p) / p) ** p


def normalization_constant(params: ProblemParams, radius=None, rel_tol=1e-10) -> float:
    """The scale ``c`` that turns mu into a probability measure.

    With ``A = 0`` the measure is Lebesgue and only has finite mass on a ball,
    so ``radius`` must be supplied.  Anisotropic matrices go through quadrature
    and the estimated relative error must stay below 1e-8.
    """
    d, p = params.d, params.p
    if params.is_zero:
        if radius is None:
            raise InfiniteMeasureError("A = 0 gives infinite mass; pass a truncation radius")
        return 1.0 / (angular_factor(d) * radius**d / d)
    if radius is not None:
        raise ParameterError("radius is only meaningful for A = 0")
    if not params.positive_definite:
        raise InfiniteMeasureError("a singular A gives infinite mass")
    alpha = params.alpha
    if alpha is not None:
        return 1.0 / closed_form_moment(d, p, 0.0, alpha)

    from .quad import full_integral

    unit = ProblemParams(d, p, params.A, 1.0)
    res = full_integral(lambda x: np.ones(np.shape(x)[:-1]), unit, rel_tol=rel_tol)
    if res.error_estimate > 1e-8 * abs(res.value):
        raise ArithmeticError(f"mass quadrature error {res.error_estimate:.2e} exceeds 1e-8")
    return 1.0 / res.value
