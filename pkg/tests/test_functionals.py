import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from weighted_hardy import (Bump, MembershipError, PreconditionError, ProblemParams, Power, Product, Sum,
                            Tabulated, ckn_a_deficit, ckn_beta_deficit, closed_form_power_functional,
                            gamma_window, hardy_constant, hardy_deficit, poincare_deficit, poincare_report)
from weighted_hardy.functionals import integrate_profile, coarse_sandwich_bound, sgn_factor
from weighted_hardy.optimality import shifted_quotient


def test_sgn_factor():
    assert (sgn_factor(3, 2), sgn_factor(1, 2), sgn_factor(2, 2)) == (1, -1, 0)


def test_windowed_power_with_zero_matrix():
    params = ProblemParams(1, 3.0, [[0.0]])
    r = hardy_deficit(Product(Power(0.5), Bump(1.0, 0.5)), params)
    assert r.drift_term == 0.0
    assert r.deficit >= -r.error_budget


def test_critical_dimension_has_zero_constant():
    r = hardy_deficit(Bump(2.0, 1.0), ProblemParams.isotropic(2, 2.0))
    assert r.constant == 0.0
    assert r.deficit == pytest.approx(r.gradient_term, rel=1e-15)
    assert r.deficit > 0


def test_bump_deficit_stable_under_refinement():
    params = ProblemParams.isotropic(1, 2.0)
    coarse = hardy_deficit(Bump(1.0, 0.5), params, rel_tol=1e-8)
    fine = hardy_deficit(Bump(1.0, 0.5), params, rel_tol=1e-12)
    assert fine.deficit > 0
    assert coarse.deficit == pytest.approx(fine.deficit, rel=1e-7)


def test_terms_against_scipy_quad():
    params = ProblemParams.isotropic(1, 2.0)
    u = Bump(1.0, 0.5)
    rho = lambda r: math.exp(-r * r / 2)  # noqa: E731
    grad, _ = integrate.quad(lambda r: u.derivative(r) ** 2 * rho(r), 0.5, 1.5, epsabs=1e-14)
    hardy, _ = integrate.quad(lambda r: u(r) ** 2 / r**2 * rho(r), 0.5, 1.5, epsabs=1e-14)
    drift, _ = integrate.quad(lambda r: u(r) ** 2 * rho(r), 0.5, 1.5, epsabs=1e-14)
    rep = hardy_deficit(u, params)
    assert rep.gradient_term == pytest.approx(grad, rel=1e-9)
    assert rep.hardy_term == pytest.approx(hardy, rel=1e-9)
    assert rep.drift_term == pytest.approx(drift, rel=1e-9)
    assert rep.deficit == pytest.approx(grad - 0.5 * drift - 0.25 * hardy, rel=1e-9)


def test_anisotropic_terms_against_scipy():
    A = np.diag([1.0, 4.0])
    params = ProblemParams(2, 3.0, A)
    u = Bump(1.0, 0.5)

    def polar(f):
        def g(r, th):
            c, s = math.cos(th), math.sin(th)
            q = r * r * (c * c + 4 * s * s)
            return f(r, q) * math.exp(-q**1.5 / 3) * r
        return integrate.dblquad(g, 0, 2 * math.pi, 0.5, 1.5, epsabs=1e-13, epsrel=1e-10)[0]

    rep = hardy_deficit(u, params)
    assert rep.hardy_term == pytest.approx(polar(lambda r, q: abs(u(r)) ** 3 / r**3), rel=1e-6)
    assert rep.drift_term == pytest.approx(polar(lambda r, q: abs(u(r)) ** 3 * q**1.5 / r**3), rel=1e-6)
    assert rep.gradient_term == pytest.approx(polar(lambda r, q: abs(u.derivative(r)) ** 3), rel=1e-6)


def test_divergent_power_is_not_admissible():
    with pytest.raises(MembershipError):
        hardy_deficit(Power(0.4), ProblemParams.isotropic(1, 2.0))


def test_admissible_power_holds():
    r = hardy_deficit(Power(0.6), ProblemParams.isotropic(1, 2.0))
    assert r.holds


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.sampled_from([Bump(1.0, 0.5), Sum(Bump(1.0, 0.5), Bump(2.0, 1.0)),
                                                 Product(Power(-1.0), Bump(0.5, 0.3))]))
def test_scaling_covariance(s, u):
    from weighted_hardy.profiles import Scaled
    params = ProblemParams.isotropic(3, 2.0)
    base = hardy_deficit(u, params)
    scaled = hardy_deficit(Scaled(s, u), params)
    for a, b in [(base.gradient_term, scaled.gradient_term), (base.hardy_term, scaled.hardy_term),
                 (base.drift_term, scaled.drift_term)]:
        assert b == pytest.approx(s**2 * a, rel=1e-8)
    assert np.sign(scaled.deficit) == np.sign(base.deficit)


@pytest.mark.parametrize("params", [ProblemParams.isotropic(1, 2.0), ProblemParams.isotropic(3, 2.0),
                                    ProblemParams(2, 3.0, np.diag([1.0, 4.0]))])
def test_drift_bound(params):
    u = Sum(Bump(1.0, 0.5), Bump(2.0, 1.0))
    rep = hardy_deficit(u, params)
    mass, _ = integrate_profile(lambda r: np.abs(u(r)) ** params.p, params, 0.0, None, u.support)
    bound = params.norm_A ** (params.p / 2) * mass
    assert sgn_factor(params.d, params.p) * rep.drift_term <= bound + rep.error_budget


def test_poincare_examples():
    params = ProblemParams.isotropic(1, 3.0)
    assert poincare_deficit(Bump(1.0, 0.5), params) >= 0
    zero = Tabulated(np.linspace(0.5, 1.5, 5), np.zeros(5), np.zeros(5))
    assert poincare_deficit(zero, params) == 0.0
    with pytest.raises(PreconditionError):
        poincare_deficit(Bump(1.0, 0.5), ProblemParams.isotropic(2, 2.0))
    with pytest.raises(PreconditionError):
        poincare_deficit(Bump(1.0, 0.5), ProblemParams(2, 3.0, np.diag([1.0, 0.0])))


@pytest.mark.parametrize("u", [Bump(1.0, 0.5), Bump(0.3, 0.2), Product(Power(2.0), Bump(1.5, 1.0))])
@pytest.mark.parametrize("params", [ProblemParams.isotropic(1, 3.0), ProblemParams(2, 3.0, np.diag([1.0, 4.0])),
                                    ProblemParams.isotropic(1, 2.5, alpha=2.0)])
def test_poincare_chain(u, params):
    poin = poincare_report(u, params)
    hardy = hardy_deficit(u, params)
    budget = poin.error_budget + hardy.error_budget + hardy.constant * hardy.error_budget
    assert poin.deficit >= hardy.deficit + hardy.constant * hardy.hardy_term - budget
    assert hardy.deficit + hardy.constant * hardy.hardy_term >= -budget


@pytest.mark.parametrize("params", [ProblemParams.isotropic(1, 2.0), ProblemParams.isotropic(3, 1.5),
                                    ProblemParams(2, 3.0, np.diag([1.0, 4.0]))])
def test_ckn_reductions(params):
    u = Sum(Bump(1.0, 0.5), Bump(2.0, 1.0))
    h = hardy_deficit(u, params)
    a0 = ckn_a_deficit(u, params, 0.0)
    b0 = ckn_beta_deficit(u, params, 0.0)
    assert abs(a0.deficit - h.deficit) <= 2 * (a0.error_budget + h.error_budget)
    assert abs(b0.deficit - h.deficit) <= 2 * (b0.error_budget + h.error_budget)
    a = ckn_a_deficit(u, params, 0.7)
    b = ckn_beta_deficit(u, params, 0.7 * params.p)
    assert abs(a.deficit - b.deficit) <= 2 * (a.error_budget + b.error_budget)


def test_ckn_examples():
    flat = ProblemParams(1, 2.0, [[0.0]])
    assert ckn_a_deficit(Bump(2.0, 1.0), flat, 1.0).holds
    critical = ckn_a_deficit(Bump(1.0, 0.5), ProblemParams.isotropic(3, 1.5), 1.0)
    assert critical.constant == 0.0 and critical.deficit >= 0
    assert ckn_beta_deficit(Bump(2.0, 0.5), ProblemParams.isotropic(1, 2.0), 1.0).holds
    with pytest.raises(MembershipError):
        ckn_a_deficit(Power(0.6), ProblemParams.isotropic(1, 2.0), 1.0)


def test_gamma_window():
    assert gamma_window(1, 2.0) == (0.5, 1.0)
    assert gamma_window(3, 2.0) == (pytest.approx(-0.5), 0.0)
    with pytest.raises(PreconditionError):
        gamma_window(2, 2.0)


def test_closed_form_collapses_when_isotropic():
    params = ProblemParams.isotropic(1, 3.0)
    up, lo = closed_form_power_functional(0.8, 0.0, params)
    assert up == lo > 0
    assert up == pytest.approx(shifted_quotient(0.8, 0.0, params), rel=1e-9)
    with pytest.raises(PreconditionError):
        closed_form_power_functional(0.5, 0.0, params)


def test_closed_form_upper_bound_goes_to_minus_infinity():
    params = ProblemParams(2, 3.0, np.diag([1.0, 4.0]))
    lam = 1.1 * hardy_constant(2, 3.0)
    crit = gamma_window(2, 3.0)[0]
    ups = [closed_form_power_functional(crit + 10.0**-k, lam, params)[0] for k in range(1, 8)]
    assert all(b < a for a, b in zip(ups, ups[1:]))
    assert ups[-1] < -1e4


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 0.5))
def test_closed_form_brackets_quadrature(frac, lam):
    params = ProblemParams(2, 3.0, np.diag([1.0, 4.0]))
    lo_g, hi_g = gamma_window(2, 3.0)
    gamma = lo_g + frac * (hi_g - lo_g)
    up, lo = closed_form_power_functional(gamma, lam, params)
    q = shifted_quotient(gamma, lam, params)
    assert lo - 1e-6 * abs(lo) <= q <= up + 1e-6 * abs(up)
    assert np.isfinite(coarse_sandwich_bound(gamma, lam, params))
