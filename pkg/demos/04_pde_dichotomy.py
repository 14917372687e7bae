"""
Subcritical decay and supercritical blow-up
===========================================

The 1D p-Kolmogorov heat equation with potential ``lam / x^p``, truncated at
level ``m``, is solved with an implicit finite-volume scheme for ``p = 1.5``.
Below the sharp constant the weighted L^2 norm never exceeds its initial
value.  Well above it, a datum concentrated near the origin blows up.
"""
import numpy as np

from weighted_hardy import Bump, Grid1D, PdeConfig, hardy_constant, solve

p = 1.5
C = hardy_constant(1, p)

grid = Grid1D.graded(400, p)
for factor in (0.0, 0.5):
    cfg = PdeConfig(p=p, lam=factor * C, m=1e4, dt=1e-2, T=2.0)
    rep = solve(cfg, grid, Bump(0.5, 0.4)(grid.x))
    ratio = max(n / b for (_, n), (_, b) in zip(rep.history, rep.bound_history))
    print(f"lam = {factor} C: max norm/bound = {ratio:.6f}, final norm {rep.history[-1][1]:.3e}")

cfg = PdeConfig(p=p, lam=2 * C, m=1e4, dt=1e-3, T=1.0)
rep = solve(cfg, grid, 0.01 * Bump(0.02, 0.015)(grid.x))
print(f"lam = 2 C: blow-up={rep.blowup} at t={rep.blowup_time}")

###############################################################################
# The inner boundary sits at x_min > 0, which cuts off part of the singular
# potential.  The discrete threshold therefore lies above C and moves towards
# it as x_min shrinks.  Compare the blow-up time for two cut-offs at 1.8 C.
for x_min in (1e-2, 1e-3):
    g = Grid1D.graded(400, p, x_min=x_min)
    cfg = PdeConfig(p=p, lam=1.8 * C, m=1e4, dt=1e-3, T=1.0)
    rep = solve(cfg, g, 0.01 * Bump(0.02, 0.015)(g.x))
    print(f"x_min={x_min:g}: lam = 1.8 C blow-up={rep.blowup} t={rep.blowup_time}")

###############################################################################
# The flux uses (|Du|^2 + delta)^((p-2)/2) to keep p < 2 away from the
# singularity at Du = 0.  Compared with the initial norm the histories for two
# values of delta stay close.  Near extinction the relative gap grows, because
# there the regularised flux dominates the dynamics.
hist = {}
for delta in (1e-8, 1e-6):
    cfg = PdeConfig(p=p, lam=0.5 * C, m=1e4, dt=1e-2, T=1.0, delta=delta)
    hist[delta] = np.array(solve(cfg, grid, Bump(0.5, 0.4)(grid.x)).history)[:, 1]
gap = np.max(np.abs(hist[1e-8] - hist[1e-6])) / hist[1e-8][0]
print(f"delta 1e-8 vs 1e-6: max history gap {gap:.2e} of the initial norm; "
      f"final norms {hist[1e-8][-1]:.3e}, {hist[1e-6][-1]:.3e}")
