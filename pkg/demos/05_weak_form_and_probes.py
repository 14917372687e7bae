"""
Checking a computed solution against the weak formulation
=========================================================

The discrete solution is tested against a smooth space-time test function.
The residual shrinks with the mesh, while a deliberately corrupted field
leaves an O(1) residual.  Steklov averages in time and the g_k test-function
probe are shown on the same kind of run.
"""
import numpy as np

from weighted_hardy import (Bump, Grid1D, PdeConfig, gk_nonexistence_probe, hardy_constant, solve,
                            steklov_average, weak_residual)


class Phi:
    """phi(t, x) = (1 + t) bump(x) with its time derivative."""

    b = Bump(1.5, 1.0)

    def __call__(self, t, x):
        return (1 + t) * self.b(x)

    def dt(self, t, x):
        return self.b(x)


for n, dt in ((200, 0.02), (400, 0.01), (800, 0.005)):
    g = Grid1D.graded(n, 2.0, grading=1.0)
    cfg = PdeConfig(p=2.0, lam=0.0, m=1e4, dt=dt, T=1.0)
    rep = solve(cfg, g, Bump(1.0, 0.6)(g.x), store_states=True)
    print(f"N={n} dt={dt}: weak residual {weak_residual(rep, Phi(), 0.0, 1.0, cfg, g):.3e}")

bad = [s + np.where((g.x > 1.0) & (g.x < 1.5), 1.0, 0.0) for s in rep.states]
print("corrupted field:", weak_residual(rep, Phi(), 0.0, 1.0, cfg, g, states=bad))

###############################################################################
# Steklov averages of the norm history, then the g_k probe on a subcritical
# p = 1.5 run.  The probe must hold and grow with k.
times = np.array([t for t, _ in rep.history])
norms = np.array([v for _, v in rep.history])
ts, avg = steklov_average(times, norms, 0.1)
print("Steklov average of the norm at t=0:", avg[0], "vs norm", norms[0])

p = 1.5
g = Grid1D.graded(400, p)
cfg = PdeConfig(p=p, lam=0.5 * hardy_constant(1, p), m=1e4, dt=1e-2, T=2.0)
rep = solve(cfg, g, Bump(0.5, 0.4)(g.x), store_states=True)
for k in (1, 4, 16):
    q = gk_nonexistence_probe(rep, Bump(0.8, 0.6), k, 1.0, cfg, g)
    print(f"k={k:2d}: lhs {q.lhs_growth:.4e} <= rhs {q.rhs_cap:.4e} + budget {q.budget:.1e}: {q.holds}")
