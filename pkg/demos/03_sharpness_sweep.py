"""
Why the Hardy constant cannot be improved
=========================================

Powers ``|x|^gamma`` with ``gamma`` just above ``1 - d/p`` almost saturate the
inequality.  Replacing the constant by ``lam`` and evaluating the shifted
quotient along such powers separates two regimes: the quotient runs off to
minus infinity when ``lam`` exceeds the sharp constant and stays bounded
otherwise.
"""
from weighted_hardy import ProblemParams, find_violating_function, hardy_constant, optimality_sweep
from weighted_hardy import threshold_bisection

params = ProblemParams.isotropic(1, 2.0)
C = hardy_constant(1, 2.0)

for factor in (0.9, 1.1):
    sweep = optimality_sweep(factor * C, params, M=10.0, min_offset=1e-6)
    print(f"lam = {factor} C: lowest quotient {min(sweep.quotients):10.3f}, diverged={sweep.diverged}")
    for g, q in list(zip(sweep.gamma_values, sweep.quotients))[::4]:
        print(f"    gamma={g:.8f}  Q={q:.4f}")

###############################################################################
# An explicit witness for lam = 1.1 C, and a bisection in lam that brackets
# the transition.
w = find_violating_function(1.1 * C, 10.0, params)
print("witness:", w.spec)
lo, hi = threshold_bisection(params, offset=1e-6)
print(f"transition between {lo / C:.4f} C and {hi / C:.4f} C")
