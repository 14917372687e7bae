"""
Hardy and CKN deficits on test functions
========================================

A deficit is the right-hand side of an inequality minus its left-hand side.
Here the deficits of the weighted Hardy inequality are evaluated on a few
members of the shipped test-function corpus, for an isotropic and an
anisotropic drift matrix.
"""
import numpy as np

from weighted_hardy import (ProblemParams, ckn_a_deficit, ckn_beta_deficit, hardy_constant, hardy_deficit,
                            load_corpus)

corpus = load_corpus()
print(len(corpus), "functions in the corpus")

params = ProblemParams.isotropic(3, 2.0)
print("sharp constant C(3, 2) =", hardy_constant(3, 2.0))
for u in corpus[:3] + corpus[10:12] + corpus[40:42]:
    r = hardy_deficit(u, params)
    print(f"  {u.spec:40s} deficit {r.deficit:12.6g}  budget {r.error_budget:.1e}  holds={r.holds}")

###############################################################################
# An anisotropic drift in two dimensions uses tensor-product quadrature on the
# sphere instead of a single radial integral.
aniso = ProblemParams(2, 3.0, np.diag([1.0, 4.0]))
for u in corpus[10:13]:
    r = hardy_deficit(u, aniso)
    print(f"  diag(1,4): {u.spec:30s} deficit {r.deficit:.6g}")

###############################################################################
# The two CKN families collapse to the Hardy inequality at a = 0 and beta = 0,
# and coincide with each other when beta = p a.
u = corpus[13]
print("Hardy   :", hardy_deficit(u, params).deficit)
print("CKN a=0 :", ckn_a_deficit(u, params, 0.0).deficit)
print("CKN a=.25, beta=.5:", ckn_a_deficit(u, params, 0.25).deficit, ckn_beta_deficit(u, params, 0.5).deficit)
