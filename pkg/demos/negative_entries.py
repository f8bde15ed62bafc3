"""
Negative transition weights on K4 minus an edge
================================================

On this small graph no choice of penalties makes the normalized ADMM
matrix entrywise non-negative. Two entries in the same column always have
opposite signs, and a diagonal rescaling cannot fix that.
"""

import numpy as np

from liftlab import AdmmParams, build_complete_minus_edge, build_lifting_pair, factor_graph
from liftlab.lifting import min_entry, opposite_signs_witness, witness_indices
from liftlab.operators import build_T_A

fg = factor_graph(build_complete_minus_edge(4))
print("edges:", fg.base.edges)

# Scan a few parameter pairs: the smallest entry is always negative.
for gamma in (0.25, 1.0, 1.5):
    for rho in (0.1, 1.0, 10.0):
        pair = build_lifting_pair(fg, None, AdmmParams.uniform(fg, gamma, rho))
        print(f"gamma={gamma:<5} rho={rho:<5} min entry={min_entry(pair.M_A)[0]: .4f}")

# With unequal penalties the closed-form witness entries show the sign clash.
rng = np.random.default_rng(1)
rho = rng.uniform(0.5, 4.0, fg.size)
p1, p2, p3, p4 = witness_indices(fg)
t21, t24, t31, t34 = opposite_signs_witness(fg, rho, 1.0)
T = build_T_A(fg, None, AdmmParams(1.0, rho))
print("closed form:", np.round([t21, t24, t31, t34], 6))
print("from matrix:", np.round([T[p2, p1], T[p2, p4], T[p3, p1], T[p3, p4]], 6))
