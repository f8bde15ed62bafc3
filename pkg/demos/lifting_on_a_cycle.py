"""
ADMM as a lifted version of gradient descent
=============================================

Build the linearized ADMM and gradient-descent maps on a ring of eight
nodes, normalize both into Markov-like matrices and check that the ADMM
matrix collapses onto the GD matrix through the selection matrix.
"""

import numpy as np

from liftlab import AdmmParams, build_cycle, build_lifting_pair, factor_graph, verify_lifting

# Every edge gets its own copy of each endpoint, so the ring of 8 nodes
# turns into 16 edge copies.
fg = factor_graph(build_cycle(8))
print("nodes:", fg.n, "edge copies:", fg.size)

# The relaxation and penalty fix the GD step that ADMM is compared against.
params = AdmmParams.uniform(fg, gamma=0.8, rho=1.0)
pair = build_lifting_pair(fg, None, params)
print("matched GD step:", pair.alpha)

cert = verify_lifting(pair, fg.S)
print("stationary-vector residual:", cert.residual_vec)
print("flow residual:             ", cert.residual_mat)

# Rows of both normalized matrices sum to one...
print("row sums of the ADMM matrix:", np.unique(np.round(pair.M_A.sum(axis=1), 12)))
# ...but the ADMM matrix is allowed to have negative entries.
print("smallest ADMM entry:", cert.min_entry_MA, "-> Markov lifting:", cert.is_markov_lifting)

# A mismatched step size breaks the relation.
bad = build_lifting_pair(fg, None, params, alpha=1.5 * pair.alpha)
print("flow residual with the wrong step:", verify_lifting(bad, fg.S).residual_mat)
