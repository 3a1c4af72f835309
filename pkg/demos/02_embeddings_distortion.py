#!/usr/bin/env python3
"""
Linear maps and measured distortion
===================================

Compares a random gaussian projection, PCA, and the smoothed-max
optimizer on the same point set, in both the norm-preservation and
pairwise metrics.
"""

import numpy as np

import jllab as jl

n, k, m = 32, 200, 16
X = jl.hard_instance(n, k, jl.Seed(3))

# random projection: rows are iid gaussians scaled by 1/sqrt(m), so
# squared norms are preserved in expectation
G = jl.gaussian_map(m, n, jl.Seed(10))
rep = jl.distortion(G, X)
print(f"gaussian map    m={m}: eps_max = {rep.eps_max:.3f} "
      f"(worst point index {rep.violating_index})")

# PCA: the best rank-m subspace in the least-squares sense, which is not
# the same thing as the best worst-case distortion
P = jl.pca_map(X, m)
print(f"pca map         m={m}: eps_max = {jl.distortion(P, X).eps_max:.3f}")

# the optimizer descends a log-sum-exp smoothing of the worst ratio,
# warm-started from PCA
A, info = jl.optimize_map(X, m, jl.OptimizerOptions(max_iters=500, seed=jl.Seed(0)),
                          return_info=True)
print(f"optimized map   m={m}: eps_max = {info.final_distortion:.3f} "
      f"after {info.iterations} iterations (init {info.init_distortion:.3f})")

# pairwise mode measures distances between distinct points instead of
# norms; on a set containing the origin the two views coincide
S = jl.simplex(6)
I6 = jl.identity_map(6)
pw = jl.distortion(I6, S, mode=jl.MODE_PAIRWISE)
print(f"\nidentity on simplex(6), pairwise: eps_max = {pw.eps_max:.1e} "
      f"over {len(pw.ratios)} pairs")

# ratios are ordered lexicographically by pair; recover the pair behind
# the worst one
worst = int(np.argmax(np.abs(np.asarray(pw.ratios) - 1.0)))
print("worst pair:", jl.pair_from_flat(len(S), worst))
