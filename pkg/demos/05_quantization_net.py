#!/usr/bin/env python3
"""
Grid quantization and net cardinality
=====================================

Matrices with entries in [-2, 2] are snapped to a lattice with step
sqrt(alpha) / (10 n); the quantization error B then carries a Frobenius
budget tr(B^T B) <= alpha / 100.  Counting all grid matrices (in log
space) gives the size of the finite net that stands in for "all maps"
in union-bound arguments.
"""

import math

import numpy as np

import jllab as jl

n, alpha = 16, 0.01
params = jl.net_params(n, alpha)
print(f"n = {n}, alpha = {alpha}:")
print(f"  grid step    = {params.grid_step:.6g}")
print(f"  index range  = +/- {params.index_range}")
print(f"  covers [-2,2]: {params.covers}")

# quantize a random map and check the budget with room to spare
A = jl.gaussian_map(8, n, jl.Seed(3))
A = jl.LinearMap(np.clip(A.entries, -2.0, 2.0))
Q = jl.quantize(A, alpha)
err = float(np.sum((Q.entries - A.entries) ** 2))
print(f"\nquantization error tr(B^T B) = {err:.3e}  "
      f"(budget alpha/100 = {alpha / 100:.1e})")
print("idempotent:", np.array_equal(jl.quantize(Q, alpha).entries, Q.entries))

# cardinality accounting: exact log count vs the closed-form bound
print(f"\n{'n':>4} {'alpha':>8} {'ln(exact)':>12} {'ln(bound)':>12}")
for nn in (4, 16, 64):
    for a in (0.25, 1e-2, 1e-4):
        card = jl.log_cardinality(nn, a)
        print(f"{nn:>4} {a:>8.0e} {card.exact_log:>12.1f} {card.bound_log:>12.1f}")

# picking alpha to make the error polynomially small in n
for C in (1.0, 2.0):
    al = jl.covering_radius_for(100, C)
    print(f"\nerror target 100^-{2 * C:.0f}: alpha = {al:.3e}, "
          f"log10(net size) ~ {jl.log_cardinality(100, al).bound_log / math.log(10):.0f}")
