#!/usr/bin/env python3
"""
Spectral certificates and the basis-trace audit
===============================================

A map that preserves every basis vector to within eps pins the trace of
A^T A inside [(1-eps) n, (1+eps) n], because the trace equals the sum of
the embedded basis norms.  Cauchy-Schwarz then turns the trace and the
Frobenius norm into a rank lower bound.  The audit automates both steps
and hunts for a worst-case witness vector.
"""

import numpy as np

import jllab as jl

n = 24
X = jl.standard_basis(n)

for label, A in [
    ("identity", jl.identity_map(n)),
    ("gaussian m=12", jl.gaussian_map(12, n, jl.Seed(5))),
    ("rank-3 projection", jl.pca_map(jl.gaussian_vectors(n, 3, jl.Seed(8)), 3)),
]:
    cert = jl.spectral_certificate(A)
    eps = jl.distortion(A, X).eps_max
    print(f"{label:>18}: trace = {cert.trace:7.3f}  frob_sq = {cert.frob_sq:8.3f}  "
          f"rank_lb = {cert.rank_lb:2d}  measured eps = {eps:.3f}")

# the audit in one call: preconditions, trace window, rank bound
A = jl.gaussian_map(12, n, jl.Seed(5))
eps = jl.distortion(A, X).eps_max
report = jl.audit_embedding(A, X, eps=min(0.999, eps * 1.0001))
print(f"\naudit at eps just above measured: ok = {report.ok} "
      f"(trace window {report.trace_window_ok}, rank {report.rank_lb} <= {A.m}: "
      f"{report.rank_ok})")

# the witness: the input vector whose image deviates most from the trace,
# in Frobenius units; gaussian vectors typically witness a unit deviation
A8 = jl.gaussian_map(8, 64, jl.Seed(1))
V = jl.hard_instance(64, 4096, jl.Seed(2))
v, dev = jl.witness_search(A8, V)
print(f"\nwitness over {len(V)} candidates: deviation = {dev:.2f} "
      f"(|norm of image^2 - trace| / frobenius)")
print("scale invariance: deviation(3A) =",
      f"{jl.witness_search(jl.LinearMap(3.0 * A8.entries), V)[1]:.2f}")
