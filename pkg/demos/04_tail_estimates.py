#!/usr/bin/env python3
"""
Monte Carlo tails against the chi-square oracle
===============================================

For g standard gaussian, |g|^2 is chi-square with n degrees of freedom,
so the two-sided deviation probability has an exact survival-function
oracle.  The quadratic-form ("chaos") tail has no closed form; its
constants are calibrated empirically and validated on held-out maps.
"""

import math

import jllab as jl

trials = 50_000

# norm tails: estimate vs oracle across a small grid
print("norm deviation |g|^2 - n beyond 1.5 sqrt(n t):")
print(f"{'n':>6} {'t':>4} {'p_hat':>10} {'oracle':>10} {'|z|':>6}")
for n in (10, 100):
    for t in (1.0, 2.0, 3.0):
        est = jl.norm_tail_estimate(n, t, 1.5, trials, jl.Seed(n + int(t)))
        p = jl.norm_tail_oracle(n, t, 1.5)
        z = abs(est.p_hat - p) / max(est.stderr, 1e-12)
        print(f"{n:>6} {t:>4.0f} {est.p_hat:>10.5f} {p:>10.5f} {z:>6.2f}")

# chaos tails: the deviation of |Ag|^2 from tr(A^T A) measured against
# the mixed threshold c (sqrt(t) frobenius + t spectral)
A = jl.gaussian_map(16, 32, jl.Seed(4))
print("\nchaos tail for a 16x32 gaussian map, c = 0.4:")
for t in (1.0, 2.0, 3.0):
    est = jl.chaos_tail_estimate(A, t, 0.4, trials, jl.Seed(40 + int(t)))
    floor = min(0.4, math.exp(-t))
    print(f"  t={t:.0f}: p_hat = {est.p_hat:.4f}  required floor min(c, e^-t) = {floor:.4f}")

# calibration finds the constants automatically on a family of maps
family = [jl.identity_map(16), jl.gaussian_map(8, 16, jl.Seed(9))]
cal = jl.calibrate_constants(family, [1.0, 2.0], trials, jl.Seed(6))
print(f"\ncalibrated: c = {cal.c:.4f}, c1 = {cal.c1:.4f}, c2 = {cal.c2:.4f}, "
      f"delta0 = {cal.delta0}")

# the joint event: a large form deviation while the input norm stays
# moderate; its rate stays above delta by design of (c1, c2)
est = jl.joint_event_rate(A, 0.05, cal.c1, cal.c2, trials, jl.Seed(11))
print(f"joint event at delta = 0.05: rate = {est.p_hat:.4f} "
      f"(+/- {est.stderr:.4f})")
