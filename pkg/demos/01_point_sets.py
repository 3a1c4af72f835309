#!/usr/bin/env python3
"""
Point sets and their file formats
=================================

Builds the three stock constructions (basis, simplex, basis plus gaussian
cloud), shows the role tags, and round-trips the text and binary formats.
"""

import tempfile
from pathlib import Path

import numpy as np

import jllab as jl

# the hard configuration: n basis vectors plus k gaussian points, with
# k defaulting to roughly n^2 in the experiments
n, k = 8, 12
X = jl.hard_instance(n, k, jl.Seed(7))
print(f"hard_instance({n}, {k}): {len(X)} points in R^{X.dim}")
print("  roles:", {r: X.roles.count(r) for r in sorted(set(X.roles))})
print("  first basis row:", X.points[0])
print("  a gaussian row:  ", np.round(X.points[n], 3))

# simplex = origin followed by the basis; useful because pairwise
# differences from the origin recover the norm-preservation view
S = jl.simplex(4)
print(f"\nsimplex(4): roles = {S.roles}")
print(S.points)

# the two serializations agree to the bit
with tempfile.TemporaryDirectory() as d:
    txt = Path(d) / "set.jlps"
    binp = Path(d) / "set.jlpsb"
    jl.write_pointset(str(txt), X)
    jl.write_pointset(str(binp), X, binary=True)
    A = jl.read_pointset(str(txt))
    B = jl.read_pointset(str(binp))
    same = np.array_equal(A.points, B.points) and A.roles == B.roles
    print(f"\ntext {txt.stat().st_size} bytes, binary {binp.stat().st_size} bytes, "
          f"round-trips equal: {same}")

# per-point seeding means a longer cloud extends a shorter one
small = jl.gaussian_vectors(5, 3, jl.Seed(1)).points
large = jl.gaussian_vectors(5, 6, jl.Seed(1)).points
print("\nprefix property:", np.array_equal(small, large[:3]))
