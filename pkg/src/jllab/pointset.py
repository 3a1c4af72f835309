"""Point sets: construction, validation, and serialization.

A `PointSet` is a dense ``(N, n)`` float64 array with one role tag per
point.  Roles distinguish exact standard basis vectors (``basis``), seeded
gaussian points (``gaussian``), and the origin (``origin``); downstream
audits rely on basis-tagged points being exact unit vectors, so that is
enforced at construction.

Gaussian sampling method (fixed, part of the determinism contract): point
``j`` draws its coordinates from ``seed.child(j)`` with numpy's ziggurat
``standard_normal`` on an SFC64 stream, so the result is independent of
generation order and thread layout.  Golden values in the test suite pin
the streams.

Two file formats are supported.  Text files carry a header line
``jlps v1 n=<n> N=<N>``, one comma-separated row per point with 17
significant digits, and a trailing ``roles=...`` line.  Binary files start
with the magic bytes ``JLPS`` followed by a little-endian version, the
dimensions, raw float64 coordinates, and one role byte per point.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .seeds import Seed, as_seed

ROLE_BASIS = "basis"
ROLE_GAUSSIAN = "gaussian"
ROLE_ORIGIN = "origin"
_ROLES = (ROLE_BASIS, ROLE_GAUSSIAN, ROLE_ORIGIN)
_ROLE_CODE = {role: i for i, role in enumerate(_ROLES)}

MAX_TOTAL_COORDS = 10**7

_TEXT_HEADER = re.compile(r"^jlps v1 n=(\d+) N=(\d+)$")
_BINARY_MAGIC = b"JLPS"


class SizeError(ValueError):
    """Point set exceeds the total-coordinate budget."""


def _check_size(dim: int, count: int) -> None:
    if dim * count > MAX_TOTAL_COORDS:
        raise SizeError(
            f"point set with {count} points in dimension {dim} has "
            f"{dim * count} coordinates, over the {MAX_TOTAL_COORDS} limit"
        )


@dataclass(frozen=True, eq=False)
class PointSet:
    """Immutable set of N points in R^n with per-point role tags."""

    dim: int
    points: np.ndarray
    roles: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dimension must be at least 1, got {self.dim}")
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (N, {self.dim}), got {pts.shape}")
        object.__setattr__(self, "points", pts)
        roles = tuple(self.roles)
        object.__setattr__(self, "roles", roles)
        if len(roles) != pts.shape[0]:
            raise ValueError(f"{pts.shape[0]} points but {len(roles)} role tags")
        unknown = sorted(set(roles) - set(_ROLES))
        if unknown:
            raise ValueError(f"unknown roles {unknown}; expected one of {_ROLES}")
        _check_size(self.dim, pts.shape[0])
        if not np.isfinite(pts).all():
            bad = np.argwhere(~np.isfinite(pts))[0]
            raise ValueError(f"non-finite coordinate at point {bad[0]}, axis {bad[1]}")
        basis_rows = [i for i, r in enumerate(roles) if r == ROLE_BASIS]
        if basis_rows:
            sub = pts[basis_rows]
            ok = (
                (np.count_nonzero(sub, axis=1) == 1)
                & (sub.max(axis=1) == 1.0)
                & (sub.min(axis=1) >= 0.0)
            )
            if not ok.all():
                i = basis_rows[int(np.argmin(ok))]
                raise ValueError(f"point {i} is tagged basis but is not an exact unit vector")

    def __len__(self) -> int:
        return self.points.shape[0]


def standard_basis(n: int) -> PointSet:
    """The n standard unit vectors e_1 .. e_n."""
    _require_dim(n)
    _check_size(n, n)
    return PointSet(n, np.eye(n), (ROLE_BASIS,) * n)


def simplex(n: int) -> PointSet:
    """Origin plus the standard basis: n + 1 points."""
    _require_dim(n)
    _check_size(n, n + 1)
    pts = np.vstack([np.zeros((1, n)), np.eye(n)])
    return PointSet(n, pts, (ROLE_ORIGIN,) + (ROLE_BASIS,) * n)


def gaussian_vectors(n: int, k: int, seed: int | Seed) -> PointSet:
    """k points with iid standard normal coordinates, one child seed per point."""
    _require_dim(n)
    if k < 0:
        raise ValueError(f"point count must be nonnegative, got {k}")
    _check_size(n, k)
    s = as_seed(seed)
    pts = np.empty((k, n))
    for j in range(k):
        pts[j] = s.child(j).generator().standard_normal(n)
    return PointSet(n, pts, (ROLE_GAUSSIAN,) * k)


def hard_instance(n: int, k: int, seed: int | Seed) -> PointSet:
    """Standard basis followed by k seeded gaussian points.

    The gaussian block uses the same per-point child derivation as
    `gaussian_vectors`, so ``hard_instance(n, k, s).points[n:]`` equals
    ``gaussian_vectors(n, k, s).points`` exactly.
    """
    _require_dim(n)
    if k < 0:
        raise ValueError(f"point count must be nonnegative, got {k}")
    _check_size(n, n + k)
    gauss = gaussian_vectors(n, k, seed)
    pts = np.vstack([np.eye(n), gauss.points])
    return PointSet(n, pts, (ROLE_BASIS,) * n + (ROLE_GAUSSIAN,) * k)


def _require_dim(n: int) -> None:
    if n < 1:
        raise ValueError(f"dimension must be at least 1, got {n}")


def _fmt(v: float) -> str:
    return format(v, ".17g")


def write_pointset(path: str | Path, ps: PointSet, binary: bool = False) -> None:
    """Write a point set to ``path`` in the text (default) or binary format."""
    path = Path(path)
    if binary:
        blob = _BINARY_MAGIC + struct.pack("<IQQ", 1, ps.dim, len(ps))
        blob += ps.points.astype("<f8").tobytes(order="C")
        blob += bytes(_ROLE_CODE[r] for r in ps.roles)
        path.write_bytes(blob)
        return
    lines = [f"jlps v1 n={ps.dim} N={len(ps)}"]
    for row in ps.points:
        lines.append(",".join(_fmt(v) for v in row))
    lines.append("roles=" + ",".join(ps.roles))
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def read_pointset(path: str | Path) -> PointSet:
    """Read a point set written by `write_pointset` (format auto-detected)."""
    path = Path(path)
    blob = path.read_bytes()
    if blob.startswith(_BINARY_MAGIC):
        return _read_binary(blob, path)
    return _read_text(blob, path)


def _read_binary(blob: bytes, path: Path) -> PointSet:
    head = len(_BINARY_MAGIC) + struct.calcsize("<IQQ")
    if len(blob) < head:
        raise ValueError(f"{path}: truncated binary header")
    version, n, count = struct.unpack_from("<IQQ", blob, len(_BINARY_MAGIC))
    if version != 1:
        raise ValueError(f"{path}: unsupported binary version {version}")
    need = head + 8 * n * count + count
    if len(blob) != need:
        raise ValueError(f"{path}: expected {need} bytes, found {len(blob)}")
    pts = np.frombuffer(blob, dtype="<f8", count=n * count, offset=head)
    codes = blob[head + 8 * n * count :]
    try:
        roles = tuple(_ROLES[c] for c in codes)
    except IndexError:
        raise ValueError(f"{path}: invalid role byte") from None
    return PointSet(int(n), pts.reshape(int(count), int(n)).copy(), roles)


def _read_text(blob: bytes, path: Path) -> PointSet:
    lines = blob.decode("ascii").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    m = _TEXT_HEADER.match(lines[0])
    if not m:
        raise ValueError(f"{path}: line 1: expected 'jlps v1 n=<n> N=<N>' header")
    n, count = int(m.group(1)), int(m.group(2))
    if len(lines) != count + 2:
        raise ValueError(f"{path}: expected {count + 2} lines for N={count}, found {len(lines)}")
    pts = np.empty((count, n))
    for i in range(count):
        fields = lines[1 + i].split(",")
        if len(fields) != n:
            raise ValueError(f"{path}: line {i + 2}: expected {n} coordinates, found {len(fields)}")
        try:
            pts[i] = [float(f) for f in fields]
        except ValueError:
            raise ValueError(f"{path}: line {i + 2}: malformed coordinate") from None
    footer = lines[count + 1]
    if not footer.startswith("roles="):
        raise ValueError(f"{path}: line {count + 2}: expected 'roles=' footer")
    roles = tuple(footer[len("roles=") :].split(",")) if count else ()
    if count and len(roles) != count:
        raise ValueError(f"{path}: line {count + 2}: expected {count} roles, found {len(roles)}")
    return PointSet(n, pts, roles)
