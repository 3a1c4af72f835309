"""Distortion measurement and spectral rank certificates.

Distortion is reported as the worst multiplicative error of squared norms
(or squared pairwise distances) under a linear map.  The spectral
certificate summarizes the Gram matrix A^T A by its trace, squared
Frobenius norm, and eigenvalues, and converts them into a rank lower bound
via the Cauchy-Schwarz inequality

    rank(A) >= tr(A^T A)^2 / ||A^T A||_F^2.

The audit ties both together: for a point set containing the standard
basis and a map that preserves all norms to within eps, the trace is
forced into the window [(1-eps) n, (1+eps) n], and the certificate then
bounds the number of rows from below.  The audit recomputes the trace
independently of the eigendecomposition (as the sum of squared entries,
which equals the sum over basis directions of ||A e_i||^2) so the two
routes check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embeddings import LinearMap
from .pointset import ROLE_BASIS, PointSet

MODE_NORM = "norm-preservation"
MODE_PAIRWISE = "pairwise"

# relative eigenvalue cutoff for counting "nonzero" spectrum
EIG_CUTOFF = 1e-10
# absorbs float rounding so the ceiling never exceeds the true rank
_RANK_SLACK = 1e-9

_JSON_RATIO_CAP = 100_000


class AuditError(ValueError):
    """The audited inputs violate a structural precondition."""


@dataclass(frozen=True, eq=False)
class DistortionReport:
    """Worst-case multiplicative error of squared norms or distances.

    ``ratios`` holds the preserved quantity after/before, one entry per
    point (norm mode) or per pair in lexicographic (i, j), i < j order
    (pairwise mode); items with zero reference norm carry no constraint
    and are listed in ``skipped`` (original indices) rather than in
    ``ratios``.  ``violating_index`` is the original enumeration index
    (point index, or flat pair index invertible by `pair_from_flat`) of
    the item achieving ``eps_max``, lowest index on ties, None when every
    item was skipped.
    """

    mode: str
    ratios: np.ndarray
    eps_max: float
    violating_index: int | None
    skipped: tuple[int, ...] = ()

    def to_json(self) -> dict:
        ratios = None
        if self.ratios.size <= _JSON_RATIO_CAP:
            ratios = [float(v) for v in self.ratios]
        return {
            "mode": self.mode,
            "eps_max": self.eps_max,
            "violating_index": self.violating_index,
            "n_ratios": int(self.ratios.size),
            "ratios": ratios,
            "skipped": list(self.skipped),
        }


@dataclass(frozen=True, eq=False)
class SpectralCertificate:
    """Trace, squared Frobenius norm, and spectrum of A^T A plus the rank bound."""

    trace: float
    frob_sq: float
    eigenvalues: np.ndarray
    rank_lb: int

    def nonzero_count(self) -> int:
        """Eigenvalues above the relative cutoff EIG_CUTOFF * lambda_1."""
        if self.eigenvalues.size == 0 or self.eigenvalues[0] <= 0.0:
            return 0
        return int(np.count_nonzero(self.eigenvalues > EIG_CUTOFF * self.eigenvalues[0]))

    def to_json(self) -> dict:
        return {
            "trace": self.trace,
            "frob_sq": self.frob_sq,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "rank_lb": self.rank_lb,
        }


@dataclass(frozen=True, eq=False)
class AuditReport:
    """Outcome of the basis-trace audit of a map against a point set."""

    eps: float
    eps_max: float
    precondition_ok: bool
    trace: float
    trace_window_ok: bool
    frob_sq: float
    eigenvalues: np.ndarray
    rank_lb: int
    rank_ok: bool
    witness_deviation: float
    m: int
    n: int
    notes: str

    @property
    def ok(self) -> bool:
        return self.precondition_ok and self.trace_window_ok and self.rank_ok

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "eps_max": self.eps_max,
            "precondition_ok": self.precondition_ok,
            "trace": self.trace,
            "trace_window_ok": self.trace_window_ok,
            "frob_sq": self.frob_sq,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "rank_lb": self.rank_lb,
            "rank_ok": self.rank_ok,
            "witness_deviation": self.witness_deviation,
            "m": self.m,
            "n": self.n,
            "notes": self.notes,
        }


def _rowsq(M: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->i", M, M)


def _normalize_mode(mode: str) -> str:
    if mode in (MODE_NORM, "norm"):
        return MODE_NORM
    if mode == MODE_PAIRWISE:
        return MODE_PAIRWISE
    raise ValueError(f"mode must be '{MODE_NORM}' or '{MODE_PAIRWISE}', got {mode!r}")


def distortion(A: LinearMap, X: PointSet, mode: str = MODE_NORM) -> DistortionReport:
    """Measure the worst multiplicative error of A on X.

    Norm mode compares ‖Ax‖² to ‖x‖² point by point; pairwise mode
    compares squared distances over all N(N-1)/2 unordered pairs.
    """
    mode = _normalize_mode(mode)
    if A.n != X.dim:
        raise ValueError(f"map has {A.n} columns but the set has dimension {X.dim}")
    P = X.points
    if mode == MODE_NORM:
        before = _rowsq(P)
        after = _rowsq(A.apply(P))
    else:
        before = _pair_sq_dists(P)
        after = _pair_sq_dists(A.apply(P))
    keep = before > 0.0
    keep_idx = np.where(keep)[0]
    skipped = tuple(int(i) for i in np.where(~keep)[0])
    ratios = after[keep] / before[keep]
    if ratios.size:
        dev = np.abs(ratios - 1.0)
        j = int(np.argmax(dev))
        eps_max = float(dev[j])
        violating = int(keep_idx[j])
    else:
        eps_max = 0.0
        violating = None
    return DistortionReport(
        mode=mode, ratios=ratios, eps_max=eps_max, violating_index=violating, skipped=skipped
    )


def _pair_sq_dists(P: np.ndarray) -> np.ndarray:
    """Squared distances over pairs (i, j), i < j, in lexicographic order."""
    N = P.shape[0]
    out = np.empty(N * (N - 1) // 2)
    pos = 0
    for i in range(N - 1):
        diff = P[i + 1 :] - P[i]
        out[pos : pos + N - 1 - i] = _rowsq(diff)
        pos += N - 1 - i
    return out


def pair_from_flat(N: int, flat: int) -> tuple[int, int]:
    """Invert the lexicographic pair enumeration used by pairwise mode."""
    if not 0 <= flat < N * (N - 1) // 2:
        raise ValueError(f"flat index {flat} out of range for N={N}")
    i = 0
    block = N - 1
    while flat >= block:
        flat -= block
        i += 1
        block -= 1
    return i, i + 1 + flat


def spectral_certificate(A: LinearMap) -> SpectralCertificate:
    """Certificate for A: trace and Frobenius data of A^T A plus eigenvalues.

    The trace is computed directly from the entries (sum over basis
    directions of ‖Ae_i‖²) rather than from the spectrum, so eigensolver
    error cannot contaminate it.  Eigenvalues are returned descending with
    negative rounding noise clipped to zero.
    """
    E = A.entries
    gram = E.T @ E
    trace = float(np.einsum("ij,ij->", E, E))
    frob_sq = float(np.einsum("ij,ij->", gram, gram))
    try:
        lam = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigensolver failed on a {A.n}x{A.n} Gram matrix: {exc}") from exc
    lam = np.maximum(lam[::-1], 0.0)
    return SpectralCertificate(
        trace=trace, frob_sq=frob_sq, eigenvalues=lam, rank_lb=_cs_rank_lb(trace, frob_sq)
    )


def _cs_rank_lb(trace: float, frob_sq: float) -> int:
    if frob_sq == 0.0:
        return 0
    return int(math.ceil(trace * trace / frob_sq - _RANK_SLACK))


def rank_lower_bound(cert: SpectralCertificate) -> int:
    """Cauchy-Schwarz rank bound ceil(trace² / frob_sq); 0 for the zero map."""
    return _cs_rank_lb(cert.trace, cert.frob_sq)


def witness_search(A: LinearMap, V: PointSet) -> tuple[np.ndarray, float]:
    """Point of V whose squared image deviates most from the trace.

    Deviation is |‖Av‖² - tr(A^T A)| / ‖A^T A‖_F, the scale on which tail
    bounds for gaussian inputs are stated.  Returns the witness (a copy)
    and its deviation; ties break toward the lowest index.  Scaling A by
    c > 0 multiplies numerator and denominator by c² alike, so both the
    argmax and the deviation value are scale-invariant.
    """
    if len(V) == 0:
        raise ValueError("cannot search an empty point set")
    if A.n != V.dim:
        raise ValueError(f"map has {A.n} columns but the set has dimension {V.dim}")
    cert = spectral_certificate(A)
    frob = math.sqrt(cert.frob_sq)
    if frob == 0.0:
        raise ValueError("zero map: witness deviation is undefined")
    dev = np.abs(_rowsq(A.apply(V.points)) - cert.trace) / frob
    j = int(np.argmax(dev))
    return V.points[j].copy(), float(dev[j])


def audit_embedding(A: LinearMap, X: PointSet, eps: float) -> AuditReport:
    """Audit the trace-window and rank consequences of eps-preservation.

    Requires X to contain every standard basis vector of its dimension
    exactly (raises `AuditError` otherwise).  Measures the true norm
    distortion of A on X, checks the implied trace window
    [(1-eps) n, (1+eps) n], computes the spectral certificate, and asserts
    rank_lb <= m.  Nothing is trusted from a single route: the trace used
    for the window comes from entry sums, never from the spectrum.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if A.n != X.dim:
        raise ValueError(f"map has {A.n} columns but the set has dimension {X.dim}")
    n = X.dim
    missing = _missing_basis(X)
    if missing:
        raise AuditError(
            f"point set lacks exact standard basis vector(s), first missing e_{missing[0] + 1}"
        )
    report = distortion(A, X, MODE_NORM)
    precondition_ok = report.eps_max <= eps
    E = A.entries
    trace = float(np.einsum("ij,ij->", E, E))
    trace_window_ok = (1.0 - eps) * n <= trace <= (1.0 + eps) * n
    cert = spectral_certificate(A)
    _, wdev = witness_search(A, X)
    rank_ok = cert.rank_lb <= A.m
    notes: list[str] = []
    if not precondition_ok:
        notes.append(f"measured eps_max={report.eps_max:.6g} exceeds eps={eps:g}")
    if not trace_window_ok:
        notes.append(f"trace {trace:.6g} outside [{(1 - eps) * n:.6g}, {(1 + eps) * n:.6g}]")
    if not rank_ok:
        notes.append(f"rank_lb={cert.rank_lb} exceeds m={A.m}")
    if A.m > A.n:
        notes.append(f"map has more rows than columns (m={A.m} > n={A.n})")
    return AuditReport(
        eps=eps,
        eps_max=report.eps_max,
        precondition_ok=precondition_ok,
        trace=trace,
        trace_window_ok=trace_window_ok,
        frob_sq=cert.frob_sq,
        eigenvalues=cert.eigenvalues,
        rank_lb=cert.rank_lb,
        rank_ok=rank_ok,
        witness_deviation=wdev,
        m=A.m,
        n=A.n,
        notes="; ".join(notes),
    )


def _missing_basis(X: PointSet) -> list[int]:
    P = X.points
    n = X.dim
    hit = np.zeros(n, dtype=bool)
    cand = np.where(
        (np.count_nonzero(P, axis=1) == 1) & (P.max(axis=1) == 1.0) & (P.min(axis=1) >= 0.0)
    )[0]
    for i in cand:
        hit[int(np.argmax(P[i]))] = True
    return [int(j) for j in np.where(~hit)[0]]
