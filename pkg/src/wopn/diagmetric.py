"""Bottleneck distance between persistence diagrams.

Exact: the answer is one of the candidate costs (pairwise L-infinity distances
and half-lifetimes), so we binary-search that sorted set and test each
threshold with a maximum bipartite matching.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import DegenerateError, InvalidInputError
from .persistence import PersistenceDiagram


def _points(diag, dim):
    p = diag[dim] if isinstance(diag, PersistenceDiagram) else np.asarray(diag, dtype=float)
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("bottleneck needs finite pairs; drop essential classes first")
    return p


def _linf(a, b):
    return np.maximum(np.abs(a[:, None, 0] - b[None, :, 0]), np.abs(a[:, None, 1] - b[None, :, 1]))


def _feasible(cross, half_a, half_b, delta):
    """Is there a matching of cost <= delta?

    Left side: points of A, then one diagonal slot per point of B.
    Right side: points of B, then one diagonal slot per point of A.
    """
    m, k = cross.shape
    ra, ca = np.nonzero(cross <= delta)
    rows = [ra, np.flatnonzero(half_a <= delta)]
    cols = [ca, k + np.flatnonzero(half_a <= delta)]
    jb = np.flatnonzero(half_b <= delta)
    rows.append(m + jb)
    cols.append(jb)
    # diagonal-to-diagonal is free
    di, dj = np.meshgrid(np.arange(k), np.arange(m), indexing="ij")
    rows.append(m + di.ravel())
    cols.append(k + dj.ravel())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    size = m + k
    g = csr_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(size, size))
    match = maximum_bipartite_matching(g, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(d1, d2, dim=1):
    """Exact bottleneck distance between the finite ``dim`` pairs of two diagrams.

    Accepts :class:`PersistenceDiagram` objects or ``(k, 2)`` arrays.
    """
    a = _points(d1, dim)
    b = _points(d2, dim)
    if a.shape[0] == 0 and b.shape[0] == 0:
        return 0.0
    half_a = (a[:, 1] - a[:, 0]) / 2.0
    half_b = (b[:, 1] - b[:, 0]) / 2.0
    if a.shape[0] == 0:
        return float(half_b.max())
    if b.shape[0] == 0:
        return float(half_a.max())
    cross = _linf(a, b)
    cand = np.unique(np.concatenate([[0.0], cross.ravel(), half_a, half_b]))
    lo, hi = 0, cand.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(cross, half_a, half_b, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def brute_force_bottleneck(d1, d2, dim=1):
    """Minimum over every partial matching of its cost; exponential, tiny inputs only."""
    a = _points(d1, dim)
    b = _points(d2, dim)
    half_a = (a[:, 1] - a[:, 0]) / 2.0
    half_b = (b[:, 1] - b[:, 0]) / 2.0
    best = np.inf
    m, k = len(a), len(b)
    for r in range(min(m, k) + 1):
        for sa in itertools.combinations(range(m), r):
            for sb in itertools.permutations(range(k), r):
                costs = [0.0]
                costs += [max(abs(a[i, 0] - b[j, 0]), abs(a[i, 1] - b[j, 1])) for i, j in zip(sa, sb)]
                costs += [half_a[i] for i in range(m) if i not in sa]
                costs += [half_b[j] for j in range(k) if j not in sb]
                best = min(best, max(costs))
    return float(best)


def total_persistence(diag, dim=1):
    p = _points(diag, dim)
    return float(np.sum(p[:, 1] - p[:, 0]))


def normalized_bottleneck(reference, other, dim=1):
    """Bottleneck distance over half the total persistence of ``reference``."""
    denom = 0.5 * total_persistence(reference, dim)
    if not denom > 0:
        raise DegenerateError("reference diagram has zero total persistence")
    return bottleneck(reference, other, dim) / denom


@dataclass(frozen=True)
class DiagramDistanceMatrix:
    values: np.ndarray
    labels: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] != len(self.labels):
            raise InvalidInputError("matrix must be square with one label per row")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", tuple(self.labels))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.labels)
            for row in self.values:
                w.writerow([repr(float(x)) for x in row])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        return cls(np.array([[float(x) for x in r] for r in rows[1:]]), tuple(rows[0]))


def pairwise_bottleneck(diagrams, labels=None, dim=1):
    """Symmetric matrix of bottleneck distances between all pairs of diagrams."""
    if len(diagrams) < 2:
        raise InvalidInputError("need at least two diagrams")
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(len(diagrams)))
    if len(labels) != len(diagrams):
        raise InvalidInputError("one label per diagram is required")
    n = len(diagrams)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            try:
                out[i, j] = out[j, i] = bottleneck(diagrams[i], diagrams[j], dim)
            except InvalidInputError as exc:
                raise InvalidInputError(f"diagrams {i} and {j}: {exc}") from exc
    return DiagramDistanceMatrix(out, labels)
