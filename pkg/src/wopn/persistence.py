"""Vietoris-Rips (flag) persistence of a distance matrix in dimensions 0 and 1.

The filtration adds every simplex of dimension <= 2 at the largest pairwise
distance among its vertices.  Simplices are totally ordered by (value,
dimension, lexicographic vertex tuple).  H0 comes from a union-find sweep over
the edges; H1 from reducing the coboundary matrix in reverse filtration order,
skipping edges already paired in H0 (clearing).  Coefficients are in Z/2.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit

from .errors import InvalidMatrixError, SizeError

MAX_VERTICES = 2000


@dataclass(frozen=True)
class PersistenceDiagram:
    """Birth/death pairs per homology dimension.

    ``pairs[d]`` is a ``(k, 2)`` float array; essential classes have
    ``death = inf``.
    """

    pairs: dict = field(default_factory=dict)

    def __getitem__(self, dim):
        return self.pairs.get(dim, np.empty((0, 2)))

    def finite(self, dim):
        p = self[dim]
        return p[np.isfinite(p[:, 1])]

    def lifetimes(self, dim):
        p = self.finite(dim)
        return p[:, 1] - p[:, 0]

    def nonzero(self):
        """Copy without zero-persistence pairs."""
        return PersistenceDiagram({d: p[p[:, 1] > p[:, 0]] for d, p in self.pairs.items()})

    def significant(self, dim=1, fraction=0.1):
        """Finite pairs whose lifetime exceeds ``fraction`` of the largest lifetime."""
        p = self.finite(dim)
        if p.shape[0] == 0:
            return p
        life = p[:, 1] - p[:, 0]
        return p[life > fraction * life.max()]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["dimension", "birth", "death"])
            for d in sorted(self.pairs):
                for b, e in self.pairs[d]:
                    w.writerow([d, repr(float(b)), "inf" if math.isinf(e) else repr(float(e))])

    @classmethod
    def from_csv(cls, path):
        rows = {}
        with open(path, newline="") as fh:
            for r in csv.DictReader(fh):
                rows.setdefault(int(r["dimension"]), []).append((float(r["birth"]), float(r["death"])))
        return cls({d: np.array(v, dtype=float).reshape(-1, 2) for d, v in rows.items()})


def max_lifetime(diag, dim=1):
    """Largest ``death - birth`` over finite pairs of dimension ``dim`` (0 if none)."""
    life = diag.lifetimes(dim)
    return float(life.max()) if life.size else 0.0


def count_pairs(diag, dim=1):
    """Number of finite pairs with positive lifetime in dimension ``dim``."""
    life = diag.lifetimes(dim)
    return int(np.count_nonzero(life > 0))


def count_significant(diag, dim=1, fraction=0.1):
    return int(diag.significant(dim, fraction).shape[0])


def _sorted_pairs(p):
    a = np.array(p, dtype=float).reshape(-1, 2)
    if a.shape[0]:
        a = a[np.lexsort((a[:, 1], a[:, 0]))]
    return a


def check_distance_matrix(d, max_vertices=MAX_VERTICES):
    d = np.asarray(getattr(d, "values", d), dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidMatrixError(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] > max_vertices:
        raise SizeError(f"{d.shape[0]} vertices exceeds the cap of {max_vertices}")
    if not np.all(np.isfinite(d)):
        raise InvalidMatrixError("distance matrix has non-finite entries")
    if np.any(d < 0):
        raise InvalidMatrixError("distance matrix has negative entries")
    if np.any(np.diag(d) != 0):
        raise InvalidMatrixError("distance matrix diagonal must be zero")
    scale = max(1.0, float(d.max())) if d.size else 1.0
    if not np.allclose(d, d.T, rtol=0, atol=1e-12 * scale):
        raise InvalidMatrixError("distance matrix is not symmetric")
    u = np.triu(d, 1)
    return u + u.T


def _filtration(d):
    """Rank-coded edge filtration: values, rank matrix, edges sorted by (rank, i, j)."""
    n = d.shape[0]
    iu, ju = np.triu_indices(n, 1)
    values = np.unique(d[iu, ju]) if iu.size else np.zeros(0)
    rank = np.searchsorted(values, d).astype(np.int64)
    er = rank[iu, ju]
    order = np.lexsort((ju, iu, er))
    return values, rank, iu[order].astype(np.int64), ju[order].astype(np.int64), er[order]


@njit(cache=True)
def _union_find_h0(n, ei, ej):
    parent = np.arange(n)
    negative = np.zeros(ei.size, dtype=np.bool_)
    for e in range(ei.size):
        a = ei[e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = ej[e]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
            negative[e] = True
    return negative


@njit(cache=True)
def _coboundary(i, j, re, rank, n):
    """Sort keys (rank * n^3 + lex code) of the triangles containing edge (i, j)."""
    n3 = n * n * n
    out = np.empty(n - 2, dtype=np.int64)
    m = 0
    for k in range(n):
        if k == i or k == j:
            continue
        r = re
        if rank[i, k] > r:
            r = rank[i, k]
        if rank[j, k] > r:
            r = rank[j, k]
        if k < i:
            code = (k * n + i) * n + j
        elif k < j:
            code = (i * n + k) * n + j
        else:
            code = (i * n + j) * n + k
        out[m] = r * n3 + code
        m += 1
    return out


@njit(cache=True)
def _xor_sorted(a, b):
    out = np.empty(a.size + b.size, dtype=np.int64)
    i = 0
    j = 0
    m = 0
    while i < a.size and j < b.size:
        if a[i] < b[j]:
            out[m] = a[i]
            i += 1
            m += 1
        elif b[j] < a[i]:
            out[m] = b[j]
            j += 1
            m += 1
        else:
            i += 1
            j += 1
    while i < a.size:
        out[m] = a[i]
        i += 1
        m += 1
    while j < b.size:
        out[m] = b[j]
        j += 1
        m += 1
    return out[:m]


@njit(cache=True)
def _h1_cohomology(n, rank, ei, ej, er, negative):
    """Pairs (edge rank, triangle rank) for H1; death rank -1 marks an essential class."""
    n3 = n * n * n
    owner = dict()
    owner[np.int64(-1)] = np.int64(-1)
    reduced = dict()
    reduced[np.int64(-1)] = np.empty(0, dtype=np.int64)
    births = []
    deaths = []
    for e in range(ei.size - 1, -1, -1):
        if negative[e]:
            continue
        col = _coboundary(ei[e], ej[e], er[e], rank, n)
        if col.size == 0:
            births.append(er[e])
            deaths.append(np.int64(-1))
            continue
        piv = col.min()
        if piv in owner:
            col = np.sort(col)
            while col.size > 0 and col[0] in owner:
                other = owner[col[0]]
                if other in reduced:
                    ocol = reduced[other]
                else:
                    ocol = np.sort(_coboundary(ei[other], ej[other], er[other], rank, n))
                col = _xor_sorted(col, ocol)
            if col.size == 0:
                births.append(er[e])
                deaths.append(np.int64(-1))
                continue
            piv = col[0]
            reduced[np.int64(e)] = col
        owner[piv] = np.int64(e)
        births.append(er[e])
        deaths.append(piv // n3)
    return np.array(births, dtype=np.int64), np.array(deaths, dtype=np.int64)


def rips_persistence(d, max_dim=1, keep_zero=False, max_vertices=MAX_VERTICES):
    """H0 and H1 diagrams of the flag filtration of distance matrix ``d``.

    Births and deaths are filtration values.  The one essential H0 class per
    connected input is reported with ``death = inf``.  Zero-persistence pairs
    are dropped unless ``keep_zero``.
    """
    if max_dim not in (0, 1):
        raise InvalidMatrixError("only dimensions 0 and 1 are supported")
    d = check_distance_matrix(d, max_vertices)
    n = d.shape[0]
    if n == 0:
        return PersistenceDiagram({0: np.empty((0, 2)), 1: np.empty((0, 2))})
    values, rank, ei, ej, er = _filtration(d)
    negative = _union_find_h0(n, ei, ej) if ei.size else np.zeros(0, dtype=bool)

    h0 = [(0.0, float(values[r])) for r in er[negative]]
    h0 += [(0.0, math.inf)] * (n - int(negative.sum()))
    pairs = {0: h0}
    if max_dim >= 1:
        if ei.size:
            b, dr = _h1_cohomology(n, rank, ei, ej, er, negative)
            deaths = np.where(dr >= 0, values[np.maximum(dr, 0)], np.inf)
            pairs[1] = list(zip(values[b].tolist(), deaths.tolist()))
        else:
            pairs[1] = []
    out = {k: _sorted_pairs(v) for k, v in pairs.items()}
    diag = PersistenceDiagram(out)
    return diag if keep_zero else diag.nonzero()


def naive_rips_persistence(d, keep_zero=False):
    """Textbook boundary-matrix reduction over explicitly enumerated simplices.

    Independent of :func:`rips_persistence`; meant for small inputs only.
    """
    d = check_distance_matrix(d, max_vertices=40)
    n = d.shape[0]
    simplices = [((0.0, 0, (i,)), (i,)) for i in range(n)]
    for s in itertools.combinations(range(n), 2):
        simplices.append(((d[s], 1, s), s))
    for s in itertools.combinations(range(n), 3):
        v = max(d[s[0], s[1]], d[s[0], s[2]], d[s[1], s[2]])
        simplices.append(((v, 2, s), s))
    simplices.sort(key=lambda x: x[0])
    index = {s: k for k, (_, s) in enumerate(simplices)}
    columns = []
    for _, s in simplices:
        if len(s) == 1:
            columns.append(set())
        else:
            columns.append({index[f] for f in itertools.combinations(s, len(s) - 1)})
    low_owner = {}
    paired = set()
    pairs = {0: [], 1: []}
    for j, col in enumerate(columns):
        while col and max(col) in low_owner:
            col ^= columns[low_owner[max(col)]]
        if col:
            i = max(col)
            low_owner[i] = j
            paired.update((i, j))
            dim = len(simplices[i][1]) - 1
            if dim <= 1:
                pairs[dim].append((simplices[i][0][0], simplices[j][0][0]))
    for k, (key, s) in enumerate(simplices):
        if k not in paired and len(s) <= 2 and not columns[k]:
            pairs[len(s) - 1].append((key[0], math.inf))
    diag = PersistenceDiagram({k: _sorted_pairs(v) for k, v in pairs.items()})
    return diag if keep_zero else diag.nonzero()
