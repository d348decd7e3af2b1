"""Ordinal partition sequences and the weighted, undirected ordinal partition network."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DegenerateError, InvalidInputError, InvalidWeightError, ParameterError, SignalLengthError


def permutation_of(window):
    """Ordinal pattern of ``window``: the index order that sorts it ascending.

    Ties keep the earlier index first.

    >>> permutation_of([1.0, 3.0, 2.0])
    (0, 2, 1)
    """
    w = np.asarray(window, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise InvalidInputError("window must be a vector of length >= 2")
    if not np.all(np.isfinite(w)):
        raise InvalidInputError("window contains non-finite values")
    return tuple(int(i) for i in np.argsort(w, kind="stable"))


def perm_str(perm):
    return "-".join(str(i) for i in perm)


def parse_perm(text):
    return tuple(int(i) for i in text.split("-"))


@dataclass(frozen=True)
class PermutationSequence:
    """Time-ordered ordinal patterns, one row per delay vector."""

    patterns: np.ndarray  # (length, n) int
    n: int
    tau: int

    def __len__(self):
        return self.patterns.shape[0]

    @property
    def symbols(self):
        return [tuple(int(v) for v in row) for row in self.patterns]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "permutation"])
            for i, row in enumerate(self.patterns):
                w.writerow([i, perm_str(row)])

    @classmethod
    def from_csv(cls, path, tau=1):
        with open(path, newline="") as fh:
            pats = [parse_perm(r["permutation"]) for r in csv.DictReader(fh)]
        arr = np.array(pats, dtype=np.int64)
        return cls(arr, arr.shape[1], tau)


def embed(signal, n, tau):
    """Ordinal pattern of every delay vector ``[x_i, x_{i+tau}, ..., x_{i+(n-1)tau}]``."""
    x = np.asarray(getattr(signal, "samples", signal), dtype=float)
    if n < 2 or tau < 1 or int(n) != n or int(tau) != tau:
        raise ParameterError(f"need integer n >= 2 and tau >= 1, got n={n}, tau={tau}")
    n, tau = int(n), int(tau)
    span = tau * (n - 1)
    if x.size <= span:
        raise SignalLengthError(f"signal of length {x.size} too short for n={n}, tau={tau}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("signal contains non-finite values")
    windows = sliding_window_view(x, span + 1)[:, ::tau]
    return PermutationSequence(np.argsort(windows, axis=1, kind="stable"), n, tau)


@dataclass
class WeightedNetwork:
    """Simple undirected graph with nonnegative edge weights.

    ``adjacency[i, j]`` is the weight between ``vertices[i]`` and
    ``vertices[j]`` (0 means no edge).
    """

    vertices: list
    adjacency: np.ndarray
    index: dict = field(default=None, repr=False)

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] != len(self.vertices):
            raise InvalidInputError("adjacency must be square and match the vertex list")
        if not np.array_equal(a, a.T):
            raise InvalidInputError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise InvalidInputError("self-loops are not allowed")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise InvalidWeightError("edge weights must be finite and nonnegative")
        self.adjacency = a
        self.index = {v: i for i, v in enumerate(self.vertices)}

    @classmethod
    def from_edges(cls, n_vertices, edges, vertices=None):
        """Build from ``(u, v, weight)`` triples over vertices ``0..n_vertices-1``.

        Repeated edges accumulate weight.
        """
        dtype = int if all(float(w).is_integer() for *_, w in edges) else float
        a = np.zeros((n_vertices, n_vertices), dtype=dtype)
        for u, v, w in edges:
            if u == v:
                raise InvalidInputError("self-loops are not allowed")
            if not w > 0:
                raise InvalidWeightError(f"edge ({u}, {v}) has non-positive weight {w}")
            a[u, v] += w
            a[v, u] += w
        return cls(list(range(n_vertices)) if vertices is None else list(vertices), a)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def unweighted(self):
        return (self.adjacency > 0).astype(int)

    @property
    def degree(self):
        """Number of incident edges per vertex."""
        return self.unweighted.sum(axis=1)

    def edges(self):
        iu, ju = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j), self.adjacency[i, j].item()) for i, j in zip(iu, ju)]

    @property
    def total_weight(self):
        return self.adjacency.sum() / 2

    def components(self):
        """Connected components as sorted vertex-index lists, ordered by smallest member."""
        from scipy.sparse.csgraph import connected_components

        k, lab = connected_components(self.unweighted, directed=False)
        comps = [np.flatnonzero(lab == c).tolist() for c in range(k)]
        return sorted(comps, key=lambda c: c[0])

    def is_connected(self):
        return self.n_vertices > 0 and len(self.components()) == 1

    def to_csv(self, edge_path, vertex_path):
        """Write the edge list (u, v, weight) and the vertex table (index, permutation)."""
        with open(edge_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "v", "weight"])
            for u, v, wt in self.edges():
                w.writerow([u, v, wt])
        with open(vertex_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "permutation"])
            for i, v in enumerate(self.vertices):
                w.writerow([i, perm_str(v) if isinstance(v, tuple) else v])

    @classmethod
    def from_csv(cls, edge_path, vertex_path):
        with open(vertex_path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        verts = []
        for r in rows:
            p = r["permutation"]
            verts.append(parse_perm(p) if "-" in p else int(p))
        with open(edge_path, newline="") as fh:
            edges = []
            for r in csv.DictReader(fh):
                w = float(r["weight"])
                edges.append((int(r["u"]), int(r["v"]), int(w) if w.is_integer() else w))
        return cls.from_edges(len(verts), edges, vertices=verts)


def build_network(seq):
    """Weighted OPN from a pattern sequence.

    Vertices are distinct patterns in order of first appearance.  Each
    consecutive pair of *different* patterns adds 1 to their undirected edge
    weight; repeats are dropped.
    """
    pats = seq.patterns if isinstance(seq, PermutationSequence) else np.asarray(seq)
    if pats.ndim == 1:
        pats = pats[:, None]
    if pats.shape[0] < 2:
        raise SignalLengthError("need at least two symbols to form transitions")
    _, first, inverse = np.unique(pats, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    ids = relabel[inverse]
    k = order.size
    if k < 2:
        raise DegenerateError("all symbols identical: network has a single vertex and no edges")
    src, dst = ids[:-1], ids[1:]
    moved = src != dst
    a = np.zeros((k, k), dtype=np.int64)
    np.add.at(a, (src[moved], dst[moved]), 1)
    a = a + a.T
    verts = [tuple(int(v) for v in pats[first[i]]) for i in order]
    return WeightedNetwork(verts, a)


def cycle_graph(n, weight=1):
    """Cycle ``C_n`` with uniform edge weight."""
    if n < 3:
        raise ParameterError("a cycle needs at least 3 vertices")
    return WeightedNetwork.from_edges(n, [(i, (i + 1) % n, weight) for i in range(n)])


def cut_cycle(n, weight=10, chord=(0, 8), chord_weight=1):
    """Heavy cycle ``C_n`` plus one light chord splitting it in two loops."""
    u, v = chord
    if not (0 <= u < n and 0 <= v < n) or abs(u - v) in (0, 1, n - 1):
        raise ParameterError("chord must join two non-adjacent cycle vertices")
    edges = [(i, (i + 1) % n, weight) for i in range(n)] + [(u, v, chord_weight)]
    return WeightedNetwork.from_edges(n, edges)


def ordinal_network(signal, n, tau):
    """Signal -> pattern sequence -> weighted OPN."""
    return build_network(embed(signal, n, tau))


def max_vertices(n):
    return math.factorial(n)
