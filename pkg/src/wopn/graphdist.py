"""Vertex-to-vertex distances on a weighted network.

Four methods:

``SUPD``  shortest unweighted path: hop count of a minimum-hop path.
``SWPD``  shortest weighted path: hop count of the path minimising the sum of
          inverse edge weights (heavily used transitions are "short").
``WSPD``  weighted shortest path: sum of edge weights along that same path.
``DD``    lazy diffusion distance after ``t`` random-walk steps.

Ties between equal-cost paths are broken by always stepping back to the
lowest-indexed predecessor, and the value for a pair ``(a, b)`` is taken from
the search rooted at ``min(a, b)`` so every matrix is exactly symmetric.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra, shortest_path
from scipy.spatial.distance import pdist, squareform

from .errors import ConnectivityError, DegenerateError, InvalidWeightError, ParameterError

METHODS = ("SUPD", "SWPD", "WSPD", "DD")

# relative tolerance for treating two inverse-weight path costs as equal
COST_RTOL = 1e-9


@dataclass(frozen=True)
class DistanceMatrix:
    values: np.ndarray
    method: str
    t_steps: Optional[int] = None
    normalized: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown distance method {self.method!r}")

    @property
    def max(self):
        return float(self.values.max()) if self.values.size else 0.0

    def to_csv(self, path, labels=None):
        """Square CSV with a header row of vertex labels."""
        n = self.values.shape[0]
        labels = [str(i) for i in range(n)] if labels is None else [str(x) for x in labels]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(labels)
            for row in self.values:
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, method, t_steps=None, normalized=False):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        vals = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        return cls(vals, method, t_steps, normalized)


@dataclass(frozen=True)
class TransitionMatrix:
    values: np.ndarray
    lazy: bool


def _require_connected(net):
    comps = net.components()
    if len(comps) != 1:
        raise ConnectivityError(comps)


def _check_weights(net):
    a = net.adjacency
    if np.any(a < 0):
        raise InvalidWeightError("edge weights must be positive")


def shortest_unweighted_path(net):
    """Minimum edge count between every pair of vertices."""
    _require_connected(net)
    d = shortest_path(csr_matrix(net.unweighted), method="D", directed=False, unweighted=True)
    return DistanceMatrix(d.astype(float), "SUPD")


def _inverse_weight_paths(net):
    """Hop count and weight sum along the minimum inverse-weight path, all pairs.

    Returns ``(hops, wsum)`` taken row-wise from the search rooted at each
    source; callers symmetrise from the upper triangle.
    """
    _require_connected(net)
    _check_weights(net)
    a = np.asarray(net.adjacency, dtype=float)
    n = a.shape[0]
    inv = np.divide(1.0, a, out=np.zeros_like(a), where=a > 0)
    cost = np.where(a > 0, inv, np.inf)
    dist = dijkstra(csr_matrix(inv), directed=False)

    # pred[s, v]: lowest-index neighbour u of v with dist[s,u] + cost[u,v] == dist[s,v]
    pred = np.empty((n, n), dtype=np.int64)
    arange = np.arange(n)
    for s in range(n):
        cand = dist[s][:, None] + cost  # (u, v)
        target = dist[s][None, :]
        tight = np.abs(cand - target) <= COST_RTOL * np.maximum(target, np.finfo(float).tiny)
        tight[:, s] = False
        p = np.argmax(tight, axis=0)
        p[s] = s
        pred[s] = p

    # accumulate along predecessor chains by pointer jumping
    rows = arange[:, None]
    hops = (pred != arange[None, :]).astype(np.int64)
    step_w = np.where(hops > 0, a[pred, arange[None, :]], 0.0)
    wsum = step_w.copy()
    anc = pred.copy()
    for _ in range(max(1, int(np.ceil(np.log2(max(n, 2)))) + 1)):
        hops = hops + hops[rows, anc]
        wsum = wsum + wsum[rows, anc]
        anc = anc[rows, anc]
    return hops.astype(float), wsum


def _symmetrize_upper(m):
    u = np.triu(m, 1)
    return u + u.T


def shortest_weighted_path(net):
    """Hop count of the path minimising the sum of inverse weights."""
    hops, _ = _inverse_weight_paths(net)
    return DistanceMatrix(_symmetrize_upper(hops), "SWPD")


def weighted_shortest_path(net):
    """Sum of edge weights along the path minimising the sum of inverse weights."""
    _, wsum = _inverse_weight_paths(net)
    return DistanceMatrix(_symmetrize_upper(wsum), "WSPD")


def transition_matrix(net, lazy=True):
    """Row-normalised adjacency; the lazy form is ``(I + P) / 2``."""
    a = np.asarray(net.adjacency, dtype=float)
    rs = a.sum(axis=1)
    if np.any(rs == 0):
        raise DegenerateError(f"isolated vertices {np.flatnonzero(rs == 0).tolist()} give zero rows")
    p = a / rs[:, None]
    if lazy:
        p = 0.5 * (np.eye(a.shape[0]) + p)
    return TransitionMatrix(p, lazy)


def walk_matrix(net, t):
    """``t``-step lazy walk probabilities by repeated multiplication."""
    p = transition_matrix(net, lazy=True).values
    pt = p.copy()
    for _ in range(t - 1):
        pt = pt @ p
    return pt


def diffusion_distance(net, t):
    """``d_t(a,b) = sqrt(sum_c (Pt[a,c] - Pt[b,c])^2 / deg(c))`` with the lazy walk.

    ``deg`` is the number of incident edges (unweighted degree).
    """
    if int(t) != t or t < 1:
        raise ParameterError(f"walk length t must be an integer >= 1, got {t}")
    _require_connected(net)
    t = int(t)
    pt = walk_matrix(net, t)
    scaled = pt / np.sqrt(net.degree.astype(float))[None, :]
    d = squareform(pdist(scaled, "euclidean")) if pt.shape[0] > 1 else np.zeros((1, 1))
    return DistanceMatrix(d, "DD", t_steps=t)


def diameter(net):
    return int(shortest_unweighted_path(net).values.max())


def default_t(net, multiplier=2):
    """Walk length ``multiplier * diameter`` (2d unless told otherwise)."""
    return int(np.ceil(multiplier * diameter(net)))


def normalize(d):
    """Divide by the largest entry so the maximum becomes exactly 1."""
    m = d.values.max() if d.values.size else 0.0
    if not m > 0:
        raise DegenerateError("cannot normalise an all-zero distance matrix")
    vals = d.values / m
    vals[d.values == m] = 1.0
    return DistanceMatrix(vals, d.method, d.t_steps, normalized=True)


def distance_matrix(net, method, t=None, normalized=False, t_multiplier=2):
    """Dispatch on method name; ``t`` defaults to ``t_multiplier * diameter`` for DD."""
    method = method.upper()
    if method == "SUPD":
        d = shortest_unweighted_path(net)
    elif method == "SWPD":
        d = shortest_weighted_path(net)
    elif method == "WSPD":
        d = weighted_shortest_path(net)
    elif method == "DD":
        d = diffusion_distance(net, default_t(net, t_multiplier) if t is None else t)
    else:
        raise ParameterError(f"unknown distance method {method!r}; choose from {METHODS}")
    return normalize(d) if normalized else d
