"""MDS embedding of diagram distances and RBF-SVM separation of dynamic states."""

from __future__ import annotations

import json
import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InvalidInputError, LabelError, ParameterError

MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream (Steele, Lea & Flood 2014); portable and platform independent."""

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, size):
        """Doubles in [0, 1) from the top 53 bits."""
        return np.array([(self.next_u64() >> 11) * 2.0**-53 for _ in range(int(size))])


# ------------------------------------------------------------------- MDS


@dataclass
class Embedding:
    points: np.ndarray
    stress: float
    seed: int
    history: list = field(default_factory=list, repr=False)
    restart: int = 0

    def to_csv(self, path, labels):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["label"] + [f"x{k}" if k > 1 else "xy"[k] for k in range(self.points.shape[1])])
            for lab, p in zip(labels, self.points):
                w.writerow([lab] + [repr(float(v)) for v in p])


def stress(d, x):
    """Sum over ordered pairs ``i != j`` of ``(d_ij - |x_i - x_j|)^2``."""
    diff = squareform(d, checks=False) - pdist(x)
    return float(2.0 * np.dot(diff, diff))


def smacof(d, x0, max_iter=300, eps=1e-3):
    """Guttman-transform iterations from ``x0``.

    Stops when the relative stress decrease drops below ``eps``.  Returns
    ``(x, stress, history)``; ``history`` holds the stress of every iterate.
    """
    n = d.shape[0]
    x = np.array(x0, dtype=float)
    history = [stress(d, x)]
    for _ in range(max_iter):
        dist = squareform(pdist(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            b = np.where(dist > 0, -d / dist, 0.0)
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        x = b @ x / n
        s = stress(d, x)
        prev = history[-1]
        history.append(s)
        if s == 0 or prev - s <= eps * prev:
            break
    return x, history[-1], history


def mds_embed(d, dims=2, seed=0, n_init=4, max_iter=300, eps=1e-3):
    """Metric MDS by SMACOF; best of ``n_init`` random starts.

    Initial configurations are uniform on [0, 1) drawn from one splitmix64
    stream seeded with ``seed``; restart ``k`` uses the ``k``-th block.
    Ties in final stress go to the earliest restart.
    """
    vals = np.asarray(getattr(d, "values", d), dtype=float)
    if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
        raise InvalidInputError("distance matrix must be square")
    if dims < 1:
        raise ParameterError("dims must be >= 1")
    if not np.all(np.isfinite(vals)) or np.any(vals < 0) or not np.allclose(vals, vals.T):
        raise InvalidInputError("distance matrix must be finite, nonnegative and symmetric")
    n = vals.shape[0]
    rng = SplitMix64(seed)
    best = None
    for k in range(n_init):
        x0 = rng.uniform(n * dims).reshape(n, dims)
        x, s, hist = smacof(vals, x0, max_iter, eps)
        if best is None or s < best.stress:
            best = Embedding(x, s, int(seed), hist, k)
    return best


# ------------------------------------------------------------------- SVM


def rbf_kernel(a, b, gamma):
    sq = np.sum(a * a, 1)[:, None] + np.sum(b * b, 1)[None, :] - 2.0 * a @ b.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def auto_gamma(x):
    """``1 / (n_features * mean per-feature variance)``; 1.0 for constant input."""
    x = np.asarray(x, dtype=float)
    v = float(np.mean(x.var(axis=0)))
    return 1.0 / (x.shape[1] * v) if v > 0 else 1.0


@dataclass
class SvmModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for the support vectors
    bias: float
    gamma: float
    C: float
    classes: tuple
    iterations: int = 0

    def decision_function(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.support_vectors.shape[0] == 0:
            return np.full(x.shape[0], self.bias)
        return rbf_kernel(x, self.support_vectors, self.gamma) @ self.dual_coef + self.bias

    def predict(self, x):
        f = self.decision_function(x)
        return np.where(f > 0, self.classes[1], self.classes[0])


def _smo(K, y, C, tol, max_iter):
    """Soft-margin SVM dual by SMO with second-order working-set selection.

    Minimises ``0.5 a'Qa - sum(a)`` s.t. ``0 <= a <= C``, ``y'a = 0``.
    Returns ``(alpha, rho, iterations)``.
    """
    n = y.size
    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    G = -np.ones(n)
    diagQ = np.diag(Q).copy()
    tau = 1e-12
    it = 0
    while it < max_iter:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            break
        score = -y * G
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        gmax = score[i]
        gmin = score[low].min()
        if gmax - gmin < tol:
            break
        cand = low & (score < gmax)
        b = gmax - score[cand]
        a = diagQ[i] + diagQ[cand] - 2.0 * y[i] * y[cand] * Q[i, cand]
        a = np.where(a > 0, a, tau)
        j = int(np.flatnonzero(cand)[np.argmin(-(b * b) / a)])

        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = diagQ[i] + diagQ[j] + 2.0 * Q[i, j]
            quad = quad if quad > 0 else tau
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ni, nj = ai + delta, aj + delta
            if diff > 0:
                if nj < 0:
                    nj, ni = 0.0, diff
            elif ni < 0:
                ni, nj = 0.0, -diff
            if diff > 0:
                if ni > C:
                    ni, nj = C, C - diff
            elif nj > C:
                nj, ni = C, C + diff
        else:
            quad = diagQ[i] + diagQ[j] - 2.0 * Q[i, j]
            quad = quad if quad > 0 else tau
            delta = (G[i] - G[j]) / quad
            s = ai + aj
            ni, nj = ai - delta, aj + delta
            if s > C:
                if ni > C:
                    ni, nj = C, s - C
            elif nj < 0:
                nj, ni = 0.0, s
            if s > C:
                if nj > C:
                    nj, ni = C, s - C
            elif ni < 0:
                ni, nj = 0.0, s
        G += Q[:, i] * (ni - ai) + Q[:, j] * (nj - aj)
        alpha[i], alpha[j] = ni, nj
        it += 1

    yG = y * G
    at_ub = alpha >= C
    at_lb = alpha <= 0
    free = ~at_ub & ~at_lb
    if free.any():
        rho = float(yG[free].mean())
    else:
        ub_set = (at_ub & (y < 0)) | (at_lb & (y > 0))
        lb_set = (at_ub & (y > 0)) | (at_lb & (y < 0))
        ub = yG[ub_set].min() if ub_set.any() else np.inf
        lb = yG[lb_set].max() if lb_set.any() else -np.inf
        rho = float((ub + lb) / 2.0)
    return alpha, rho, it


def svm_train(points, labels, C=1.0, gamma="auto", tol=1e-3, max_iter=100_000):
    """RBF soft-margin SVM.

    ``gamma="auto"`` uses :func:`auto_gamma`.  The two classes are sorted; the
    larger one maps to the positive side of the decision function.
    """
    x = np.asarray(points, dtype=float)
    labels = np.asarray(labels)
    classes = tuple(sorted(set(labels.tolist())))
    if len(classes) != 2:
        raise LabelError(f"need exactly two classes, got {list(classes)}")
    if x.ndim != 2 or x.shape[0] != labels.size:
        raise InvalidInputError("points must be (n, k) with one label each")
    if not C > 0:
        raise ParameterError("C must be positive")
    g = auto_gamma(x) if gamma == "auto" else float(gamma)
    y = np.where(labels == classes[1], 1.0, -1.0)
    K = rbf_kernel(x, x, g)
    alpha, rho, it = _smo(K, y, C, tol, max_iter)
    sv = alpha > 0
    return SvmModel(x[sv].copy(), (alpha * y)[sv], -rho, g, float(C), classes, it)


def accuracy(model, points, labels):
    return float(np.mean(model.predict(points) == np.asarray(labels)))


def separation_accuracy(d, seeds, labels=None, C=1.0, gamma="auto", dims=2):
    """Training-set accuracy of MDS -> RBF-SVM, one run per seed.

    Returns ``(mean, std)`` over seeds (population std).
    """
    labels = np.asarray(d.labels if labels is None else labels)
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size != 2 or counts.min() < 2:
        raise LabelError("need at least two diagrams of each of two classes")
    seeds = list(seeds)
    if not seeds:
        raise ParameterError("need at least one seed")
    accs = []
    for s in seeds:
        emb = mds_embed(d, dims=dims, seed=s)
        model = svm_train(emb.points, labels, C=C, gamma=gamma)
        accs.append(accuracy(model, emb.points, labels))
    accs = np.array(accs)
    return float(accs.mean()), float(accs.std())


def accuracy_report(method, normalized, mean, std, seeds):
    return {"method": method, "normalized": bool(normalized), "mean": mean, "std": std, "seeds": list(seeds)}


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
