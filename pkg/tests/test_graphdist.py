import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wopn.errors import ConnectivityError, DegenerateError, InvalidWeightError, ParameterError
from wopn.graphdist import (
    DistanceMatrix,
    default_t,
    diameter,
    diffusion_distance,
    distance_matrix,
    normalize,
    shortest_unweighted_path,
    shortest_weighted_path,
    transition_matrix,
    walk_matrix,
    weighted_shortest_path,
)
from wopn.opn import WeightedNetwork, cut_cycle, cycle_graph


def random_connected(rng, n_max=12, w_max=10, real=False):
    n = int(rng.integers(2, n_max + 1))
    edges = {}
    for v in range(1, n):
        edges[(int(rng.integers(0, v)), v)] = None
    for _ in range(int(rng.integers(0, n + 1))):
        a, b = sorted(rng.choice(n, 2, replace=False).tolist())
        edges[(a, b)] = None
    w = (lambda: float(rng.uniform(0.5, 10))) if real else (lambda: int(rng.integers(1, w_max + 1)))
    return WeightedNetwork.from_edges(n, [(a, b, w()) for a, b in edges])


def path_oracle(net):
    """Enumerate simple paths; pick the least inverse-weight one per pair."""
    a = net.adjacency.astype(float)
    n = a.shape[0]
    hops = np.zeros((n, n))
    wsum = np.zeros((n, n))
    for s in range(n):
        best = {s: (0.0, 0, 0.0)}
        stack = [(s, [s], 0.0, 0.0)]
        while stack:
            v, path, cost, ws = stack.pop()
            for u in np.flatnonzero(a[v]):
                if u in path:
                    continue
                c, w = cost + 1.0 / a[v, u], ws + a[v, u]
                if u not in best or c < best[u][0]:
                    best[u] = (c, len(path), w)
                stack.append((u, path + [u], c, w))
        for u, (_, h, w) in best.items():
            hops[s, u], wsum[s, u] = h, w
    return hops, wsum


def test_supd_examples():
    d = shortest_unweighted_path(cycle_graph(6)).values
    assert d[0, 3] == 3 and np.all(np.diag(d) == 0)
    p = WeightedNetwork.from_edges(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (1, 4, 1)])
    assert shortest_unweighted_path(p).values[0, 4] == 2


def test_disconnected_names_components():
    net = WeightedNetwork.from_edges(4, [(0, 1, 1), (2, 3, 1)])
    for m in ("SUPD", "SWPD", "WSPD", "DD"):
        with pytest.raises(ConnectivityError) as info:
            distance_matrix(net, m)
        assert info.value.components == [[0, 1], [2, 3]]


def test_swpd_avoids_light_chord():
    net = cut_cycle(17)
    assert shortest_weighted_path(net).values[0, 8] == 8
    assert weighted_shortest_path(net).values[0, 8] == 80
    assert shortest_unweighted_path(net).values[0, 8] == 1


def test_path_graph_examples():
    net = WeightedNetwork.from_edges(3, [(0, 1, 1), (1, 2, 100)])
    assert shortest_weighted_path(net).values[0, 2] == 2
    net = WeightedNetwork.from_edges(3, [(0, 1, 2), (1, 2, 3)])
    assert weighted_shortest_path(net).values[0, 2] == 5
    net = WeightedNetwork.from_edges(2, [(0, 1, 7)])
    assert weighted_shortest_path(net).values[0, 1] == 7


def test_zero_weight_rejected():
    # adjacency 0 means "no edge", so an explicit zero weight is refused up front
    with pytest.raises(InvalidWeightError):
        WeightedNetwork.from_edges(3, [(0, 1, 1), (1, 2, 0)])


def test_equal_cost_tie_goes_to_lowest_index_predecessor():
    # 0-2 direct (cost 1) ties with 0-1-2 (cost 1/2 + 1/2)
    net = WeightedNetwork.from_edges(3, [(0, 2, 1), (0, 1, 2), (1, 2, 2)])
    assert shortest_weighted_path(net).values[0, 2] == 1
    assert weighted_shortest_path(net).values[0, 2] == 1


def test_swpd_wspd_match_path_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(60):
        net = random_connected(rng, n_max=8, real=True)
        hops, wsum = path_oracle(net)
        # the matrix is symmetrized from the search rooted at the lower index
        up = np.triu(hops, 1)
        assert np.array_equal(shortest_weighted_path(net).values, up + up.T)
        up = np.triu(wsum, 1)
        assert np.allclose(weighted_shortest_path(net).values, up + up.T, rtol=1e-12)


def test_shortest_path_distances_are_not_metrics_on_weighted_graphs():
    # long heavy route 0-3-4-5-2 versus light detour 0-1-2
    net = WeightedNetwork.from_edges(
        6, [(0, 1, 1), (1, 2, 1), (0, 3, 100), (3, 4, 100), (4, 5, 100), (5, 2, 100)]
    )
    swpd = shortest_weighted_path(net).values
    wspd = weighted_shortest_path(net).values
    assert swpd[0, 2] == 4 and swpd[0, 1] + swpd[1, 2] == 2
    assert wspd[0, 2] == 400 and wspd[0, 1] + wspd[1, 2] == 2


def test_uniform_weight_relations():
    rng = np.random.default_rng(3)
    for _ in range(20):
        net = random_connected(rng)
        w = 4
        uni = WeightedNetwork.from_edges(net.n_vertices, [(a, b, w) for a, b, _ in net.edges()])
        supd = shortest_unweighted_path(uni).values
        assert np.array_equal(shortest_weighted_path(uni).values, supd)
        assert np.array_equal(weighted_shortest_path(uni).values, w * supd)


def test_transition_examples():
    two = WeightedNetwork.from_edges(2, [(0, 1, 3)])
    assert np.array_equal(transition_matrix(two, lazy=False).values, [[0, 1], [1, 0]])
    assert np.allclose(transition_matrix(two).values, 0.5)
    tri = transition_matrix(cycle_graph(3), lazy=False).values
    assert np.allclose(tri[~np.eye(3, dtype=bool)], 0.5)
    star = WeightedNetwork.from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
    assert np.allclose(transition_matrix(star, lazy=False).values[0], [0, 1 / 3, 1 / 3, 1 / 3])


def test_isolated_vertex_zero_row():
    net = WeightedNetwork.from_edges(3, [(0, 1, 1)])
    with pytest.raises(DegenerateError):
        transition_matrix(net)


def test_diffusion_examples():
    two = WeightedNetwork.from_edges(2, [(0, 1, 5)])
    for t in (1, 2, 7):
        assert diffusion_distance(two, t).values[0, 1] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ParameterError):
        diffusion_distance(two, 0)


def test_diffusion_matches_explicit_formula():
    rng = np.random.default_rng(11)
    for _ in range(20):
        net = random_connected(rng)
        t = int(rng.integers(1, 11))
        a = net.adjacency.astype(float)
        p = 0.5 * (np.eye(len(a)) + a / a.sum(1, keepdims=True))
        pt = np.linalg.matrix_power(p, t)
        deg = (a > 0).sum(1)
        n = len(a)
        ref = np.zeros((n, n))
        for i, j in itertools.product(range(n), repeat=2):
            ref[i, j] = np.sqrt(np.sum((pt[i] - pt[j]) ** 2 / deg))
        assert np.allclose(diffusion_distance(net, t).values, ref, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 10))
def test_walks_stay_stochastic_and_lazy(seed, t):
    net = random_connected(np.random.default_rng(seed))
    tm = transition_matrix(net)
    assert np.abs(tm.values.sum(1) - 1).max() < 1e-12
    assert np.all(np.diag(tm.values) >= 0.5) and np.all((tm.values >= 0) & (tm.values <= 1))
    assert np.abs(walk_matrix(net, t).sum(1) - 1).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 10))
def test_supd_and_dd_are_metrics(seed, t):
    net = random_connected(np.random.default_rng(seed))
    for d, tol in ((shortest_unweighted_path(net).values, 0), (diffusion_distance(net, t).values, 1e-9)):
        assert np.array_equal(d, d.T) and np.all(np.diag(d) == 0)
        assert not np.any(d[:, None, :] > d[:, :, None] + d[None, :, :] + tol)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_all_methods_symmetric_zero_diagonal(seed):
    net = random_connected(np.random.default_rng(seed))
    for m in ("SUPD", "SWPD", "WSPD", "DD"):
        d = distance_matrix(net, m).values
        assert np.array_equal(d, d.T) and np.all(np.diag(d) == 0) and np.all(np.isfinite(d))


def test_default_t_examples():
    assert diameter(cycle_graph(6)) == 3 and default_t(cycle_graph(6)) == 6
    assert default_t(WeightedNetwork.from_edges(2, [(0, 1, 1)])) == 2
    p4 = WeightedNetwork.from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    assert default_t(p4) == 6
    assert distance_matrix(p4, "DD").t_steps == 6


def test_normalize_examples():
    d = DistanceMatrix(np.array([[0, 5.0, 2], [5, 0, 1], [2, 1, 0]]), "SUPD")
    n = normalize(d)
    assert n.values[0, 1] == 1.0 and n.normalized and n.max == 1.0
    assert np.array_equal(normalize(n).values, n.values)
    c6 = normalize(shortest_unweighted_path(cycle_graph(6))).values
    assert set(np.round(c6.ravel() * 3).tolist()) == {0, 1, 2, 3}
    assert np.allclose(np.unique(c6), [0, 1 / 3, 2 / 3, 1])
    with pytest.raises(DegenerateError):
        normalize(DistanceMatrix(np.zeros((2, 2)), "DD"))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_normalize_idempotent_and_keeps_argmax(seed):
    net = random_connected(np.random.default_rng(seed), n_max=10)
    if net.n_vertices < 2:
        return
    d = distance_matrix(net, "WSPD")
    n = normalize(d)
    assert np.array_equal(normalize(n).values, n.values)
    assert np.array_equal(d.values == d.values.max(), n.values == 1.0)


def test_distance_csv_roundtrip(tmp_path):
    d = distance_matrix(cycle_graph(5), "DD")
    d.to_csv(tmp_path / "d.csv", ["a", "b", "c", "d", "e"])
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "a,b,c,d,e"
    assert np.array_equal(DistanceMatrix.from_csv(tmp_path / "d.csv", "DD").values, d.values)


def test_unknown_method():
    with pytest.raises(ParameterError):
        distance_matrix(cycle_graph(4), "XYZ")
