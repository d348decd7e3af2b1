import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wopn.diagmetric import (
    DiagramDistanceMatrix,
    bottleneck,
    brute_force_bottleneck,
    normalized_bottleneck,
    pairwise_bottleneck,
)
from wopn.errors import DegenerateError, InvalidInputError
from wopn.persistence import PersistenceDiagram

grid = st.integers(0, 8).map(lambda v: v / 2)
point = st.tuples(grid, grid).map(lambda p: (min(p), max(p)))
diagram = st.lists(point, max_size=5).map(lambda ps: np.array(ps, dtype=float).reshape(-1, 2))


def D(*pairs):
    return PersistenceDiagram({1: np.array(pairs, dtype=float).reshape(-1, 2)})


def test_examples():
    a = D((0, 2), (1, 4))
    assert bottleneck(a, a) == 0
    assert bottleneck(D((0, 2)), D()) == 1
    assert bottleneck(D(), D()) == 0
    assert normalized_bottleneck(D((0, 2)), D()) == 1
    assert normalized_bottleneck(a, a) == 0


def test_rejects_essential_pairs():
    with pytest.raises(InvalidInputError):
        bottleneck(D((0, math.inf)), D())


def test_degenerate_reference():
    with pytest.raises(DegenerateError):
        normalized_bottleneck(D(), D((0, 1)))


@settings(max_examples=200, deadline=None)
@given(diagram, diagram)
def test_matches_exhaustive_matching(a, b):
    assert bottleneck(a, b) == brute_force_bottleneck(a, b)


@settings(max_examples=100, deadline=None)
@given(diagram, diagram, diagram)
def test_metric_properties(a, b, c):
    ab, ba = bottleneck(a, b), bottleneck(b, a)
    assert ab == ba and ab >= 0
    assert bottleneck(a, c) <= ab + bottleneck(b, c) + 1e-12
    bound = max([0.0] + [(p[1] - p[0]) / 2 for p in np.vstack([a, b])])
    assert ab <= bound


@settings(max_examples=60, deadline=None)
@given(diagram, diagram, grid)
def test_zero_persistence_points_do_not_matter(a, b, v):
    assert bottleneck(np.vstack([a, [[v, v]]]), b) == bottleneck(a, b)


@settings(max_examples=60, deadline=None)
@given(diagram)
def test_zero_iff_equal_multisets(a):
    live = a[a[:, 1] > a[:, 0]]
    shuffled = live[::-1]
    assert bottleneck(live, shuffled) == 0
    if live.shape[0]:
        moved = live.copy()
        moved[0, 1] += 0.5
        assert bottleneck(live, moved) > 0


def test_pairwise_matrix(tmp_path):
    dgs = [D((0, 2)), D((0, 2)), D((1, 3), (0, 0.5))]
    m = pairwise_bottleneck(dgs, ["periodic", "periodic", "chaotic"])
    assert m.values[0, 1] == 0 and np.array_equal(m.values, m.values.T)
    v = m.values
    assert not np.any(v[:, None, :] > v[:, :, None] + v[None, :, :] + 1e-9)
    m.to_csv(tmp_path / "b.csv")
    back = DiagramDistanceMatrix.from_csv(tmp_path / "b.csv")
    assert back.labels == m.labels and np.array_equal(back.values, m.values)


def test_pairwise_errors():
    with pytest.raises(InvalidInputError):
        pairwise_bottleneck([D((0, 1))])
    with pytest.raises(InvalidInputError) as info:
        pairwise_bottleneck([D((0, 1)), D((0, 1)), D((0, math.inf))])
    assert "0 and 2" in str(info.value)
