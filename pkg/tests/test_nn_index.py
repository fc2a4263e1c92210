import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ibrrt.errors import UsageError
from ibrrt.nn_index import NnIndex, nn_insert, nn_near, nn_nearest

from oracles import linear_near, linear_nearest


def _filled(points, ids=None, bounds=None):
    idx = NnIndex(points.shape[1], bounds=bounds)
    ids = np.arange(len(points)) if ids is None else ids
    for p, i in zip(points, ids):
        nn_insert(idx, p, i)
    return idx, ids


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("bounded", [False, True])
def test_matches_linear_scan(dim, bounded):
    rng = np.random.default_rng(dim)
    pts = rng.random((1000, dim))
    idx, ids = _filled(pts, bounds=(np.zeros(dim), np.ones(dim)) if bounded else None)
    mismatches = 0
    for _ in range(100):
        q = rng.random(dim) * 1.2 - 0.1
        r = float(rng.uniform(0.01, 0.3))
        mismatches += nn_nearest(idx, q) != linear_nearest(pts, ids, q)
        mismatches += list(nn_near(idx, q, r)) != linear_near(pts, ids, q, r)
    assert mismatches == 0


def test_ties_go_to_smallest_id():
    idx = NnIndex(2)
    for vid, p in [(7, (1.0, 0.0)), (3, (-1.0, 0.0)), (5, (0.0, 1.0))]:
        idx.insert(np.array(p), vid)
    assert idx.nearest(np.zeros(2)) == 3
    assert list(idx.near(np.zeros(2), 1.0)) == [3, 5, 7]  # closed ball, sorted ids


def test_duplicate_points_distinct_ids():
    pts = np.repeat(np.array([[0.5, 0.5]]), 100, axis=0)
    idx, _ = _filled(pts, ids=np.arange(100)[::-1] + 10)
    assert idx.nearest(np.array([0.1, 0.2])) == 10
    assert len(idx.near(np.array([0.5, 0.5]), 1e-12)) == 100


def test_errors():
    idx = NnIndex(2)
    with pytest.raises(UsageError):
        idx.nearest(np.zeros(2))
    idx.insert(np.zeros(2), 0)
    with pytest.raises(UsageError):
        idx.insert(np.ones(2), 0)
    with pytest.raises(UsageError):
        idx.insert(np.ones(3), 1)
    with pytest.raises(UsageError):
        idx.near(np.zeros(2), 0.0)
    with pytest.raises(UsageError):
        idx.nearest(np.zeros(3))
    with pytest.raises(UsageError):
        NnIndex(2, bounds=(np.ones(2), np.zeros(2)))


def test_unbounded_radius_returns_everything():
    rng = np.random.default_rng(0)
    pts = rng.random((300, 3)) * 50
    idx, ids = _filled(pts)
    assert list(idx.near(np.zeros(3), np.inf)) == list(ids)


def test_points_outside_seed_bounds_still_found():
    rng = np.random.default_rng(1)
    pts = np.vstack([rng.random((500, 2)), rng.random((50, 2)) * 10 - 5])
    idx, ids = _filled(pts, bounds=(np.zeros(2), np.ones(2)))
    for _ in range(50):
        q = rng.random(2) * 12 - 6
        assert idx.nearest(q) == linear_nearest(pts, ids, q)
        assert list(idx.near(q, 1.5)) == linear_near(pts, ids, q, 1.5)


coords = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 3).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(coords, min_size=n, max_size=n), min_size=1, max_size=150),
            st.lists(coords, min_size=n, max_size=n),
            st.floats(1e-3, 5),
        )
    )
)
def test_property_exact(data):
    pts, q, r = data
    pts = np.array(pts)
    q = np.array(q)
    ids = np.arange(len(pts)) * 3 + 1
    idx, _ = _filled(pts, ids=ids)
    assert idx.nearest(q) == linear_nearest(pts, ids, q)
    assert list(idx.near(q, r)) == linear_near(pts, ids, q, r)


def test_incremental_growth_keeps_exactness():
    rng = np.random.default_rng(9)
    idx = NnIndex(2, bounds=(np.zeros(2), np.ones(2)))
    pts = []
    for i in range(3000):
        p = rng.random(2)
        idx.insert(p, i)
        pts.append(p)
        if i % 97 == 0:
            P = np.array(pts)
            q = rng.random(2)
            assert idx.nearest(q) == linear_nearest(P, np.arange(len(P)), q)
            assert list(idx.near(q, 0.05)) == linear_near(P, np.arange(len(P)), q, 0.05)
    assert len(idx) == 3000
    assert np.array_equal(idx.ids(), np.arange(3000))
