from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from funcad.ach import (AchConfig, AchModel, ach_depth, ach_depths, convex_hull_area,
                        draw_subsets, graph_points)
from funcad.core import ContractError, FunctionalDataset


def gift_wrap(points):
    """Hull vertices by Jarvis march (collinear points skipped)."""
    pts = [tuple(p) for p in np.unique(np.asarray(points, dtype=float), axis=0)]
    if len(pts) < 3:
        return pts
    start = min(pts)
    hull, cur = [], start
    while True:
        hull.append(cur)
        cand = pts[0] if pts[0] != cur else pts[1]
        for q in pts:
            if q == cur:
                continue
            cr = (cand[0] - cur[0]) * (q[1] - cur[1]) - (cand[1] - cur[1]) * (q[0] - cur[0])
            farther = (np.hypot(q[0] - cur[0], q[1] - cur[1])
                       > np.hypot(cand[0] - cur[0], cand[1] - cur[1]))
            if cr < 0 or (cr == 0 and farther):
                cand = q
        cur = cand
        if cur == start or len(hull) > len(pts):
            return hull


def fan_area(points):
    """Hull area as a sum of triangles from the vertex centroid."""
    v = np.array(gift_wrap(points))
    if len(v) < 3:
        return 0.0
    c = v.mean(axis=0)
    ang = np.arctan2(v[:, 1] - c[1], v[:, 0] - c[0])
    v = v[np.argsort(ang)]
    total = 0.0
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        total += 0.5 * abs((a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]))
    return total


def ach_by_enumeration(query, values, t, J):
    ratios = []
    for sub in combinations(range(len(values)), J):
        pts = graph_points(values[list(sub)], t)
        num = fan_area(pts)
        den = fan_area(np.vstack([pts, graph_points(query, t)]))
        ratios.append(1.0 if den == 0 else num / den)
    return float(np.mean(ratios))


# --- hull area -------------------------------------------------------------------------

def test_hull_area_examples():
    assert convex_hull_area([(0, 0), (1, 0), (1, 1), (0, 1)]) == 1.0
    assert convex_hull_area([(0, 0), (1, 1), (2, 2)]) == 0.0
    assert convex_hull_area([(3, 4)]) == 0.0
    with pytest.raises(ContractError):
        convex_hull_area(np.zeros((0, 2)))


@given(st.integers(0, 2**32 - 1), st.integers(3, 10))
def test_hull_area_matches_fan_triangulation(seed, m):
    pts = np.random.default_rng(seed).uniform(-5, 5, (m, 2))
    assert convex_hull_area(pts) == pytest.approx(fan_area(pts), abs=1e-9)


# --- ACH depth examples --------------------------------------------------------------------

def test_member_in_every_subset_has_depth_one():
    values = np.random.default_rng(1).uniform(-1, 1, (3, 7))
    ds = FunctionalDataset.from_array(values)
    assert ach_depth(values[1], ds, AchConfig(J=3)) == 1.0


def test_far_constant_curve_is_shallow():
    t = np.linspace(0, 1, 5)
    values = np.array([np.sin(2 * np.pi * t), -np.sin(2 * np.pi * t), 0.5 * np.cos(np.pi * t)])
    ds = FunctionalDataset.from_array(values)
    d = ach_depth(np.full(5, 1e3), ds, AchConfig(J=2))
    assert 0.0 <= d < 0.5


def test_j_equals_n_is_the_single_ratio():
    rng = np.random.default_rng(2)
    values = rng.uniform(-1, 1, (4, 6))
    q = rng.uniform(-2, 2, 6)
    ds = FunctionalDataset.from_array(values)
    t = ds.grid.points
    exact = fan_area(graph_points(values, t)) / fan_area(np.vstack([graph_points(values, t),
                                                                     graph_points(q, t)]))
    assert ach_depth(q, ds, AchConfig(J=4, n_subsets=7)) == pytest.approx(exact, abs=1e-12)


def test_degenerate_ratios():
    flat = FunctionalDataset.from_array(np.zeros((3, 4)))
    # 0 / 0: the query adds no area to an area-free subset
    assert ach_depth(np.zeros(4), flat, AchConfig(J=2)) == 1.0
    # 0 / positive: every subset hull is a segment, the query adds area
    assert ach_depth(np.array([0.0, 1.0, 0.0, 1.0]), flat, AchConfig(J=2)) == 0.0


def test_self_exclusion():
    values = np.random.default_rng(3).uniform(-1, 1, (5, 6))
    ds = FunctionalDataset.from_array(values)
    cfg = AchConfig(J=2)
    model = AchModel(ds, cfg)
    own = ach_depths(ds, cfg)
    t = ds.grid.points
    for i in range(5):
        others = np.delete(values, i, axis=0)
        assert own[i] == pytest.approx(ach_by_enumeration(values[i], others, t, 2), abs=1e-9)
    # without exclusion a member is deeper (its own subsets give ratio 1)
    assert np.all(model.depths(values) >= own - 1e-12)


def test_subset_draws():
    assert draw_subsets(4, AchConfig(J=2)).shape == (6, 2)
    sampled = draw_subsets(300, AchConfig(J=2, n_subsets=50, seed=4))
    assert sampled.shape == (50, 2)
    assert np.all(sampled[:, 0] < sampled[:, 1])
    assert draw_subsets(300, AchConfig(J=2)).shape == (32 * 300, 2)
    with pytest.raises(ContractError):
        draw_subsets(2, AchConfig(J=3))


# --- properties ------------------------------------------------------------------------------

@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.integers(2, 8))
def test_exact_enumeration_agrees_with_formula(seed, n, p):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((n, p))
    q = rng.standard_normal(p) * 2
    ds = FunctionalDataset.from_array(values)
    cfg = AchConfig(J=2, n_subsets=10 * comb(n, 2), seed=seed)
    got = ach_depth(q, ds, cfg)
    assert got == pytest.approx(ach_by_enumeration(q, values, ds.grid.points, 2), abs=1e-9)


@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(2, 10), st.integers(1, 3))
def test_depth_in_unit_interval(seed, n, p, J):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((n, p))
    queries = rng.standard_normal((3, p)) * rng.uniform(0.1, 10)
    J = min(J, n)
    d = AchModel(FunctionalDataset.from_array(values), AchConfig(J=J)).depths(queries)
    if J == 1:
        # a single graph spans area only when the curve bends
        assert np.all((d >= 0) & (d <= 1))
    else:
        assert np.all((d > 0) & (d <= 1))


@given(st.integers(0, 2**32 - 1), st.floats(1.01, 10))
def test_scaling_query_never_increases_depth(seed, c):
    # stated for any sample; fails when a subset hull sits away from zero
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((6, 8)) + rng.uniform(-10, 10)
    q = rng.standard_normal(8) + rng.uniform(-10, 10)
    cfg = AchConfig(J=2, seed=seed)
    model = AchModel(FunctionalDataset.from_array(values), cfg)
    d1, dc = model.depths(np.vstack([q, c * q]))
    assert dc <= d1 + 1e-12


@given(st.integers(0, 2**32 - 1), st.floats(1.01, 10))
def test_scaling_query_never_increases_depth_when_hulls_hold_zero(seed, c):
    rng = np.random.default_rng(seed)
    m = rng.uniform(0.5, 5)
    values = np.vstack([rng.standard_normal((4, 8)), np.full(8, m), np.full(8, -m)])
    q = rng.standard_normal(8) * rng.uniform(0.1, 5)
    model = AchModel(FunctionalDataset.from_array(values), AchConfig(J=6))
    d1, dc = model.depths(np.vstack([q, c * q]))
    assert dc <= d1 + 1e-12


@given(st.integers(0, 2**32 - 1))
def test_seeded_determinism_and_thread_invariance(seed):
    rng = np.random.default_rng(seed)
    values = rng.standard_normal((12, 10))
    ds = FunctionalDataset.from_array(values)
    base = AchConfig(J=2, n_subsets=40, seed=seed, exact_limit=0)
    a = ach_depths(ds, base)
    b = ach_depths(ds, base)
    c = ach_depths(ds, AchConfig(J=2, n_subsets=40, seed=seed, exact_limit=0, n_jobs=3))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, c)


def test_scaling_counterexample():
    # query 9 below a hull spanning [10, 11]; 1.17 * 9 lands inside it
    v = np.array([np.full(5, 10.0), np.full(5, 11.0)])
    v[0, 2] = 10.2
    model = AchModel(FunctionalDataset.from_array(v), AchConfig(J=2))
    d = model.depths(np.vstack([np.full(5, 9.0), np.full(5, 9.0 * 1.17)]))
    assert d[0] == 0.5 and d[1] == 1.0


def test_outlier_is_least_deep():
    rng = np.random.default_rng(5)
    t = np.linspace(0, 1, 30)
    values = np.sin(2 * np.pi * t) + 0.1 * rng.standard_normal((20, 30))
    values[7, 10:13] += 5.0
    d = ach_depths(FunctionalDataset.from_array(values), AchConfig(J=2))
    assert np.argmin(d) == 7
