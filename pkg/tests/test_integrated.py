import numpy as np
import pytest
from hypothesis import given, strategies as st

from funcad.core import ContractError, DimensionError, FunctionalDataset, Grid
from funcad.integrated import (IntegratedDepthConfig, depth_to_score, integrated_depth,
                               integrated_depths)
from funcad.udepth import tukey_depth_1d
from strategies import seeded_normal

TUKEY = IntegratedDepthConfig("tukey")
PROJ = IntegratedDepthConfig("projection")


def test_constant_dataset_projection_depth_one():
    ds = FunctionalDataset.from_array(np.full((4, 6), 2.5))
    assert integrated_depth(np.full(6, 2.5), ds, PROJ) == 1.0


def test_curve_outside_range_has_tukey_depth_zero():
    ds = FunctionalDataset.from_array(np.random.default_rng(0).uniform(-1, 1, (10, 8)))
    assert integrated_depth(np.full(8, 5.0), ds, TUKEY) == 0.0


def test_three_curve_toy_tukey():
    ds = FunctionalDataset.from_array([[0.0, 0.0], [1.0, 2.0], [2.0, 1.0]])
    q = np.array([1.0, 2.0])
    expected = (tukey_depth_1d(1.0, [0, 1, 2]) + tukey_depth_1d(2.0, [0, 2, 1])) / 2
    assert expected == pytest.approx(0.5)
    assert integrated_depth(q, ds, TUKEY) == pytest.approx(expected)


def test_trapezoid_weights_on_nonuniform_grid():
    g = Grid([0.0, 0.1, 1.0])
    ds = FunctionalDataset(g, [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0]])
    q = np.array([[0.0, 1.0, 1.0]])
    w = g.trapezoid_weights() / g.trapezoid_weights().sum()
    d = integrated_depths(q, ds, TUKEY)[0]
    assert d == pytest.approx(w @ np.array([1 / 3, 2 / 3, 2 / 3]))


def test_grid_mismatch_raises():
    ds = FunctionalDataset.from_array(np.zeros((3, 4)))
    with pytest.raises(DimensionError):
        integrated_depth(np.zeros(5), ds)


def test_depth_to_score_examples():
    np.testing.assert_array_equal(depth_to_score([1.0, 0.0]), [0.0, 1.0])
    s = depth_to_score([0.2, 0.8])
    np.testing.assert_allclose(s, [0.8, 0.2])
    assert np.argmax(s) == 0
    with pytest.raises(ContractError):
        depth_to_score([1.2])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_score_of_score_is_identity(depths):
    d = np.array(depths)
    np.testing.assert_allclose(depth_to_score(depth_to_score(d)), d, atol=1e-15)


@given(seeded_normal(n=(2, 12), p=(2, 10)), st.integers(0, 2**32 - 1),
       st.sampled_from(["tukey", "projection", "asym_projection"]))
def test_column_permutation_invariance(values, seed, base):
    cfg = IntegratedDepthConfig(base, "uniform-mean")
    perm = np.random.default_rng(seed).permutation(values.shape[1])
    a = integrated_depths(values, FunctionalDataset.from_array(values), cfg)
    b = integrated_depths(values[:, perm], FunctionalDataset.from_array(values[:, perm]), cfg)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


@given(seeded_normal(n=(1, 15), p=(2, 10)))
def test_tukey_member_depth_at_least_one_over_n(values):
    ds = FunctionalDataset.from_array(np.round(values, 1))
    d = integrated_depths(ds, ds, TUKEY)
    assert np.all(d >= 1 / ds.n - 1e-12)


@given(seeded_normal(n=(3, 12), p=(2, 8)), st.integers(0, 2**32 - 1))
def test_projection_ranking_invariant_to_pointwise_affine_maps(values, seed):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.1, 10.0, values.shape[1])
    b = rng.uniform(-10.0, 10.0, values.shape[1])
    before = integrated_depths(values, FunctionalDataset.from_array(values), PROJ)
    moved = a * values + b
    after = integrated_depths(moved, FunctionalDataset.from_array(moved), PROJ)
    np.testing.assert_allclose(after, before, rtol=1e-9)
    np.testing.assert_array_equal(np.argsort(np.round(after, 9), kind="stable"),
                                  np.argsort(np.round(before, 9), kind="stable"))
