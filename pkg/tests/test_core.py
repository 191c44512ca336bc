import numpy as np
import pytest
from hypothesis import given, strategies as st

from funcad.core import (ContractError, DimensionError, ExtrapolationError, FormatError,
                         FunctionalDataset, Grid, GridMismatchError, ParseError, as_labels,
                         as_scores, derivative, load_csv, load_labels, resample_linear,
                         write_csv)
from strategies import matrices, seeded_normal


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


# --- grids -------------------------------------------------------------------

def test_grid_rejects_bad_points():
    with pytest.raises(DimensionError):
        Grid([0.5])
    with pytest.raises(ContractError):
        Grid([0.0, 0.5, 0.5])
    with pytest.raises(ContractError):
        Grid([0.0, 1.5])
    with pytest.raises(ContractError):
        Grid([0.0, np.nan])


def test_uniform_grid_and_weights():
    g = Grid.uniform(5)
    np.testing.assert_allclose(g.points, [0, 0.25, 0.5, 0.75, 1])
    assert g.is_uniform
    np.testing.assert_allclose(g.trapezoid_weights(), [0.125, 0.25, 0.25, 0.25, 0.125])
    np.testing.assert_allclose(g.integration_weights(), np.full(5, 0.2))
    nu = Grid([0.0, 0.1, 1.0])
    assert not nu.is_uniform
    assert nu.integration_weights().sum() == pytest.approx(1.0)


def test_dataset_is_read_only_and_checked():
    ds = FunctionalDataset.from_array([[0.0, 1.0, 2.0]])
    with pytest.raises(ValueError):
        ds.values[0, 0] = 5.0
    with pytest.raises(DimensionError):
        FunctionalDataset(Grid.uniform(4), np.zeros((2, 3)))
    with pytest.raises(ContractError):
        FunctionalDataset.from_array([[0.0, np.inf]])
    with pytest.raises(GridMismatchError):
        ds.check_grid(Grid.uniform(4))


def test_labels_and_scores_validation():
    assert as_labels([1, -1, -1]).tolist() == [1, -1, -1]
    with pytest.raises(ContractError):
        as_labels([0, 1])
    with pytest.raises(DimensionError):
        as_labels([1, -1], n=3)
    with pytest.raises(ContractError):
        as_scores([0.1, np.nan])


# --- CSV ---------------------------------------------------------------------

def test_load_uniform(tmp_path):
    ds = load_csv(_write(tmp_path / "a.csv", "0,1,2\n1,1,1\n"), "uniform")
    assert (ds.n, ds.p) == (2, 3)
    np.testing.assert_array_equal(ds.grid.points, [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(ds.values, [[0, 1, 2], [1, 1, 1]])


def test_load_header_row_verbatim(tmp_path):
    ds = load_csv(_write(tmp_path / "h.csv", "0,0.2,1.0\n3,4,5\n"), "header-row")
    np.testing.assert_array_equal(ds.grid.points, [0.0, 0.2, 1.0])
    np.testing.assert_array_equal(ds.values, [[3, 4, 5]])


def test_load_sidecar_and_crlf(tmp_path):
    data = _write(tmp_path / "d.csv", "1,2\r\n3,4\r\n")
    side = _write(tmp_path / "g.csv", "0.1\r\n0.9\r\n")
    ds = load_csv(data, "sidecar-file", side)
    np.testing.assert_array_equal(ds.grid.points, [0.1, 0.9])
    np.testing.assert_array_equal(ds.values, [[1, 2], [3, 4]])


def test_ragged_rows_are_a_format_error(tmp_path):
    with pytest.raises(FormatError):
        load_csv(_write(tmp_path / "r.csv", "1,2,3\n1,2,3,4\n"), "uniform")


def test_non_numeric_cell_reports_position(tmp_path):
    with pytest.raises(ParseError, match="row 2, column 3"):
        load_csv(_write(tmp_path / "p.csv", "1,2,3\n4,5,x\n"), "uniform")


def test_single_column_is_a_dimension_error(tmp_path):
    with pytest.raises(DimensionError):
        load_csv(_write(tmp_path / "s.csv", "1\n2\n"), "uniform")


def test_labels_file(tmp_path):
    assert load_labels(_write(tmp_path / "l.csv", "1\n-1\n"), 2).tolist() == [1, -1]
    with pytest.raises(ContractError):
        load_labels(_write(tmp_path / "bad.csv", "2\n"))


@given(matrices(n=(1, 6), p=(2, 8)), st.booleans())
def test_csv_round_trip(tmp_path, values, header):
    ds = FunctionalDataset.from_array(values)
    path = tmp_path / "rt.csv"
    write_csv(ds, path, header=header)
    back = load_csv(path, "header-row" if header else "uniform")
    np.testing.assert_array_equal(back.values, ds.values)
    np.testing.assert_array_equal(back.grid.points, ds.grid.points)


# --- resampling ----------------------------------------------------------------

def test_resample_examples():
    line = FunctionalDataset(Grid([0.0, 1.0]), [[0.0, 2.0]])
    assert resample_linear(line, Grid([0.0, 0.5, 1.0])).values[0, 1] == 1.0
    tent = FunctionalDataset(Grid([0.0, 0.5, 1.0]), [[0.0, 1.0, 0.0]])
    assert resample_linear(tent, Grid([0.0, 0.25, 1.0])).values[0, 1] == 0.5


def test_resample_rejects_extrapolation():
    ds = FunctionalDataset(Grid([0.2, 0.8]), [[0.0, 1.0]])
    with pytest.raises(ExtrapolationError):
        resample_linear(ds, Grid([0.0, 0.5]))


@given(seeded_normal(n=(1, 6), p=(2, 20)))
def test_resample_onto_source_is_identity(values):
    ds = FunctionalDataset.from_array(values)
    out = resample_linear(ds, ds.grid)
    np.testing.assert_array_equal(out.values, ds.values)


# --- derivative ------------------------------------------------------------------

def test_derivative_examples():
    const = FunctionalDataset.from_array([[3.0, 3.0, 3.0, 3.0]])
    np.testing.assert_array_equal(derivative(const).values, 0.0)
    g = Grid.uniform(6)
    np.testing.assert_allclose(derivative(FunctionalDataset(g, g.points)).values, 1.0)
    kink = FunctionalDataset(Grid([0.0, 0.5, 1.0]), [[0.0, 1.0, 1.0]])
    np.testing.assert_array_equal(derivative(kink).values, [[2.0, 0.0, 0.0]])


@given(seeded_normal(n=(1, 5), p=(2, 15)), st.floats(-100, 100), st.floats(-100, 100))
def test_derivative_is_linear(values, a, b):
    ds = FunctionalDataset.from_array(values)
    lhs = derivative(ds.with_values(a * ds.values + b)).values
    rhs = a * derivative(ds).values
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * (1 + abs(b)) * ds.p)
