"""Grids, functional datasets, labels and scores.

Curves are stored densely on a grid shared by the whole dataset: row ``i`` of
``FunctionalDataset.values`` is curve ``i`` evaluated at ``grid.points``.
Arrays held by these containers are made read-only on construction.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NORMAL = -1
ANOMALY = 1


class FormatError(ValueError):
    """Malformed input file (ragged rows, empty file)."""


class ParseError(ValueError):
    """A cell could not be read as a number."""


class DimensionError(ValueError):
    """Array shapes or sizes are incompatible."""


class GridMismatchError(DimensionError):
    """Two objects that must share a grid do not."""


class ExtrapolationError(ValueError):
    """Target grid leaves the span of the source grid."""


class ContractError(ValueError):
    """Input outside an operation's documented domain."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing sampling points inside [0, 1]."""

    points: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 1 or pts.size < 2:
            raise DimensionError(f"grid needs at least 2 points, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ContractError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise ContractError("grid points must be strictly increasing")
        if pts[0] < 0 or pts[-1] > 1:
            raise ContractError(f"grid must lie in [0, 1], got [{pts[0]}, {pts[-1]}]")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, p: int) -> Grid:
        if p < 2:
            raise DimensionError(f"grid needs at least 2 points, got {p}")
        return cls(np.linspace(0.0, 1.0, p))

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.all(self.points == other.points))

    def __hash__(self):
        return hash(self.points.tobytes())

    @property
    def is_uniform(self) -> bool:
        steps = np.diff(self.points)
        return bool(np.allclose(steps, steps[0], rtol=1e-9, atol=0.0))

    def trapezoid_weights(self) -> np.ndarray:
        """Quadrature weights ``w`` with ``sum(w * f) ~ integral of f`` over the grid span."""
        t = self.points
        w = np.zeros_like(t)
        dt = np.diff(t)
        w[:-1] += dt / 2
        w[1:] += dt / 2
        return w

    def integration_weights(self) -> np.ndarray:
        """Averaging weights summing to 1: plain mean on uniform grids, trapezoid otherwise."""
        if self.is_uniform:
            return np.full(len(self), 1.0 / len(self))
        w = self.trapezoid_weights()
        return w / w.sum()


@dataclass(frozen=True, eq=False)
class FunctionalDataset:
    """``n`` curves sampled on a shared grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.ndim == 1:
            vals = _frozen(vals.reshape(1, -1))
        if vals.ndim != 2 or vals.shape[0] < 1:
            raise DimensionError(f"values must be an n x p matrix, got shape {vals.shape}")
        if vals.shape[1] != len(self.grid):
            raise DimensionError(
                f"row length {vals.shape[1]} does not match grid length {len(self.grid)}"
            )
        if not np.all(np.isfinite(vals)):
            raise ContractError("curve values must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_array(cls, values, grid: Grid | None = None) -> FunctionalDataset:
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if grid is None:
            grid = Grid.uniform(values.shape[1])
        return cls(grid, values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.n

    def subset(self, rows) -> FunctionalDataset:
        return FunctionalDataset(self.grid, self.values[np.asarray(rows)])

    def with_values(self, values) -> FunctionalDataset:
        return FunctionalDataset(self.grid, values)

    def check_grid(self, other: FunctionalDataset | Grid) -> None:
        grid = other if isinstance(other, Grid) else other.grid
        if grid != self.grid:
            raise GridMismatchError(
                f"grid mismatch: {len(self.grid)} points vs {len(grid)} points"
            )


def as_labels(labels, n: int | None = None) -> np.ndarray:
    """Validate a label vector over {-1, +1}."""
    lab = np.asarray(labels)
    if lab.ndim != 1:
        raise DimensionError("labels must be one-dimensional")
    if not np.all(np.isin(lab, (NORMAL, ANOMALY))):
        raise ContractError("labels must be -1 (normal) or +1 (anomaly)")
    if n is not None and lab.size != n:
        raise DimensionError(f"expected {n} labels, got {lab.size}")
    return lab.astype(int)


def as_scores(scores, n: int | None = None) -> np.ndarray:
    """Validate a score vector (higher means more anomalous)."""
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1:
        raise DimensionError("scores must be one-dimensional")
    if not np.all(np.isfinite(s)):
        raise ContractError("scores must be finite")
    if n is not None and s.size != n:
        raise DimensionError(f"expected {n} scores, got {s.size}")
    return s


# --- CSV ingestion ---------------------------------------------------------

def _read_rows(path: Path) -> list[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return rows


def _parse_numeric(rows: list[list[str]], path: Path, row_offset: int = 0) -> np.ndarray:
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(
                f"{path}: row {i + 1 + row_offset} has {len(row)} columns, expected {width}"
            )
        for j, cell in enumerate(row):
            try:
                out[i, j] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric cell {cell!r} at row {i + 1 + row_offset}, column {j + 1}"
                ) from None
    return out


def load_csv(path, grid_mode: str = "uniform", grid_path=None) -> FunctionalDataset:
    """Read one curve per row.

    ``grid_mode`` is ``"uniform"`` (grid ``j / (p - 1)``), ``"header-row"``
    (first line holds the grid) or ``"sidecar-file"`` (``grid_path`` holds one
    grid value per line).
    """
    path = Path(path)
    rows = _read_rows(path)
    if grid_mode == "header-row":
        if len(rows) < 2:
            raise FormatError(f"{path}: header row present but no curves")
        table = _parse_numeric(rows, path)
        grid_vals, values = table[0], table[1:]
    elif grid_mode in ("uniform", "sidecar-file"):
        values = _parse_numeric(rows, path)
        grid_vals = None
        if grid_mode == "sidecar-file":
            if grid_path is None:
                raise ContractError("sidecar-file grid mode needs grid_path")
            side = _parse_numeric(_read_rows(Path(grid_path)), Path(grid_path))
            if side.shape[1] != 1:
                raise FormatError(f"{grid_path}: expected one value per line")
            grid_vals = side[:, 0]
    else:
        raise ContractError(f"unknown grid_mode {grid_mode!r}")

    p = values.shape[1]
    if p < 2:
        raise DimensionError(f"{path}: curves need at least 2 samples, got {p}")
    grid = Grid.uniform(p) if grid_vals is None else Grid(grid_vals)
    if len(grid) != p:
        raise DimensionError(f"{path}: grid has {len(grid)} points but rows have {p}")
    return FunctionalDataset(grid, values)


def write_csv(dataset: FunctionalDataset, path, header: bool = False, precision: int = 17) -> None:
    """Write curves one per row; ``header=True`` prepends the grid row."""
    fmt = f"%.{precision}g"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(",".join(fmt % v for v in dataset.grid.points) + "\n")
        for row in dataset.values:
            fh.write(",".join(fmt % v for v in row) + "\n")


def write_vector(values, path, precision: int = 17) -> None:
    """One value per line; integer arrays are written without a decimal point."""
    arr = np.asarray(values).ravel()
    fmt = "%d" if np.issubdtype(arr.dtype, np.integer) else f"%.{precision}g"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in arr:
            fh.write(fmt % v + "\n")


def load_labels(path, n: int | None = None) -> np.ndarray:
    rows = _read_rows(Path(path))
    vals = _parse_numeric(rows, Path(path))
    if vals.shape[1] != 1:
        raise FormatError(f"{path}: expected one label per line")
    return as_labels(vals[:, 0].astype(int), n)


# --- resampling and derivatives --------------------------------------------

def resample_linear(dataset: FunctionalDataset, target: Grid) -> FunctionalDataset:
    """Piecewise-linear interpolation of every curve onto ``target``."""
    src = dataset.grid.points
    tgt = target.points
    if tgt[0] < src[0] or tgt[-1] > src[-1]:
        raise ExtrapolationError(
            f"target span [{tgt[0]}, {tgt[-1]}] leaves source span [{src[0]}, {src[-1]}]"
        )
    out = np.empty((dataset.n, tgt.size))
    for i, row in enumerate(dataset.values):
        out[i] = np.interp(tgt, src, row)
    return FunctionalDataset(target, out)


def derivative_values(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward differences along the last axis, last slope repeated to keep length p."""
    values = np.asarray(values, dtype=float)
    slopes = np.diff(values, axis=-1) / np.diff(grid.points)
    return np.concatenate([slopes, slopes[..., -1:]], axis=-1)


def derivative(dataset: FunctionalDataset) -> FunctionalDataset:
    return FunctionalDataset(dataset.grid, derivative_values(dataset.values, dataset.grid))
