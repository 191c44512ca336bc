"""Finite-dimensional filters: functional PCA and Haar-basis coefficients.

Both work under the L2 inner product of the grid, ``<f, g> = sum_j w_j f_j g_j``
with trapezoid weights ``w``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractError, DimensionError, FunctionalDataset, Grid

DEFAULT_COMPONENTS = 10
DEFAULT_HAAR_LEVEL = 6  # 2**6 = 64 coefficients


def _fix_signs(rows: np.ndarray) -> np.ndarray:
    """Flip each row so its entry of largest magnitude is positive."""
    if rows.size == 0:
        return rows
    idx = np.argmax(np.abs(rows), axis=1)
    signs = np.where(rows[np.arange(rows.shape[0]), idx] < 0, -1.0, 1.0)
    return rows * signs[:, None]


@dataclass(frozen=True, eq=False)
class FpcaModel:
    grid: Grid
    mean_curve: np.ndarray
    components: np.ndarray   # k x p, orthonormal under the grid inner product
    eigenvalues: np.ndarray  # k, non-increasing, >= 0

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def to_dict(self) -> dict:
        return {"kind": "fpca", "grid": self.grid.points.tolist(),
                "mean_curve": self.mean_curve.tolist(),
                "components": self.components.tolist(),
                "eigenvalues": self.eigenvalues.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> FpcaModel:
        return cls(Grid(d["grid"]), np.asarray(d["mean_curve"], dtype=float),
                   np.atleast_2d(np.asarray(d["components"], dtype=float)),
                   np.asarray(d["eigenvalues"], dtype=float))


def _orthonormal_completion(u: np.ndarray, m: int) -> np.ndarray:
    """``m`` unit vectors (rows) orthogonal to the orthonormal rows of ``u`` and to each other."""
    p = u.shape[1]
    q, _ = np.linalg.qr(np.concatenate([u.T, np.eye(p)], axis=1))
    return q[:, u.shape[0]:u.shape[0] + m].T


def fpca_fit(dataset: FunctionalDataset, k: int = DEFAULT_COMPONENTS) -> FpcaModel:
    """Top-``k`` eigenpairs of the empirical covariance operator (divisor n).

    The operator is symmetrized with the square root of the quadrature
    weights. When n < p the n x n Gram matrix is diagonalized instead of the
    p x p covariance.
    """
    n, p = dataset.n, dataset.p
    if not 1 <= k <= min(n, p):
        raise DimensionError(f"k must lie in [1, {min(n, p)}], got {k}")
    w = dataset.grid.trapezoid_weights()
    sw = np.sqrt(w)
    mean = dataset.values.mean(axis=0)
    y = (dataset.values - mean) * sw

    if n < p:
        lam, v = np.linalg.eigh(y @ y.T / n)
        lam, v = lam[::-1], v[:, ::-1]
        tol = max(lam[0], 0.0) * max(n, p) * np.finfo(float).eps
        r = int(np.sum(lam[:k] > tol))
        u = (y.T @ v[:, :r] / np.sqrt(n * lam[:r])).T
        if r < k:
            u = np.concatenate([u, _orthonormal_completion(u, k - r)], axis=0)
        lam = np.r_[lam[:r], np.zeros(k - r)]
    else:
        lam, v = np.linalg.eigh(y.T @ y / n)
        lam, u = lam[::-1][:k], v[:, ::-1][:, :k].T
    lam = np.maximum(lam, 0.0)
    components = _fix_signs(u / sw)
    return FpcaModel(dataset.grid, mean, components, lam)


def fpca_transform(model: FpcaModel, dataset: FunctionalDataset) -> np.ndarray:
    """n x k scores: centered curves projected on the components."""
    dataset.check_grid(model.grid)
    w = model.grid.trapezoid_weights()
    return ((dataset.values - model.mean_curve) * w) @ model.components.T


def fpca_reconstruct(model: FpcaModel, scores) -> FunctionalDataset:
    s = np.atleast_2d(np.asarray(scores, dtype=float))
    if s.shape[1] != model.k:
        raise DimensionError(f"expected {model.k} scores per curve, got {s.shape[1]}")
    return FunctionalDataset(model.grid, model.mean_curve + s @ model.components)


def reconstruction_error(model: FpcaModel, dataset: FunctionalDataset) -> np.ndarray:
    """L2 distance between each curve and its reconstruction from the model."""
    rec = fpca_reconstruct(model, fpca_transform(model, dataset)).values
    w = model.grid.trapezoid_weights()
    return np.sqrt(np.maximum(((dataset.values - rec) ** 2) @ w, 0.0))


# --- Haar basis -------------------------------------------------------------------

def _cell_edges(grid: Grid) -> np.ndarray:
    """Edges of the cells owned by each grid point: half-way points, then 0 and 1 at the ends."""
    t = grid.points
    return np.r_[0.0, (t[:-1] + t[1:]) / 2, 1.0]


def _haar_primitives(x: np.ndarray, level: int) -> np.ndarray:
    """Antiderivatives (from 0) of the 2**level Haar functions, evaluated at ``x``."""
    rows = [x.copy()]  # scaling function
    for lev in range(level):
        h = 2.0**-lev
        for m in range(2**lev):
            lo, mid, hi = m * h, (m + 0.5) * h, (m + 1) * h
            up = np.clip(x, lo, mid) - lo
            down = np.clip(x, mid, hi) - mid
            rows.append(2.0 ** (lev / 2) * (up - down))
    return np.asarray(rows)


def haar_matrix(grid: Grid, level: int = DEFAULT_HAAR_LEVEL) -> np.ndarray:
    """2**level x p matrix mapping sampled curves to Haar coefficients.

    Each sample stands for the curve on its cell (the half-way points between
    neighbours), and the Haar functions are integrated exactly over the cells.
    """
    if level < 0:
        raise ContractError(f"level must be >= 0, got {level}")
    if len(grid) < 2**level:
        raise DimensionError(f"level {level} needs at least {2**level} grid points, got {len(grid)}")
    prim = _haar_primitives(_cell_edges(grid), level)
    return np.diff(prim, axis=1)


def haar_projection(dataset: FunctionalDataset, level: int = DEFAULT_HAAR_LEVEL) -> np.ndarray:
    """n x 2**level coefficients: scaling coefficient, then wavelets level by level."""
    return dataset.values @ haar_matrix(dataset.grid, level).T
