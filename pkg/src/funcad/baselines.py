"""Multivariate detectors used after filtering or feature maps.

Isolation Forest splits on random coordinates; Local Outlier Factor compares
the reachability density of a point with that of its k nearest neighbours.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import ContractError, DimensionError
from .itree import IsolationTree, average_path_length, default_height_limit, grow_tree

MAX_TRIES = 10     # coordinate redraws before a node with constant columns becomes a leaf
LOF_EPS = 1e-10    # floor on the mean reachability distance (duplicate points)


def as_matrix(data) -> np.ndarray:
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[1] < 1:
        raise DimensionError(f"expected an n x d matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ContractError("data must be finite")
    return x


# --- Isolation Forest -------------------------------------------------------------

@dataclass(frozen=True)
class IForestConfig:
    n_trees: int = 100
    subsample: int | None = None   # None -> min(256, n)
    height_limit: int | None = None
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_trees < 1:
            raise ContractError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.subsample is not None and self.subsample < 1:
            raise ContractError(f"subsample must be >= 1, got {self.subsample}")


@dataclass(eq=False)
class IForest:
    config: IForestConfig
    psi: int
    d: int
    trees: list[IsolationTree] = field(default_factory=list)

    def path_lengths(self, points) -> np.ndarray:
        x = as_matrix(points)
        if x.shape[1] != self.d:
            raise DimensionError(f"model expects {self.d} features, got {x.shape[1]}")
        cols = _map(lambda t: t.path_lengths(x), self.trees, self.config.n_jobs)
        return np.column_stack(cols)

    def score(self, points) -> np.ndarray:
        h = self.path_lengths(points).mean(axis=1)
        c = average_path_length(self.psi)
        if c == 0:
            return np.full(h.shape, 0.5)
        return np.power(2.0, -h / c)

    def to_dict(self) -> dict:
        return {"kind": "iforest", "config": asdict(self.config), "psi": self.psi, "d": self.d,
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d: dict) -> IForest:
        return cls(IForestConfig(**d["config"]), int(d["psi"]), int(d["d"]),
                   [IsolationTree.from_dict(t) for t in d["trees"]])


def _map(fn, items, n_jobs: int) -> list:
    if n_jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def iforest_fit(data, cfg: IForestConfig = IForestConfig()) -> IForest:
    """Axis-aligned isolation trees, one independent random stream per tree."""
    x = as_matrix(data)
    n = x.shape[0]
    psi = min(256, n) if cfg.subsample is None else cfg.subsample
    if psi > n:
        raise ContractError(f"subsample {psi} exceeds sample size {n}")
    height = default_height_limit(psi) if cfg.height_limit is None else cfg.height_limit
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees)

    def grow(ss):
        rng = np.random.default_rng(ss)
        rows = rng.choice(n, size=psi, replace=False)
        return grow_tree(x[rows], rng, height, max_tries=MAX_TRIES)

    return IForest(cfg, psi, x.shape[1], _map(grow, seeds, cfg.n_jobs))


def iforest_score(model: IForest, points) -> np.ndarray:
    return model.score(points)


# --- Local Outlier Factor ---------------------------------------------------------

def pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _lof_parts(dist: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """k-distances and neighbourhood masks (ties at the k-distance included)."""
    kdist = np.sort(dist, axis=1)[:, k - 1]
    return kdist, dist <= kdist[:, None]


def _lrd(dist: np.ndarray, mask: np.ndarray, kdist_ref: np.ndarray) -> np.ndarray:
    reach = np.maximum(dist, kdist_ref[None, :])
    mean_reach = np.where(mask, reach, 0.0).sum(axis=1) / mask.sum(axis=1)
    return 1.0 / np.maximum(mean_reach, LOF_EPS)


@dataclass(frozen=True, eq=False)
class LofModel:
    """Reference sample with its k-distances and local reachability densities."""

    data: np.ndarray
    k: int
    kdist: np.ndarray
    lrd: np.ndarray
    training_lof: np.ndarray

    def score(self, points) -> np.ndarray:
        """LOF of new points relative to the reference sample."""
        q = as_matrix(points)
        if q.shape[1] != self.data.shape[1]:
            raise DimensionError(f"model expects {self.data.shape[1]} features, got {q.shape[1]}")
        dist = pairwise_distances(q, self.data)
        _, mask = _lof_parts(dist, self.k)
        lrd_q = _lrd(dist, mask, self.kdist)
        return (np.where(mask, self.lrd[None, :], 0.0).sum(axis=1) / mask.sum(axis=1)) / lrd_q

    def to_dict(self) -> dict:
        return {"kind": "lof", "k": self.k, "data": self.data.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> LofModel:
        return lof_fit(np.asarray(d["data"], dtype=float), int(d["k"]))


def lof_fit(data, k: int = 20) -> LofModel:
    x = as_matrix(data)
    n = x.shape[0]
    if not 1 <= k < n:
        raise ContractError(f"k must lie in [1, {n - 1}], got {k}")
    dist = pairwise_distances(x, x)
    np.fill_diagonal(dist, np.inf)
    kdist, mask = _lof_parts(dist, k)
    lrd = _lrd(dist, mask, kdist)
    lof_vals = (np.where(mask, lrd[None, :], 0.0).sum(axis=1) / mask.sum(axis=1)) / lrd
    return LofModel(x, k, kdist, lrd, lof_vals)


def lof(data, k: int = 20) -> np.ndarray:
    """LOF of every point of ``data`` with respect to the others."""
    return lof_fit(data, k).training_lof
