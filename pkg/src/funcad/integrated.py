"""Integrated functional depths (fT, fSDO, fAO) and the depth-to-score map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractError, DimensionError, FunctionalDataset
from .udepth import BASES, column_summaries, pointwise_depths

# detector names used in reports, keyed by base depth
NAMES = {"tukey": "fT", "projection": "fSDO", "asym_projection": "fAO"}


@dataclass(frozen=True)
class IntegratedDepthConfig:
    base: str = "tukey"
    weights: str = "auto"  # "uniform-mean", "trapezoid", or "auto" (mean on uniform grids)

    def __post_init__(self):
        if self.base not in BASES:
            raise ContractError(f"unknown base depth {self.base!r}")
        if self.weights not in ("auto", "uniform-mean", "trapezoid"):
            raise ContractError(f"unknown weighting {self.weights!r}")


def _weights(dataset: FunctionalDataset, cfg: IntegratedDepthConfig) -> np.ndarray:
    if cfg.weights == "uniform-mean":
        return np.full(dataset.p, 1.0 / dataset.p)
    if cfg.weights == "trapezoid":
        w = dataset.grid.trapezoid_weights()
        return w / w.sum()
    return dataset.grid.integration_weights()


def integrated_depths(queries, dataset: FunctionalDataset,
                      cfg: IntegratedDepthConfig = IntegratedDepthConfig()) -> np.ndarray:
    """Depth of each query curve relative to the sample ``dataset``.

    ``queries`` may be a FunctionalDataset on the same grid or an m x p array.
    The queries are not added to the sample.
    """
    if isinstance(queries, FunctionalDataset):
        dataset.check_grid(queries)
        q = queries.values
    else:
        q = np.atleast_2d(np.asarray(queries, dtype=float))
    if q.shape[1] != dataset.p:
        raise DimensionError(f"curve length {q.shape[1]} does not match grid length {dataset.p}")
    summaries = column_summaries(dataset.values, with_medcouple=(cfg.base == "asym_projection"))
    depths = pointwise_depths(q, dataset.values, cfg.base, summaries)
    w = _weights(dataset, cfg)
    # a plain mean keeps constant depth rows exact (1/p summed p times is not 1)
    avg = depths.mean(axis=1) if np.all(w == w[0]) else depths @ w
    return np.clip(avg, 0.0, 1.0)


def integrated_depth(curve, dataset: FunctionalDataset,
                     cfg: IntegratedDepthConfig = IntegratedDepthConfig()) -> float:
    curve = np.asarray(curve, dtype=float)
    if curve.ndim != 1:
        raise DimensionError("curve must be one-dimensional")
    return float(integrated_depths(curve[None, :], dataset, cfg)[0])


def depth_to_score(depths) -> np.ndarray:
    """Anomaly score ``1 - depth``; larger means more anomalous."""
    d = np.asarray(depths, dtype=float)
    if not np.all(np.isfinite(d)) or np.any(d < 0) or np.any(d > 1):
        raise ContractError("depths must lie in [0, 1]")
    return 1.0 - d
