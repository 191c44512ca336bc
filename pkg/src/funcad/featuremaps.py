"""Two-dimensional embeddings built from pointwise outlyingness.

``O = 1/D - 1`` turns a pointwise depth into an outlyingness (capped where the
depth vanishes). The MS map takes its time mean and variance ``(MO, VO)``; the
FOM map replaces the variance by the relative spread ``sqrt(VO) / (1 + MO)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .baselines import IForest, IForestConfig, iforest_fit
from .core import ContractError, FunctionalDataset, as_labels
from .udepth import BASES, ColumnSummaries, column_summaries, pointwise_depths

O_MAX = 1e6
MAPS = ("ms", "fom")


def outlyingness(depth) -> np.ndarray:
    d = np.asarray(depth, dtype=float)
    with np.errstate(divide="ignore"):
        o = np.where(d > 0, 1.0 / np.where(d > 0, d, 1.0) - 1.0, O_MAX)
    return np.clip(o, 0.0, O_MAX)


def outlyingness_series(queries, sample: FunctionalDataset, base: str,
                        summaries: ColumnSummaries | None = None) -> np.ndarray:
    """``O(X_i(t_j) | sample(t_j))`` for every query curve and time stamp."""
    return outlyingness(pointwise_depths(queries, sample.values, base, summaries))


def moments(series: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Rows of (MO, VO): weighted time mean and variance of each series."""
    uniform = np.all(weights == weights[0])
    mo = series.mean(axis=1) if uniform else series @ weights
    dev2 = (series - mo[:, None]) ** 2
    vo = dev2.mean(axis=1) if uniform else dev2 @ weights
    # a constant series has no spread, whatever the rounding says
    vo = np.where(np.ptp(series, axis=1) == 0, 0.0, np.maximum(vo, 0.0))
    return np.column_stack([mo, vo])


def fom_from_ms(ms: np.ndarray) -> np.ndarray:
    ms = np.atleast_2d(ms)
    return np.column_stack([ms[:, 0], np.sqrt(ms[:, 1]) / (1.0 + ms[:, 0])])


def _features(map_name: str, queries, sample: FunctionalDataset, base: str,
              summaries: ColumnSummaries | None = None) -> np.ndarray:
    if map_name not in MAPS:
        raise ContractError(f"unknown feature map {map_name!r}; expected one of {MAPS}")
    if sample.n < 2:
        raise ContractError("feature maps need at least 2 curves")
    series = outlyingness_series(queries, sample, base, summaries)
    ms = moments(series, sample.grid.integration_weights())
    return ms if map_name == "ms" else fom_from_ms(ms)


def ms_features(dataset: FunctionalDataset, base: str = "tukey") -> np.ndarray:
    """n x 2 matrix of (MO, VO)."""
    return _features("ms", dataset.values, dataset, base)


def fom_features(dataset: FunctionalDataset, base: str = "projection") -> np.ndarray:
    """n x 2 matrix of (MO, sqrt(VO) / (1 + MO))."""
    return _features("fom", dataset.values, dataset, base)


@dataclass(eq=False)
class FeatureMapModel:
    """Training sample, its column summaries and an isolation forest on its features."""

    training: FunctionalDataset
    map_name: str
    base: str
    forest: IForest
    summaries: ColumnSummaries

    def features(self, curves) -> np.ndarray:
        q = curves.values if isinstance(curves, FunctionalDataset) else curves
        if isinstance(curves, FunctionalDataset):
            curves.check_grid(self.training.grid)
        return _features(self.map_name, q, self.training, self.base, self.summaries)

    def score(self, curves) -> np.ndarray:
        return self.forest.score(self.features(curves))


def featuremap_fit(dataset: FunctionalDataset, map_name: str = "ms", base: str = "tukey",
                   if_config: IForestConfig = IForestConfig()) -> FeatureMapModel:
    if base not in BASES:
        raise ContractError(f"unknown base depth {base!r}; expected one of {BASES}")
    summ = column_summaries(dataset.values, with_medcouple=(base == "asym_projection"))
    feats = _features(map_name, dataset.values, dataset, base, summ)
    return FeatureMapModel(dataset, map_name, base, iforest_fit(feats, if_config), summ)


def featuremap_detector(dataset: FunctionalDataset, map_name: str = "ms", base: str = "tukey",
                        if_config: IForestConfig = IForestConfig(), test=None) -> np.ndarray:
    """Isolation Forest scores of the ``test`` curves (default: the training curves)."""
    model = featuremap_fit(dataset, map_name, base, if_config)
    return model.score(dataset if test is None else test)


def write_scatter(path, features, labels=None) -> None:
    """CSV with columns curve_id, x, y, label (label empty when unknown)."""
    f = np.atleast_2d(np.asarray(features, dtype=float))
    lab = None if labels is None else as_labels(labels, f.shape[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["curve_id", "x", "y", "label"])
        for i, (x, y) in enumerate(f[:, :2]):
            w.writerow([i, repr(float(x)), repr(float(y)), "" if lab is None else int(lab[i])])
