"""Univariate depths of a point within a one-dimensional sample.

Scalar functions (``tukey_depth_1d`` and friends) follow the textbook
definitions directly. The ``*_columns`` helpers evaluate the same depths for a
block of query values against every column of a sample matrix at once; the
integrated depths and feature maps are built on them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ContractError

WHISKER = 1.5
# exponents on the medcouple in the lower / upper adjusted whiskers
LOWER_EXP = -4.0
UPPER_EXP = 3.0


def regularize(denominator, median):
    """Replace zero denominators by ``1e-12 * max(1, |median|)``."""
    eps = 1e-12 * np.maximum(1.0, np.abs(median))
    return np.where(denominator > 0, denominator, eps)


def _as_sample(sample) -> np.ndarray:
    x = np.asarray(sample, dtype=float).ravel()
    if x.size == 0:
        raise ContractError("sample must be nonempty")
    if not np.all(np.isfinite(x)):
        raise ContractError("sample values must be finite")
    return x


def tukey_depth_1d(x: float, sample) -> float:
    """Halfspace depth ``min(F(x), 1 - F(x-))`` with the empirical cdf."""
    s = _as_sample(sample)
    n = s.size
    return min(np.count_nonzero(s <= x), np.count_nonzero(s >= x)) / n


def projection_depth_1d(x: float, sample) -> float:
    s = _as_sample(sample)
    med = np.median(s)
    mad = regularize(np.median(np.abs(s - med)), med)
    return float(1.0 / (1.0 + abs(x - med) / mad))


def medcouple(sample) -> float:
    """Medcouple skewness of ``sample`` by full kernel enumeration.

    The kernel ``(x_j + x_i - 2 med) / (x_j - x_i)`` runs over ordered pairs of
    distinct indices with ``x_i <= med <= x_j``. Pairs where both values equal
    the median get +1 or -1 in equal numbers (sign correction for ties).
    """
    s = np.sort(_as_sample(sample))
    if s.size < 3:
        raise ContractError(f"medcouple needs at least 3 values, got {s.size}")
    return float(_medcouple_sorted(s))


def _medcouple_sorted(s: np.ndarray) -> float:
    med = np.median(s)
    z = s - med
    scale = np.max(np.abs(z))
    if scale == 0:
        return 0.0
    z = z / scale
    lower = z[z < 0]
    upper = z[z > 0]
    k = s.size - lower.size - upper.size  # values tied with the median

    parts = []
    if lower.size and upper.size:
        num = upper[:, None] + lower[None, :]
        den = upper[:, None] - lower[None, :]
        parts.append((num / den).ravel())
    if k:
        # a median tie paired with a strict value on either side
        parts.append(np.ones(k * upper.size))
        parts.append(-np.ones(k * lower.size))
        pairs = k * (k - 1) // 2
        parts.append(np.ones(pairs))
        parts.append(-np.ones(pairs))
    values = np.concatenate(parts)
    if values.size == 0:
        return 0.0
    return float(np.clip(np.median(values), -1.0, 1.0))


@dataclass(frozen=True)
class RobustSummary:
    median: float
    mad: float
    q25: float
    q75: float
    medcouple: float

    @property
    def iqr(self) -> float:
        return self.q75 - self.q25

    @property
    def lower_whisker(self) -> float:
        return self.q25 - WHISKER * self.iqr * np.exp(LOWER_EXP * self.medcouple)

    @property
    def upper_whisker(self) -> float:
        return self.q75 + WHISKER * self.iqr * np.exp(UPPER_EXP * self.medcouple)


def robust_summary(sample) -> RobustSummary:
    s = np.sort(_as_sample(sample))
    med = float(np.median(s))
    q25, q75 = np.quantile(s, [0.25, 0.75])
    mc = _medcouple_sorted(s) if s.size >= 3 else 0.0
    return RobustSummary(
        median=med,
        mad=float(np.median(np.abs(s - med))),
        q25=float(q25),
        q75=float(q75),
        medcouple=mc,
    )


def adjusted_outlyingness(x, summary: RobustSummary):
    """Skewness-adjusted distance to the median, 0 at the median itself."""
    x = np.asarray(x, dtype=float)
    med = summary.median
    up = regularize(np.float64(summary.upper_whisker - med), med)
    down = regularize(np.float64(med - summary.lower_whisker), med)
    return np.where(x > med, (x - med) / up, np.where(x < med, (med - x) / down, 0.0))


def asym_projection_depth_1d(x: float, sample) -> float:
    summary = robust_summary(sample)
    return float(1.0 / (1.0 + adjusted_outlyingness(x, summary)))


# --- column-wise evaluation -----------------------------------------------

BASES = ("tukey", "projection", "asym_projection")


@dataclass(frozen=True, eq=False)
class ColumnSummaries:
    """Per-column statistics of an n x p sample matrix."""

    sorted_values: np.ndarray
    median: np.ndarray
    mad: np.ndarray
    q25: np.ndarray
    q75: np.ndarray
    medcouple: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.sorted_values.shape[0]

    def whiskers(self):
        iqr = self.q75 - self.q25
        mc = self.medcouple
        lower = self.q25 - WHISKER * iqr * np.exp(LOWER_EXP * mc)
        upper = self.q75 + WHISKER * iqr * np.exp(UPPER_EXP * mc)
        return lower, upper


def column_summaries(sample: np.ndarray, with_medcouple: bool = True) -> ColumnSummaries:
    sample = np.asarray(sample, dtype=float)
    srt = np.sort(sample, axis=0)
    med = np.median(srt, axis=0)
    mad = np.median(np.abs(srt - med), axis=0)
    q25, q75 = np.quantile(srt, [0.25, 0.75], axis=0)
    mc = None
    if with_medcouple:
        if srt.shape[0] >= 3:
            mc = np.array([_medcouple_sorted(srt[:, j]) for j in range(srt.shape[1])])
        else:
            mc = np.zeros(srt.shape[1])
    return ColumnSummaries(srt, med, mad, q25, q75, mc)


def pointwise_depths(queries: np.ndarray, sample: np.ndarray, base: str,
                     summaries: ColumnSummaries | None = None) -> np.ndarray:
    """Depth of ``queries[i, j]`` within column ``j`` of ``sample``.

    ``queries`` is m x p, ``sample`` n x p; the result is m x p.
    """
    if base not in BASES:
        raise ContractError(f"unknown base depth {base!r}; expected one of {BASES}")
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    if summaries is None:
        summaries = column_summaries(sample, with_medcouple=(base == "asym_projection"))
    srt = summaries.sorted_values
    n, p = srt.shape
    if queries.shape[1] != p:
        raise ContractError(f"queries have {queries.shape[1]} columns, sample has {p}")

    if base == "tukey":
        out = np.empty(queries.shape)
        for j in range(p):
            col = srt[:, j]
            below = np.searchsorted(col, queries[:, j], side="right")
            above = n - np.searchsorted(col, queries[:, j], side="left")
            out[:, j] = np.minimum(below, above)
        return out / n

    med = summaries.median
    if base == "projection":
        mad = regularize(summaries.mad, med)
        return 1.0 / (1.0 + np.abs(queries - med) / mad)

    lower, upper = summaries.whiskers()
    up = regularize(upper - med, med)
    down = regularize(med - lower, med)
    ao = np.where(queries > med, (queries - med) / up,
                  np.where(queries < med, (med - queries) / down, 0.0))
    return 1.0 / (1.0 + ao)
