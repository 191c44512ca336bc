"""Evaluation of anomaly scores against labels (+1 anomaly, -1 normal)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import ANOMALY, ContractError, DimensionError, as_labels, as_scores


class UndefinedMetricError(ValueError):
    """The metric needs a class that is absent from the labels."""


def _check(scores, labels):
    s = as_scores(scores)
    y = as_labels(labels, s.size)
    return s, y == ANOMALY


def _sweep(scores, positive):
    """Cumulative (TP, FP) at each distinct threshold, from the highest score down."""
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    pos = positive[order]
    tp = np.cumsum(pos)
    fp = np.cumsum(~pos)
    last = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    return tp[last], fp[last], s[last]


def roc_curve(scores, labels) -> np.ndarray:
    """ROC points (FPR, TPR) from (0, 0) to (1, 1), one per distinct threshold."""
    s, pos = _check(scores, labels)
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("ROC needs both anomalies and normals")
    tp, fp, _ = _sweep(s, pos)
    return np.column_stack([np.r_[0.0, fp / n_neg], np.r_[0.0, tp / n_pos]])


def auc(scores, labels) -> float:
    """P(s+ > s-) + P(s+ = s-) / 2, from midranks (Mann-Whitney)."""
    s, pos = _check(scores, labels)
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both anomalies and normals")
    order = np.argsort(s, kind="mergesort")
    ranks = np.empty(s.size)
    srt = s[order]
    # midranks for ties
    starts = np.r_[0, np.flatnonzero(np.diff(srt) != 0) + 1]
    ends = np.r_[starts[1:], s.size]
    mid = (starts + ends + 1) / 2.0
    ranks[order] = np.repeat(mid, ends - starts)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def pr_curve(scores, labels) -> np.ndarray:
    """PR points (recall, precision), one per distinct threshold from the top score down."""
    s, pos = _check(scores, labels)
    n_pos = int(pos.sum())
    if n_pos == 0:
        raise UndefinedMetricError("PR curve needs at least one anomaly")
    tp, fp, _ = _sweep(s, pos)
    return np.column_stack([tp / n_pos, tp / (tp + fp)])


def average_precision(scores, labels) -> float:
    """Step-wise area under the PR curve: sum of (R_k - R_{k-1}) * P_k."""
    pr = pr_curve(scores, labels)
    recall, precision = pr[:, 0], pr[:, 1]
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def classify_top_fraction(scores, alpha: float) -> np.ndarray:
    """Flag the ceil(alpha * n) highest scores; ties go to the earlier row."""
    s = as_scores(scores)
    if not 0.0 < alpha < 1.0:
        raise ContractError(f"alpha must lie in (0, 1), got {alpha}")
    k = max(1, math.ceil(alpha * s.size - 1e-9))
    flagged = np.argsort(-s, kind="mergesort")[:k]
    out = np.full(s.size, -1, dtype=int)
    out[flagged] = 1
    return out


def f1_and_sensitivity(predicted, truth) -> tuple[float, float]:
    pred = as_labels(predicted) == ANOMALY
    true = as_labels(truth) == ANOMALY
    if pred.size != true.size:
        raise DimensionError(f"{pred.size} predictions for {true.size} labels")
    if not true.any():
        raise UndefinedMetricError("sensitivity needs at least one true anomaly")
    tp = int(np.sum(pred & true))
    fp = int(np.sum(pred & ~true))
    fn = int(np.sum(~pred & true))
    return 2 * tp / (2 * tp + fp + fn), tp / (tp + fn)


@dataclass(frozen=True)
class EvalReport:
    f1: float
    ap: float
    auc: float
    p_c: float
    threshold_rule: dict

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(scores, labels, alpha: float | None = None) -> EvalReport:
    """All four metrics; the decision rule flags the top ``alpha`` fraction.

    ``alpha`` defaults to the labeled anomaly fraction.
    """
    s, pos = _check(scores, labels)
    if alpha is None:
        alpha = float(pos.mean())
    pred = classify_top_fraction(s, alpha)
    f1, p_c = f1_and_sensitivity(pred, np.where(pos, 1, -1))
    rule = {"rule": "top-fraction", "alpha": alpha, "flagged": int(np.sum(pred == 1)),
            "ties": "stable input order"}
    return EvalReport(f1=f1, ap=average_precision(s, labels), auc=auc(s, labels), p_c=p_c,
                      threshold_rule=rule)
