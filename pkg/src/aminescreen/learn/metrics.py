"""Binary classification metrics from confusion counts or predictions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from ..errors import EmptyInput, LengthMismatch


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    sensitivity: float
    specificity: float
    roc_auc_balanced: float
    roc_auc_rank: float
    mcc: float
    confusion: Confusion
    mcc_undefined: bool = False

    def as_row(self) -> dict:
        row = {k: v for k, v in asdict(self).items() if k != "confusion"}
        row.update({k: v for k, v in asdict(self.confusion).items()})
        return row


def _ratio(num, den):
    return num / den if den else float("nan")


def mcc_from_confusion(c: Confusion) -> tuple[float, bool]:
    """MCC = (TP*TN - FP*FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)); 0 and a flag when undefined."""
    den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    if den == 0:
        return 0.0, True
    return (c.tp * c.tn - c.fp * c.fn) / math.sqrt(den), False


def metrics_from_confusion(c: Confusion, roc_auc_rank: float = float("nan")) -> MetricsReport:
    sens = _ratio(c.tp, c.tp + c.fn)
    spec = _ratio(c.tn, c.tn + c.fp)
    mcc, undefined = mcc_from_confusion(c)
    return MetricsReport(
        accuracy=_ratio(c.tp + c.tn, c.n),
        sensitivity=sens,
        specificity=spec,
        roc_auc_balanced=0.5 * (sens + spec),
        roc_auc_rank=roc_auc_rank,
        mcc=mcc,
        confusion=c,
        mcc_undefined=undefined,
    )


def confusion(y_true, y_pred) -> Confusion:
    y_true = np.asarray(y_true).astype(int)
    y_pred = np.asarray(y_pred).astype(int)
    return Confusion(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fp=int(np.sum((y_true == 0) & (y_pred == 1))),
        tn=int(np.sum((y_true == 0) & (y_pred == 0))),
        fn=int(np.sum((y_true == 1) & (y_pred == 0))),
    )


def roc_auc_rank(y_true, score) -> float:
    """Mann-Whitney estimate of P(score_pos > score_neg), ties counting one half."""
    y_true = np.asarray(y_true).astype(int)
    score = np.asarray(score, dtype=float)
    n_pos = int(y_true.sum())
    n_neg = len(y_true) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    ranks = rankdata(score)
    return float((ranks[y_true == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def evaluate(y_true, y_pred=None, y_proba=None) -> MetricsReport:
    """Confusion-matrix metrics plus both AUC variants.

    ``y_pred`` defaults to ``y_proba >= 0.5``.  ``roc_auc_balanced`` is the
    mean of sensitivity and specificity; ``roc_auc_rank`` is the rank
    statistic over ``y_proba`` (NaN without probabilities or without both
    classes present).
    """
    y_true = np.asarray(y_true)
    if len(y_true) == 0:
        raise EmptyInput("no samples to evaluate")
    if y_pred is None and y_proba is None:
        raise ValueError("need predictions or probabilities")
    if y_proba is not None:
        y_proba = np.asarray(y_proba, dtype=float)
        if len(y_proba) != len(y_true):
            raise LengthMismatch(f"{len(y_true)} labels but {len(y_proba)} probabilities")
        if y_pred is None:
            y_pred = (y_proba >= 0.5).astype(int)
    y_pred = np.asarray(y_pred)
    if len(y_pred) != len(y_true):
        raise LengthMismatch(f"{len(y_true)} labels but {len(y_pred)} predictions")
    auc = roc_auc_rank(y_true, y_proba) if y_proba is not None else float("nan")
    return metrics_from_confusion(confusion(y_true, y_pred), auc)


def matching_confusions(row: dict, n_pos: int, n_neg: int, tol: float = 0.005 + 1e-9) -> list[Confusion]:
    """All confusion matrices with the given class sizes whose metrics round to ``row``.

    ``row`` holds any of accuracy, sensitivity, specificity,
    roc_auc_balanced and mcc.
    """
    out = []
    for tp in range(n_pos + 1):
        for tn in range(n_neg + 1):
            c = Confusion(tp=tp, fp=n_neg - tn, tn=tn, fn=n_pos - tp)
            m = metrics_from_confusion(c)
            if all(abs(getattr(m, k) - v) <= tol for k, v in row.items()):
                out.append(c)
    return out
