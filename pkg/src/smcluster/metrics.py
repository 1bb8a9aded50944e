"""Partition agreement scores: ACC, NMI, purity, pairwise F1 and ARI.

All scores are computed from the contingency table of the two labelings and
are invariant to renaming cluster ids.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "MetricsReport",
    "contingency",
    "accuracy",
    "nmi",
    "purity",
    "pairwise_f1",
    "ari",
    "evaluate",
]


@dataclass
class MetricsReport:
    acc: float
    nmi: float
    purity: float
    f1: float
    ari: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


def contingency(truth, pred) -> np.ndarray:
    """Rows index true classes, columns predicted clusters (empty ones dropped)."""
    truth = np.asarray(truth).ravel()
    pred = np.asarray(pred).ravel()
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.size} vs {pred.size}")
    if truth.size == 0:
        raise ValueError("empty labelings")
    _, t = np.unique(truth, return_inverse=True)
    _, p = np.unique(pred, return_inverse=True)
    C = np.zeros((t.max() + 1, p.max() + 1), dtype=np.int64)
    np.add.at(C, (t, p), 1)
    return C


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1) / 2.0


def accuracy(truth, pred) -> float:
    C = contingency(truth, pred)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return float(C[rows, cols].sum() / C.sum())


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(truth, pred) -> float:
    """Mutual information over the geometric mean of the two entropies."""
    C = contingency(truth, pred)
    n = C.sum()
    a, b = C.sum(axis=1), C.sum(axis=0)
    h_t, h_p = _entropy(a, n), _entropy(b, n)
    if h_t == 0.0 or h_p == 0.0:
        # a single-cluster side only matches another single-cluster side
        return 1.0 if h_t == h_p else 0.0
    nz = C > 0
    pij = C[nz] / n
    outer = np.outer(a, b)[nz] / (n * n)
    mi = float((pij * np.log(pij / outer)).sum())
    return float(min(max(mi / np.sqrt(h_t * h_p), 0.0), 1.0))


def purity(truth, pred) -> float:
    C = contingency(truth, pred)
    return float(C.max(axis=0).sum() / C.sum())


def _pair_counts(C):
    same_both = _comb2(C).sum()
    same_truth = _comb2(C.sum(axis=1)).sum()
    same_pred = _comb2(C.sum(axis=0)).sum()
    return same_both, same_truth, same_pred


def pairwise_f1(truth, pred) -> float:
    tp, same_truth, same_pred = _pair_counts(contingency(truth, pred))
    fp = same_pred - tp
    fn = same_truth - tp
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 1.0
    return float(2 * tp / denom)


def ari(truth, pred) -> float:
    C = contingency(truth, pred)
    index, sum_a, sum_b = _pair_counts(C)
    total = _comb2(C.sum())
    if total == 0:
        return 1.0
    expected = sum_a * sum_b / total
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((index - expected) / (max_index - expected))


def evaluate(truth, pred) -> MetricsReport:
    return MetricsReport(
        acc=accuracy(truth, pred),
        nmi=nmi(truth, pred),
        purity=purity(truth, pred),
        f1=pairwise_f1(truth, pred),
        ari=ari(truth, pred),
        n=int(np.asarray(truth).size),
    )
