"""Anchor construction.

Feature data: each view gets its own ``m`` K-means centroids. Graph data:
one index set is drawn by degree-driven importance sampling and the same rows
are taken from every filtered view.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .clustering import kmeans
from .graph_core import SparseGraph, degrees

__all__ = [
    "AnchorSet",
    "SamplerConfig",
    "anchors_by_kmeans",
    "importance_probabilities",
    "probabilities_from_importance",
    "sample_without_replacement",
    "build_anchor_matrices",
]


@dataclass
class AnchorSet:
    """Per-view anchor matrices ``B[i]`` of shape ``(d_i, m)``, anchors as columns."""

    B: list[np.ndarray]
    mode: str
    indices: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.B[0].shape[1]


@dataclass(frozen=True)
class SamplerConfig:
    m: int = 100
    gamma: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")


def anchors_by_kmeans(views, m: int, seed: int = 0, restarts: int = 1, max_iter: int = 300) -> AnchorSet:
    """K-means centroids of each view as that view's anchors."""
    views = getattr(views, "views", views)
    n = views[0].shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    B = [kmeans(X, m, seed=seed, restarts=restarts, max_iter=max_iter).centroids.T.copy() for X in views]
    return AnchorSet(B=B, mode="kmeans")


def importance_probabilities(graphs: list[SparseGraph], gamma: float) -> np.ndarray:
    """``p_i = q_i^gamma / sum_j q_j^gamma`` with ``q`` the degree summed over views."""
    if not graphs:
        raise ValueError("need at least one graph")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    q = np.sum([degrees(G) for G in graphs], axis=0)
    return probabilities_from_importance(q, gamma)


def probabilities_from_importance(q, gamma: float) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    if np.any(q < 0) or not np.all(np.isfinite(q)):
        raise ValueError("importance scores must be finite and non-negative")
    if not q.any():
        warnings.warn("all nodes have zero degree; sampling uniformly", RuntimeWarning, stacklevel=2)
        return np.full(q.shape, 1.0 / q.size)
    # rescale first so q**gamma stays in range for large degrees or gamma
    w = (q / q.max()) ** gamma
    return w / w.sum()


def sample_without_replacement(p, m: int, seed: int = 0) -> np.ndarray:
    """Draw ``m`` distinct indices one at a time.

    Each draw picks among the not-yet-chosen indices with probability
    proportional to ``p``. Cost is ``O(m n)``.
    """
    w = np.array(p, dtype=np.float64)
    if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("p must be a finite, non-negative vector")
    if m < 0 or m > np.count_nonzero(w):
        raise ValueError(
            f"cannot draw {m} distinct indices: only {np.count_nonzero(w)} have positive probability"
        )
    rng = np.random.default_rng(seed)
    out = np.empty(m, dtype=np.int64)
    for t in range(m):
        cum = np.cumsum(w)
        i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        # guard against u landing on the final float boundary
        if i >= w.size or w[i] == 0:
            i = int(np.flatnonzero(w)[-1])
        out[t] = i
        w[i] = 0.0
    return out


def build_anchor_matrices(views, ind) -> AnchorSet:
    """``B[i][:, j] = views[i][ind[j]]`` for every view."""
    views = getattr(views, "views", views)
    ind = np.asarray(ind, dtype=np.int64)
    n = views[0].shape[0]
    if ind.ndim != 1 or ind.size == 0:
        raise ValueError("ind must be a non-empty index vector")
    if ind.min() < 0 or ind.max() >= n:
        raise IndexError(f"anchor index out of range [0, {n})")
    if np.unique(ind).size != ind.size:
        raise ValueError("anchor indices must be distinct")
    return AnchorSet(B=[X[ind].T.copy() for X in views], mode="importance", indices=ind.copy())
