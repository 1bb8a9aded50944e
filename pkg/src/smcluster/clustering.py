"""Seeded Lloyd's K-means with k-means++ seeding and restarts.

Restart ``r`` draws from the ``r``-th child of ``np.random.SeedSequence(seed)``,
so results do not depend on how many restarts run before it. The best run is
the one with the lowest inertia, ties going to the earliest restart.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = ["KMeansResult", "kmeans"]


@dataclass
class KMeansResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    iterations_run: int
    inertia_history: list[float] = field(default_factory=list, repr=False)
    restart_inertias: list[float] = field(default_factory=list, repr=False)


def _sq_dists(X: np.ndarray, C: np.ndarray, x_sq: np.ndarray) -> np.ndarray:
    D = x_sq[:, None] - 2.0 * (X @ C.T) + (C * C).sum(axis=1)[None, :]
    np.maximum(D, 0.0, out=D)
    return D


def _kmeanspp(X: np.ndarray, g: int, rng: np.random.Generator, x_sq: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    idx = [int(rng.integers(n))]
    closest = _sq_dists(X, X[idx], x_sq)[:, 0]
    for _ in range(1, g):
        total = closest.sum()
        if total <= 0:
            # every point coincides with a chosen center
            candidates = np.setdiff1d(np.arange(n), idx)
            nxt = int(candidates[rng.integers(candidates.size)])
        else:
            cum = np.cumsum(closest)
            nxt = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            nxt = min(nxt, n - 1)
        idx.append(nxt)
        closest = np.minimum(closest, _sq_dists(X, X[nxt : nxt + 1], x_sq)[:, 0])
    return X[idx].copy()


def _centroids(X, labels, g):
    n = X.shape[0]
    onehot = sp.csr_matrix((np.ones(n), (labels, np.arange(n))), shape=(g, n))
    counts = np.bincount(labels, minlength=g).astype(np.float64)
    return np.asarray(onehot @ X) / counts[:, None]


def _repair_empty(X, C, labels, D):
    """Move each empty centroid onto the point farthest from its own centroid."""
    g = C.shape[0]
    counts = np.bincount(labels, minlength=g)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return labels, False
    own = D[np.arange(X.shape[0]), labels].copy()
    for c in empty:
        # never strip the last point from a cluster
        movable = counts[labels] > 1
        if not movable.any():
            break
        cand = np.where(movable, own, -np.inf)
        p = int(np.argmax(cand))
        counts[labels[p]] -= 1
        counts[c] += 1
        labels[p] = c
        C[c] = X[p]
        own[p] = 0.0
    return labels, True


def _lloyd(X, C, max_iter, tol, x_sq):
    history = []
    it = 0
    for it in range(1, max_iter + 1):
        D = _sq_dists(X, C, x_sq)
        labels = np.argmin(D, axis=1)
        labels, _ = _repair_empty(X, C, labels, D)
        history.append(float(((X - C[labels]) ** 2).sum()))
        new_C = _centroids(X, labels, C.shape[0])
        shift = np.sqrt(((new_C - C) ** 2).sum(axis=1)).max()
        C = new_C
        if shift < tol:
            break
    labels = np.argmin(_sq_dists(X, C, x_sq), axis=1)
    labels, repaired = _repair_empty(X, C, labels, _sq_dists(X, C, x_sq))
    if repaired:
        C = _centroids(X, labels, C.shape[0])
    inertia = float(((X - C[labels]) ** 2).sum())
    history.append(inertia)
    return labels.astype(np.int64), C, inertia, it, history


def kmeans(
    X,
    g: int,
    seed: int = 0,
    restarts: int = 10,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansResult:
    """Cluster the rows of ``X`` into ``g`` groups.

    Parameters
    ----------
    X : array of shape (n, d)
    g : number of clusters, ``1 <= g <= n``
    seed : base seed; restart ``r`` uses ``SeedSequence(seed).spawn(restarts)[r]``
    restarts : independent k-means++ initializations
    max_iter : Lloyd iterations per restart
    tol : stop once no centroid moves farther than this

    Returns
    -------
    KMeansResult of the restart with the lowest inertia.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if not 1 <= g <= n:
        raise ValueError(f"need 1 <= g <= n, got g={g}, n={n}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")

    x_sq = (X * X).sum(axis=1)
    best = None
    inertias = []
    for child in np.random.SeedSequence(seed).spawn(restarts):
        rng = np.random.default_rng(child)
        C0 = _kmeanspp(X, g, rng, x_sq)
        labels, C, inertia, it, hist = _lloyd(X, C0, max_iter, tol, x_sq)
        inertias.append(inertia)
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels, C, inertia, it, hist)
    best.restart_inertias = inertias
    return best
