"""Sparse symmetric graphs and the symmetrically normalized Laplacian.

The Laplacian ``L = I - D^{-1/2} A D^{-1/2}`` is never built densely. Consumers
hold the normalized adjacency ``S`` and apply ``I - S`` on the fly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

__all__ = [
    "SparseGraph",
    "NormalizedOperator",
    "degrees",
    "normalize",
    "apply_laplacian",
    "build_probabilistic_neighbor_graph",
    "neighbor_weights",
    "GraphError",
]

# rows of the distance matrix processed per block in the neighbor graph
_DISTANCE_BLOCK = 512


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SparseGraph:
    """Symmetric, non-negative weighted adjacency over ``n`` nodes.

    Both ``(i, j)`` and ``(j, i)`` are stored. Use :meth:`from_edges` or
    :meth:`from_matrix` rather than the constructor so invariants are checked.
    """

    adjacency: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def nnz(self) -> int:
        return self.adjacency.nnz

    @classmethod
    def from_matrix(cls, matrix, symmetrize: bool = False) -> "SparseGraph":
        A = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
        if A.shape[0] != A.shape[1]:
            raise GraphError(f"adjacency must be square, got {A.shape}")
        A.sum_duplicates()
        A.eliminate_zeros()
        if not np.all(np.isfinite(A.data)):
            raise GraphError("graph weights must be finite")
        if np.any(A.data < 0):
            raise GraphError("graph weights must be non-negative")
        if symmetrize:
            A = ((A + A.T) * 0.5).tocsr()
        elif (A != A.T).nnz:
            raise GraphError("graph is not symmetric")
        A.sort_indices()
        return cls(A)

    @classmethod
    def from_edges(cls, n: int, edges, symmetrize: bool = True) -> "SparseGraph":
        """Build from ``(i, j, w)`` triples.

        Each undirected edge may be listed once (``symmetrize=True`` mirrors it)
        or in both directions with ``symmetrize=False``. Repeated pairs raise.
        """
        edges = list(edges)
        if edges:
            rows, cols, w = (np.asarray(c) for c in zip(*edges))
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            w = np.zeros(0)
        rows = rows.astype(np.int64)
        cols = cols.astype(np.int64)
        w = w.astype(np.float64)
        if rows.size and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
            raise GraphError("edge index out of range")
        if len(set(zip(rows.tolist(), cols.tolist()))) != rows.size:
            raise GraphError("duplicate edge entries")
        if symmetrize:
            off = rows != cols
            rows, cols, w = (
                np.concatenate([rows, cols[off]]),
                np.concatenate([cols, rows[off]]),
                np.concatenate([w, w[off]]),
            )
            pairs = set()
            for i, j in zip(rows.tolist(), cols.tolist()):
                if (i, j) in pairs:
                    raise GraphError(f"edge ({i}, {j}) listed in both directions")
                pairs.add((i, j))
        A = sp.coo_matrix((w, (rows, cols)), shape=(n, n))
        return cls.from_matrix(A)

    def to_dense(self) -> np.ndarray:
        return self.adjacency.toarray()


@dataclass(frozen=True, eq=False)
class NormalizedOperator:
    """``S = D^{-1/2} A D^{-1/2}`` plus the degree vector it came from."""

    S: sp.csr_matrix
    degrees: np.ndarray

    @property
    def n(self) -> int:
        return self.S.shape[0]

    def laplacian_dense(self) -> np.ndarray:
        """Dense ``I - S``. For tests and small oracles only."""
        return np.eye(self.n) - self.S.toarray()


def degrees(A: SparseGraph) -> np.ndarray:
    return np.asarray(A.adjacency.sum(axis=1)).ravel()


def normalize(A: SparseGraph) -> NormalizedOperator:
    """Symmetrically normalize ``A``.

    Isolated nodes get all-zero rows and columns in ``S``, so the implied
    Laplacian acts as the identity on them.
    """
    d = degrees(A)
    inv_sqrt = np.zeros_like(d)
    pos = d > 0
    inv_sqrt[pos] = 1.0 / np.sqrt(d[pos])
    coo = A.adjacency.tocoo()
    # scale by the product inv[i] * inv[j] so S stays exactly symmetric
    data = coo.data * (inv_sqrt[coo.row] * inv_sqrt[coo.col])
    S = sp.csr_matrix((data, (coo.row, coo.col)), shape=coo.shape)
    S.eliminate_zeros()
    S.sort_indices()
    return NormalizedOperator(S=S, degrees=d)


def apply_laplacian(op: NormalizedOperator, X: np.ndarray) -> np.ndarray:
    """Return ``L @ X = X - S @ X`` without materializing ``L``."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != op.n:
        raise ValueError(f"X has {X.shape[0]} rows, operator has {op.n} nodes")
    return X - op.S @ X


def build_probabilistic_neighbor_graph(X: np.ndarray, k_nn: int) -> SparseGraph:
    """Adaptive-neighbor graph from features.

    Row ``i`` spreads unit mass over its ``k_nn`` nearest neighbours (squared
    Euclidean, self excluded) with weights

        s_ij = (e_{k+1} - e_j) / (k e_{k+1} - sum_{h<=k} e_h)

    where ``e`` are the sorted distances from ``i``. Rows where the
    denominator vanishes fall back to ``1/k``. Distance ties are broken by
    lower index. The result is ``(W + W^T) / 2``.
    """
    W = neighbor_weights(X, k_nn)
    return SparseGraph.from_matrix(W, symmetrize=True)


def neighbor_weights(X: np.ndarray, k_nn: int) -> sp.csr_matrix:
    """Unsymmetrized, row-stochastic neighbor weights ``W``."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d array")
    n = X.shape[0]
    if not 1 <= k_nn < n:
        raise ValueError(f"k_nn must satisfy 1 <= k_nn < n (n={n}, k_nn={k_nn})")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")

    k = k_nn
    # with k = n-1 there is no (k+1)-th neighbour; every row is uniform
    have_next = k + 1 <= n - 1
    rows = np.repeat(np.arange(n), k)
    cols = np.empty(n * k, dtype=np.int64)
    vals = np.empty(n * k)
    for start in range(0, n, _DISTANCE_BLOCK):
        stop = min(start + _DISTANCE_BLOCK, n)
        dist = cdist(X[start:stop], X, metric="sqeuclidean")
        local = np.arange(stop - start)
        dist[local, start + local] = np.inf
        # stable sort keeps lower indices first among equal distances
        order = np.argsort(dist, axis=1, kind="stable")[:, : k + 1]
        e = np.take_along_axis(dist, order, axis=1)
        nbr, e_k = order[:, :k], e[:, :k]
        if have_next:
            e_next = e[:, k : k + 1]
            denom = k * e_next[:, 0] - e_k.sum(axis=1)
            scale = np.maximum(k * e_next[:, 0], np.finfo(float).tiny)
            degenerate = denom <= 1e-12 * scale
            with np.errstate(divide="ignore", invalid="ignore"):
                w = (e_next - e_k) / denom[:, None]
            w[degenerate] = 1.0 / k
        else:
            w = np.full((stop - start, k), 1.0 / k)
        sl = slice(start * k, stop * k)
        cols[sl] = nbr.ravel()
        vals[sl] = w.ravel()
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
