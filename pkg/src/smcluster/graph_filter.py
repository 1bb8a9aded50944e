"""Low-pass graph filtering of feature matrices.

``apply_filter`` is the production path: ``k`` sparse passes of
``Y <- Y - mu * (Y - S Y)``, i.e. ``(I - mu L)^k X``. ``exact_filter`` solves
the smoothing problem ``(I + mu L) Xbar = X`` densely and is kept only as a
reference for small graphs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graph_core import NormalizedOperator

__all__ = [
    "FilterConfig",
    "apply_filter",
    "exact_filter",
    "filter_all_views",
    "EXACT_FILTER_MAX_N",
]

EXACT_FILTER_MAX_N = 2000

# lambda_max of a normalized Laplacian is at most 2
_MU_WARN = 0.5


@dataclass(frozen=True)
class FilterConfig:
    mu: float = 0.5
    k: int = 2

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if int(self.k) != self.k or self.k < 0:
            raise ValueError(f"k must be a non-negative integer, got {self.k}")
        if self.mu > _MU_WARN:
            warnings.warn(
                f"mu={self.mu} > {_MU_WARN}: mu * lambda_max(L) may exceed 1 and the "
                "filter can flip the sign of high-frequency components",
                RuntimeWarning,
                stacklevel=3,
            )


def _check(X, op: NormalizedOperator) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim not in (1, 2) or X.shape[0] != op.n:
        raise ValueError(f"X has shape {X.shape}, operator has {op.n} nodes")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    return X


def apply_filter(X, op: NormalizedOperator, cfg: FilterConfig) -> np.ndarray:
    """Return ``(I - mu L)^k X`` using ``k`` sparse products with ``S``."""
    Y = _check(X, op).copy()
    mu = cfg.mu
    for _ in range(cfg.k):
        Y = Y - mu * (Y - op.S @ Y)
    return Y


def exact_filter(X, op: NormalizedOperator, mu: float, max_n: int = EXACT_FILTER_MAX_N) -> np.ndarray:
    """Solve ``(I + mu L) Xbar = X`` with a dense SPD solve."""
    X = _check(X, op)
    if op.n > max_n:
        raise ValueError(f"exact_filter is capped at n <= {max_n}, got n={op.n}")
    if not mu > 0:
        raise ValueError("mu must be positive")
    M = (1.0 + mu) * np.eye(op.n) - mu * op.S.toarray()
    return scipy.linalg.solve(M, X, assume_a="pos")


def filter_all_views(views, ops, cfg: FilterConfig) -> list[np.ndarray]:
    """Filter every view with its own graph operator."""
    views = getattr(views, "views", views)
    if len(views) != len(ops):
        raise ValueError(f"{len(views)} views but {len(ops)} graph operators")
    return [apply_filter(X, op, cfg) for X, op in zip(views, ops)]
