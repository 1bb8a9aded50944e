"""Closed-form anchor-based self-expression per view.

For each view, ``Z = argmin ||Xbar^T - B Z^T||_F^2 + alpha ||Z||_F^2``, which is
``Z = Xbar B (B^T B + alpha I)^{-1}``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = ["solve_view", "concat_views", "objective", "normalize_columns"]


def solve_view(Xbar, B, alpha: float) -> np.ndarray:
    Xbar = np.asarray(Xbar, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if Xbar.ndim != 2 or B.ndim != 2 or Xbar.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch: Xbar {Xbar.shape}, B {B.shape}")
    if not (np.all(np.isfinite(Xbar)) and np.all(np.isfinite(B))):
        raise ValueError("non-finite input")
    m = B.shape[1]
    G = B.T @ B
    G[np.diag_indices(m)] += alpha
    rhs = B.T @ Xbar.T
    return scipy.linalg.solve(G, rhs, assume_a="pos").T


def objective(Xbar, B, Z, alpha: float) -> float:
    R = Xbar.T - B @ Z.T
    return float((R * R).sum() + alpha * (Z * Z).sum())


def concat_views(zs) -> np.ndarray:
    """Stack per-view ``Z`` blocks side by side, view order preserved."""
    zs = [np.asarray(Z, dtype=np.float64) for Z in zs]
    if not zs:
        raise ValueError("no views to concatenate")
    shape = zs[0].shape
    for i, Z in enumerate(zs):
        if Z.ndim != 2 or Z.shape != shape:
            raise ValueError(f"view {i} has shape {Z.shape}, expected {shape}")
    return np.hstack(zs)


def normalize_columns(Zbar) -> np.ndarray:
    norms = np.linalg.norm(Zbar, axis=0)
    norms[norms == 0] = 1.0
    return Zbar / norms
