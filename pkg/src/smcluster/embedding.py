"""Spectral embedding of the concatenated similarity and the final partition."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .clustering import kmeans

__all__ = ["SpectralEmbedding", "spectral_embed", "cluster_embedding", "normalize_rows"]

# singular values below this fraction of the largest are treated as zero
_RANK_TOL = 1e-12


@dataclass
class SpectralEmbedding:
    Q: np.ndarray
    sigma: np.ndarray

    @property
    def g(self) -> int:
        return self.Q.shape[1]


def _fix_signs(Q: np.ndarray) -> np.ndarray:
    # argmax returns the lowest index among equal magnitudes
    pivot = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[pivot, np.arange(Q.shape[1])])
    signs[signs == 0] = 1.0
    return Q * signs


def _complete_basis(U: np.ndarray, n: int, count: int) -> np.ndarray:
    """Append ``count`` orthonormal columns orthogonal to ``U``.

    Candidates are the standard basis vectors in index order, so the result is
    deterministic.
    """
    cols = [U[:, j] for j in range(U.shape[1])]
    added = []
    for e in range(n):
        if len(added) == count:
            break
        x = np.zeros(n)
        x[e] = 1.0
        for _ in range(2):
            for c in cols:
                x -= (c @ x) * c
        norm = np.linalg.norm(x)
        if norm > 1e-8:
            x /= norm
            cols.append(x)
            added.append(x)
    return np.column_stack([U] + added) if added else U


def spectral_embed(Zbar, g: int) -> SpectralEmbedding:
    """Top-``g`` left singular vectors of ``Zbar`` via its ``(mv x mv)`` Gram matrix.

    Right singular vectors come from ``eigh(Zbar^T Zbar)`` and are mapped back
    with ``u_j = Zbar v_j / sigma_j``. Directions with (numerically) zero
    singular value are filled with a deterministic orthonormal completion.
    Each column is signed so its largest-magnitude entry is positive.
    """
    Zbar = np.asarray(Zbar, dtype=np.float64)
    if Zbar.ndim != 2:
        raise ValueError("Zbar must be 2-d")
    n, p = Zbar.shape
    if not 1 <= g <= min(n, p):
        raise ValueError(f"need 1 <= g <= min(n, m*v) = {min(n, p)}, got g={g}")

    gram = Zbar.T @ Zbar
    evals, evecs = scipy.linalg.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    sigma_all = np.sqrt(evals)

    if g < p and sigma_all[g - 1] > 0:
        gap = (sigma_all[g - 1] - sigma_all[g]) / sigma_all[g - 1]
        if gap < 1e-10:
            warnings.warn(
                f"singular value {g} is repeated; the embedding basis is not unique",
                RuntimeWarning,
                stacklevel=2,
            )

    top = sigma_all[0]
    # squaring hides singular values under ~sqrt(eps) * sigma_1, so eigenvalues
    # at the eigensolver's noise floor also count as zero
    floor = max(n, p) * np.finfo(float).eps * evals[0]
    keep = (sigma_all[:g] > _RANK_TOL * top) & (evals[:g] > floor)
    keep &= top > 0
    r = int(keep.sum())
    U = Zbar @ evecs[:, :r] / sigma_all[:r]
    # one QR pass restores exact orthonormality lost to squaring the condition number
    if r:
        U, R = np.linalg.qr(U)
        U = U * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))
    if r < g:
        warnings.warn(
            f"Zbar has numerical rank {r} < g={g}; completing the embedding basis",
            RuntimeWarning,
            stacklevel=2,
        )
        U = _complete_basis(U, n, g - r)
    sigma = np.where(np.arange(g) < r, sigma_all[:g], 0.0)
    return SpectralEmbedding(Q=_fix_signs(U), sigma=sigma)


def normalize_rows(Q) -> np.ndarray:
    norms = np.linalg.norm(Q, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return Q / norms


def cluster_embedding(
    emb: SpectralEmbedding, g: int, seed: int = 0, restarts: int = 10, normalize: bool = False
) -> np.ndarray:
    """K-means on the rows of ``Q``; returns the label vector."""
    Q = emb.Q if isinstance(emb, SpectralEmbedding) else np.asarray(emb)
    if normalize:
        Q = normalize_rows(Q)
    return kmeans(Q, g, seed=seed, restarts=restarts).assignments
