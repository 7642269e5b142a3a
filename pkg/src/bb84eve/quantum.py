"""Entropies, Gram-matrix feasibility and explicit realization of probe states.

All information quantities are in bits. Probe inner products of symmetric
attacks are real, so Gram matrices are real symmetric arrays and realized
states have real coordinates.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, InfeasibleError

PSD_TOL = 1e-9
_NULL_EIG = 1e-14


def binary_entropy(p: float) -> float:
    """Binary Shannon entropy in bits, with 0 log 0 = 0.

    >>> binary_entropy(0.5)
    1.0
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability out of range: {p!r}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def shannon_entropy(dist, tol: float = 1e-9) -> float:
    """Entropy in bits of a discrete distribution."""
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or np.any(p < 0.0) or abs(p.sum() - 1.0) > tol:
        raise DomainError(f"not a probability vector: {dist!r}")
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def min_eigenvalue(g) -> float:
    g = np.asarray(g, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (g + g.T))[0])


def is_psd(g, tol: float = PSD_TOL) -> bool:
    """True iff the smallest eigenvalue of the symmetric matrix ``g`` is >= -tol."""
    return min_eigenvalue(g) >= -tol


def realize_gram(g, tol: float = PSD_TOL) -> np.ndarray:
    """Construct real vectors whose pairwise inner products reproduce ``g``.

    Returns an array of shape ``(count, rank)``; row ``i`` is the i-th vector.
    The factorization is eigendecomposition based; eigenvalues in ``[-tol, 0]``
    are clipped to zero and numerically null directions are dropped, so the
    dimension equals the numerical rank.
    Column signs are fixed so the output is deterministic.

    Raises:
        InfeasibleError: if ``g`` has an eigenvalue below ``-tol``.
    """
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DomainError(f"Gram matrix must be square, got shape {g.shape}")
    sym = 0.5 * (g + g.T)
    w, v = np.linalg.eigh(sym)
    if w[0] < -tol:
        raise InfeasibleError(f"Gram matrix is not PSD (min eigenvalue {w[0]:.3e})")
    keep = w > _NULL_EIG * max(1.0, float(np.abs(w).max()))
    w, v = w[keep][::-1], v[:, keep][:, ::-1]
    # sign convention: largest-magnitude entry of each eigenvector is positive
    pivots = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[pivots, np.arange(v.shape[1])])
    v = v * signs
    vecs = v * np.sqrt(w)
    if vecs.shape[1] == 0:
        vecs = np.zeros((g.shape[0], 1))
    return vecs


def gram_of(vectors) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=float)
    return vectors @ vectors.T
