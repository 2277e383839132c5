"""Shared numerics: monomial evaluation, SVD pseudoinverse, numerical rank."""

from __future__ import annotations

import numpy as np


def eval_monomials(E: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Evaluate ``prod_k alpha[k] ** E[k, i]`` for every column i of E.

    Zero exponents never touch the base, so 0**0 == 1 by construction.
    """
    E = np.asarray(E)
    p, h = E.shape
    out = np.ones(h)
    for k in range(p):
        ek = E[k]
        nz = ek > 0
        if nz.any():
            out[nz] *= float(alpha[k]) ** ek[nz]
    return out


def eval_monomials_batch(E: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Column-batched :func:`eval_monomials`.

    ``alphas`` has one assignment per column (p x B); the result is (h x B).
    Powers are built by cumulative multiplication and gathered per exponent,
    which is much cheaper than ``np.power`` on large exponent matrices.
    """
    E = np.asarray(E)
    alphas = np.asarray(alphas, dtype=float)
    p, h = E.shape
    bsz = alphas.shape[1]
    out = np.ones((h, bsz))
    for k in range(p):
        ek = E[k]
        nz = np.flatnonzero(ek > 0)
        if nz.size == 0:
            continue
        emax = int(ek[nz].max())
        powers = np.empty((emax + 1, bsz))
        powers[0] = 1.0
        for e in range(1, emax + 1):
            powers[e] = powers[e - 1] * alphas[k]
        out[nz] *= powers[ek[nz]]
    return out


def svd_pinv(A: np.ndarray) -> np.ndarray:
    """Moore-Penrose pseudoinverse, cutting singular values at
    ``max(shape) * eps * sigma_max``."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return np.zeros((A.shape[1], A.shape[0]))
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0:
        return np.zeros((A.shape[1], A.shape[0]))
    cutoff = max(A.shape) * np.finfo(float).eps * s[0]
    inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
    return (Vt.T * inv) @ U.T


def numerical_rank(A: np.ndarray) -> int:
    """Rank counting singular values above ``max(shape) * eps * sigma_max``."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = max(A.shape) * np.finfo(float).eps * s[0]
    return int(np.count_nonzero(s > cutoff))
