"""Sampling of factor vectors from box-constrained affine solution sets.

All pipeline sets constrain their factors by linear equalities
``M @ alpha = b`` with ``alpha in [-1, 1]^p``.  Samples are drawn by
projecting uniform box samples onto the affine solution space, mixed with
linear-program vertices along random objectives so the hull of the returned
samples reaches the extreme points of the feasible polytope.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .numeric import svd_pinv


class InfeasibleSetError(RuntimeError):
    """No feasible factor assignment was found within the iteration budget."""


class GeneratorLimitError(RuntimeError):
    """A reachable set exceeded the configured generator-count ceiling."""


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _lp_vertex(M, b, direction):
    res = linprog(direction, A_eq=M if M.size else None,
                  b_eq=b if M.size else None,
                  bounds=[(-1.0, 1.0)] * len(direction), method="highs")
    if res.status == 2:
        return None
    if not res.success:
        return None
    return np.clip(res.x, -1.0, 1.0)


def sample_box_affine(M: np.ndarray, b: np.ndarray, n: int, seed=None, *,
                      lp_fraction: float = 0.3, max_rounds: int = 60,
                      residual_tol: float = 1e-8) -> np.ndarray:
    """Draw ``n`` vectors ``alpha in [-1,1]^p`` with ``M @ alpha = b``.

    Every returned vector satisfies the equalities with infinity-norm
    residual at most ``residual_tol``.  Raises :class:`InfeasibleSetError`
    when the system is inconsistent or the polytope is empty.
    """
    rng = _rng(seed)
    M = np.asarray(M, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    p = M.shape[1]
    if n < 0:
        raise ValueError("sample count must be nonnegative")
    if p == 0:
        if b.size and np.max(np.abs(b)) > residual_tol:
            raise InfeasibleSetError("constraints are inconsistent (no factors)")
        return np.zeros((n, 0))
    if n == 0:
        return np.zeros((0, p))

    unconstrained = M.shape[0] == 0 or b.size == 0
    if unconstrained:
        n_corner = int(round(lp_fraction * n))
        uni = rng.uniform(-1.0, 1.0, size=(n - n_corner, p))
        corners = rng.choice([-1.0, 1.0], size=(n_corner, p))
        return np.vstack([uni, corners])

    pinv = svd_pinv(M)
    particular = pinv @ b
    if np.max(np.abs(M @ particular - b)) > max(residual_tol, 1e-10):
        raise InfeasibleSetError("equality constraints are inconsistent")

    accepted = []
    n_lp = min(n, max(8, int(round(lp_fraction * n))))
    for _ in range(n_lp):
        v = _lp_vertex(M, b, rng.standard_normal(p))
        if v is None:
            raise InfeasibleSetError("constraint polytope is empty")
        if np.max(np.abs(M @ v - b)) <= residual_tol:
            accepted.append(v)

    # Projections of uniform box samples onto the affine solution space.
    n_uniform = n - len(accepted)
    rounds = 0
    while len(accepted) < n and rounds < max_rounds:
        rounds += 1
        draw = rng.uniform(-1.0, 1.0, size=(max(n_uniform, 16), p))
        cand = draw - (M @ draw.T - b[:, None]).T @ pinv.T
        inside = np.max(np.abs(cand), axis=1) <= 1.0 + 1e-12
        cand = np.clip(cand[inside], -1.0, 1.0)
        if cand.size:
            ok = np.max(np.abs(M @ cand.T - b[:, None]), axis=0) <= residual_tol
            accepted.extend(cand[ok])

    if not accepted:
        raise InfeasibleSetError("no feasible factor assignment found within budget")

    # Fill any shortfall with convex combinations of accepted samples;
    # those stay feasible and inside the box.
    while len(accepted) < n:
        i, j = rng.integers(0, len(accepted), size=2)
        t = rng.uniform()
        accepted.append(t * accepted[i] + (1.0 - t) * accepted[j])
    return np.asarray(accepted[:n])


def sample_box_rejection(residual_fn, p: int, n: int, seed=None, *,
                         residual_tol: float = 1e-8,
                         max_draws: int = 200_000) -> np.ndarray:
    """Plain rejection sampling fallback for non-linear factor constraints."""
    rng = _rng(seed)
    kept = []
    draws = 0
    while len(kept) < n and draws < max_draws:
        block = rng.uniform(-1.0, 1.0, size=(256, p))
        draws += block.shape[0]
        for alpha in block:
            if residual_fn(alpha) <= residual_tol:
                kept.append(alpha)
                if len(kept) == n:
                    break
    if len(kept) < n:
        raise InfeasibleSetError(
            "rejection sampling found too few feasible assignments")
    return np.asarray(kept, dtype=float).reshape(len(kept), p)
