"""Shared helpers for building randomized sets in tests."""

import numpy as np

from ncreach import (ConstrainedMatZonotope, ConstrainedPolyMatZonotope,
                     ConstrainedPolyZonotope, FactorContext)
from ncreach.numeric import eval_monomials


def random_cpz(rng, ctx, dim=3, n_gens=4, n_factors=3, n_terms=2, n_rows=2,
               ids=None, max_degree=2, feasible_at=None):
    """Random CPZ; constraints are built feasible at ``feasible_at`` when given."""
    if ids is None:
        ids = ctx.allocate(n_factors)
    else:
        ids = np.asarray(ids, dtype=np.int64)
        n_factors = ids.size
    E = rng.integers(0, max_degree + 1, size=(n_factors, n_gens))
    if n_terms:
        R = rng.integers(0, max_degree + 1, size=(n_factors, n_terms))
        A = rng.normal(size=(n_rows, n_terms))
        if feasible_at is None:
            feasible_at = rng.uniform(-1, 1, n_factors)
        b = A @ eval_monomials(R, feasible_at)
    else:
        R = np.zeros((n_factors, 0), dtype=np.int64)
        A = np.zeros((0, 0))
        b = np.zeros(0)
    return ConstrainedPolyZonotope(rng.normal(size=dim),
                                   rng.normal(size=(dim, n_gens)),
                                   E, A, b, R, ids)


def random_cpmz(rng, ctx, rows=2, cols=3, n_gens=3, n_factors=3, n_terms=2,
                nc=2, na=2, ids=None, max_degree=2, feasible_at=None):
    """Random CPMZ; constraints are built feasible at ``feasible_at`` when given."""
    if ids is None:
        ids = ctx.allocate(n_factors)
    else:
        ids = np.asarray(ids, dtype=np.int64)
        n_factors = ids.size
    E = rng.integers(0, max_degree + 1, size=(n_factors, n_gens))
    if n_terms:
        R = rng.integers(0, max_degree + 1, size=(n_factors, n_terms))
        A = rng.normal(size=(n_terms, nc, na))
        if feasible_at is None:
            feasible_at = rng.uniform(-1, 1, n_factors)
        B = np.tensordot(eval_monomials(R, feasible_at), A, axes=(0, 0))
    else:
        R = np.zeros((n_factors, 0), dtype=np.int64)
        A = np.zeros((0, 0, 0))
        B = np.zeros((0, 0))
    return ConstrainedPolyMatZonotope(rng.normal(size=(rows, cols)),
                                      rng.normal(size=(n_gens, rows, cols)),
                                      E, A, B, R, ids)


def random_cmz(rng, ctx, rows=2, cols=2, n_gens=3, nc=0, na=0, center=None,
               witness=None):
    """Random CMZ; when ``witness`` is given the constraints hold at it."""
    C = rng.normal(size=(rows, cols)) if center is None else np.asarray(center)
    G = rng.normal(size=(n_gens, rows, cols))
    if nc:
        A = rng.normal(size=(n_gens, nc, na))
        if witness is None:
            witness = rng.uniform(-1, 1, n_gens)
        B = np.tensordot(witness, A, axes=(0, 0))
    else:
        A, B = None, None
    return ConstrainedMatZonotope(C, G, A, B, ctx.allocate(n_gens))


def overlapping_cmz_pair(rng, ctx, rows=2, cols=2, with_constraints=False):
    """Two CMZs guaranteed to share at least one member matrix."""
    shared = rng.normal(size=(rows, cols))
    pair = []
    for _ in range(2):
        g = int(rng.integers(1, 4))
        alpha = rng.uniform(-0.9, 0.9, g)
        G = rng.normal(size=(g, rows, cols))
        C = shared - np.tensordot(alpha, G, axes=(0, 0))
        if with_constraints and rng.uniform() < 0.5:
            nc, na = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            A = rng.normal(size=(g, nc, na))
            B = np.tensordot(alpha, A, axes=(0, 0))
        else:
            A, B = None, None
        pair.append(ConstrainedMatZonotope(C, G, A, B, ctx.allocate(g)))
    return pair[0], pair[1], shared


def joint_assignment(rng, *sets):
    ids = set()
    for s in sets:
        ids.update(int(d) for d in s.id)
    return {d: float(rng.uniform(-1, 1)) for d in ids}


def fresh_ctx():
    return FactorContext()
