"""Vector-valued set representations and their exact arithmetic.

A constrained polynomial zonotope (CPZ) is the point set

    { c + sum_i ( prod_k alpha_k^E[k,i] ) G[:,i]  :
      sum_i ( prod_k alpha_k^R[k,i] ) A[:,i] = b,  alpha_k in [-1,1] }

where each factor alpha_k carries an integer id so that sets sharing an id
depend on the same alpha.  Zonotopes and constrained zonotopes are the
degree-1 special cases.  All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .factors import (FactorAssignment, FactorContext, assignment_vector,
                      embed_rows, merge_id_lists)
from .numeric import eval_monomials, eval_monomials_batch
from .sampling import sample_box_affine, sample_box_rejection


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, order="C", copy=True)
    a.flags.writeable = False
    return a


def _as_float_vector(v, name: str) -> np.ndarray:
    return np.asarray(v, dtype=float).reshape(-1)


def _as_float_matrix(m, rows: int | None, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={m.ndim}")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"{name} must have {rows} rows, got {m.shape[0]}")
    return m


def _as_exponent_matrix(m, name: str) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix")
    if m.size and (not np.issubdtype(m.dtype, np.integer) and not np.all(m == np.round(m))):
        raise ValueError(f"{name} must contain integers")
    m = m.astype(np.int64)
    if m.size and m.min() < 0:
        raise ValueError(f"{name} must be nonnegative")
    return m


@dataclass(frozen=True)
class Zonotope:
    """Affine image of the unit box: ``{ c + G @ alpha : alpha in [-1,1]^g }``."""

    c: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        c = _as_float_vector(self.c, "c")
        G = _as_float_matrix(self.G, c.size, "G")
        object.__setattr__(self, "c", _freeze(c))
        object.__setattr__(self, "G", _freeze(G))

    @property
    def dim(self) -> int:
        return self.c.size

    @property
    def n_generators(self) -> int:
        return self.G.shape[1]

    def point(self, alpha: np.ndarray) -> np.ndarray:
        return self.c + self.G @ np.asarray(alpha, dtype=float)

    def contains_origin(self, tol: float = 1e-9) -> bool:
        """Feasibility of ``c + G alpha = 0`` over the factor box."""
        from scipy.optimize import lsq_linear
        if self.n_generators == 0:
            return bool(np.max(np.abs(self.c), initial=0.0) <= tol)
        res = lsq_linear(self.G, -self.c, bounds=(-1.0, 1.0), method="bvls")
        return bool(np.max(np.abs(self.G @ res.x + self.c)) <= tol)


@dataclass(frozen=True)
class ConstrainedZonotope:
    """Zonotope whose factors satisfy the linear equality ``A @ alpha = b``."""

    c: np.ndarray
    G: np.ndarray
    A: np.ndarray
    b: np.ndarray
    id: np.ndarray

    def __post_init__(self):
        c = _as_float_vector(self.c, "c")
        G = _as_float_matrix(self.G, c.size, "G")
        b = _as_float_vector(self.b, "b")
        A = _as_float_matrix(self.A, b.size, "A") if np.asarray(self.A).size else \
            np.zeros((0, G.shape[1]))
        ids = np.asarray(self.id, dtype=np.int64).reshape(-1)
        if A.shape[0] and A.shape[1] != G.shape[1]:
            raise ValueError("A must have one column per generator")
        if ids.size != G.shape[1]:
            raise ValueError("id must have one entry per generator")
        if len(set(ids.tolist())) != ids.size:
            raise ValueError("factor ids must be distinct")
        for name, val in (("c", c), ("G", G), ("A", A), ("b", b), ("id", ids)):
            object.__setattr__(self, name, _freeze(val))

    @property
    def dim(self) -> int:
        return self.c.size

    def to_cpz(self) -> "ConstrainedPolyZonotope":
        h = self.G.shape[1]
        eye = np.eye(h, dtype=np.int64)
        if self.b.size:
            return ConstrainedPolyZonotope(self.c, self.G, eye, self.A, self.b, eye, self.id)
        return ConstrainedPolyZonotope(self.c, self.G, eye,
                                       np.zeros((0, 0)), np.zeros(0),
                                       np.zeros((h, 0), dtype=np.int64), self.id)


@dataclass(frozen=True)
class ConstrainedPolyZonotope:
    """Constrained polynomial zonotope ``<c, G, E, A, b, R, id>``.

    Shapes: ``c (n,)``, ``G (n,h)``, ``E (p,h)``, ``A (n_c,q)``, ``b (n_c,)``,
    ``R (p,q)``, ``id (p,)``.  ``n_c == 0`` (and then ``q == 0``) means the
    set is unconstrained.
    """

    c: np.ndarray
    G: np.ndarray
    E: np.ndarray
    A: np.ndarray
    b: np.ndarray
    R: np.ndarray
    id: np.ndarray

    def __post_init__(self):
        c = _as_float_vector(self.c, "c")
        G = _as_float_matrix(self.G, c.size, "G")
        E = _as_exponent_matrix(self.E, "E")
        b = _as_float_vector(self.b, "b")
        ids = np.asarray(self.id, dtype=np.int64).reshape(-1)
        R = _as_exponent_matrix(self.R, "R")
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(b.size, R.shape[1] if R.size else 0)
        if A.ndim != 2:
            raise ValueError("A must be a 2-D matrix")
        if E.shape != (ids.size, G.shape[1]):
            raise ValueError(
                f"E must be (p={ids.size}) x (h={G.shape[1]}), got {E.shape}")
        if R.shape != (ids.size, A.shape[1]):
            raise ValueError(
                f"R must be (p={ids.size}) x (q={A.shape[1]}), got {R.shape}")
        if A.shape[0] != b.size:
            raise ValueError("A and b must have matching row counts")
        if (A.shape[1] == 0) != (b.size == 0):
            raise ValueError("A empty iff b empty iff R has zero columns")
        if len(set(ids.tolist())) != ids.size:
            raise ValueError("factor ids must be distinct")
        for name, val in (("c", c), ("G", G), ("E", E), ("A", A), ("b", b),
                          ("R", R), ("id", ids)):
            object.__setattr__(self, name, _freeze(val))

    @property
    def dim(self) -> int:
        return self.c.size

    @property
    def n_generators(self) -> int:
        return self.G.shape[1]

    @property
    def n_factors(self) -> int:
        return self.id.size

    @property
    def n_constraints(self) -> int:
        return self.b.size

    @property
    def n_constraint_terms(self) -> int:
        return self.A.shape[1]

    def is_unconstrained(self) -> bool:
        return self.b.size == 0

    @staticmethod
    def point(c) -> "ConstrainedPolyZonotope":
        """The singleton set ``{c}``."""
        c = np.asarray(c, dtype=float).reshape(-1)
        return ConstrainedPolyZonotope(
            c, np.zeros((c.size, 0)), np.zeros((0, 0), dtype=np.int64),
            np.zeros((0, 0)), np.zeros(0), np.zeros((0, 0), dtype=np.int64),
            np.zeros(0, dtype=np.int64))


def merge_id(P1: ConstrainedPolyZonotope, P2: ConstrainedPolyZonotope
             ) -> Tuple[ConstrainedPolyZonotope, ConstrainedPolyZonotope]:
    """Rewrite two CPZs over a common id list without changing the sets.

    The merged list is ``[id1, id2 minus id1]``; exponent and
    constraint-exponent matrices are zero-padded (first set) or row-mapped
    (second set) to the merged factor ordering.
    """
    merged, rows2 = merge_id_lists(P1.id, P2.id)
    extra = merged.size - P1.id.size
    E1 = np.vstack([P1.E, np.zeros((extra, P1.E.shape[1]), dtype=np.int64)])
    R1 = np.vstack([P1.R, np.zeros((extra, P1.R.shape[1]), dtype=np.int64)])
    E2 = embed_rows(P2.E, rows2, P2.E.shape[1])
    R2 = embed_rows(P2.R, rows2, P2.R.shape[1])
    Q1 = ConstrainedPolyZonotope(P1.c, P1.G, E1, P1.A, P1.b, R1, merged)
    Q2 = ConstrainedPolyZonotope(P2.c, P2.G, E2, P2.A, P2.b, R2, merged)
    return Q1, Q2


def _blkdiag(A1: np.ndarray, A2: np.ndarray) -> np.ndarray:
    out = np.zeros((A1.shape[0] + A2.shape[0], A1.shape[1] + A2.shape[1]))
    out[:A1.shape[0], :A1.shape[1]] = A1
    out[A1.shape[0]:, A1.shape[1]:] = A2
    return out


def exact_add(P1: ConstrainedPolyZonotope, P2: ConstrainedPolyZonotope
              ) -> ConstrainedPolyZonotope:
    """Dependency-preserving sum: ``(P1 ⊞ P2)(alpha) = P1(alpha) + P2(alpha)``.

    Reduces to the Minkowski sum when the factor ids are disjoint.
    """
    if P1.dim != P2.dim:
        raise ValueError(f"ambient dimensions differ: {P1.dim} vs {P2.dim}")
    Q1, Q2 = merge_id(P1, P2)
    return ConstrainedPolyZonotope(
        Q1.c + Q2.c,
        np.hstack([Q1.G, Q2.G]),
        np.hstack([Q1.E, Q2.E]),
        _blkdiag(Q1.A, Q2.A),
        np.concatenate([Q1.b, Q2.b]),
        np.hstack([Q1.R, Q2.R]),
        Q1.id)


def evaluate_cpz(P: ConstrainedPolyZonotope, assignment: FactorAssignment
                 ) -> Tuple[np.ndarray, float]:
    """Evaluate a CPZ at a factor assignment.

    Returns the point ``c + G @ monomials(E)`` and the constraint residual
    ``max-norm(A @ monomials(R) - b)`` (0 when unconstrained).
    """
    alpha = assignment_vector(P.id, assignment)
    point = P.c + P.G @ eval_monomials(P.E, alpha)
    if P.b.size == 0:
        return point, 0.0
    resid = P.A @ eval_monomials(P.R, alpha) - P.b
    return point, float(np.max(np.abs(resid)))


def evaluate_cpz_batch(P: ConstrainedPolyZonotope, alphas: np.ndarray
                       ) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate at many assignments at once.

    ``alphas`` is (p x B), columns aligned with ``P.id``.  Returns points
    (n x B) and residuals (B,).
    """
    alphas = np.asarray(alphas, dtype=float)
    points = P.c[:, None] + P.G @ eval_monomials_batch(P.E, alphas)
    if P.b.size == 0:
        return points, np.zeros(alphas.shape[1])
    resid = P.A @ eval_monomials_batch(P.R, alphas) - P.b[:, None]
    return points, np.max(np.abs(resid), axis=0) if resid.size else np.zeros(alphas.shape[1])


def zonotope_to_cpz(Z: Zonotope, ctx: FactorContext) -> ConstrainedPolyZonotope:
    """Lift a zonotope to an unconstrained CPZ over fresh degree-1 factors."""
    g = Z.n_generators
    return ConstrainedPolyZonotope(
        Z.c, Z.G, np.eye(g, dtype=np.int64),
        np.zeros((0, 0)), np.zeros(0), np.zeros((g, 0), dtype=np.int64),
        ctx.allocate(g))


def cartesian_product(P: ConstrainedPolyZonotope, Z: Zonotope,
                      ctx: FactorContext) -> ConstrainedPolyZonotope:
    """Stack a CPZ with a zonotope: ``{ (x, z) : x in P, z in Z }``.

    Z's factors receive fresh ids with degree-1 exponents; P's constraints
    are carried unchanged.
    """
    n, h = P.dim, P.n_generators
    m, g = Z.dim, Z.n_generators
    c = np.concatenate([P.c, Z.c])
    G = np.zeros((n + m, h + g))
    G[:n, :h] = P.G
    G[n:, h:] = Z.G
    E = np.zeros((P.n_factors + g, h + g), dtype=np.int64)
    E[:P.n_factors, :h] = P.E
    E[P.n_factors:, h:] = np.eye(g, dtype=np.int64)
    R = np.vstack([P.R, np.zeros((g, P.R.shape[1]), dtype=np.int64)])
    ids = np.concatenate([P.id, ctx.allocate(g)])
    return ConstrainedPolyZonotope(c, G, E, P.A, P.b, R, ids)


def interval_enclosure(P: ConstrainedPolyZonotope) -> Tuple[np.ndarray, np.ndarray]:
    """Constraint-ignoring axis-aligned box ``c +- sum_i |G[:,i]|``.

    Always a superset of P since every monomial lies in [-1, 1].
    """
    radius = np.sum(np.abs(P.G), axis=1) if P.n_generators else np.zeros(P.dim)
    return P.c - radius, P.c + radius


def has_degree_one_constraints(P: ConstrainedPolyZonotope) -> bool:
    """True when every constraint monomial is a single degree-1 factor,
    i.e. every column of R is a standard basis vector."""
    R = P.R
    if R.shape[1] == 0:
        return True
    return bool(np.all(R.sum(axis=0) == 1) and np.all(R.max(axis=0) == 1))


def degree_one_constraint_system(P: ConstrainedPolyZonotope
                                 ) -> Tuple[np.ndarray, np.ndarray]:
    """Linear system ``M @ alpha = b`` equivalent to P's constraints.

    Only valid when :func:`has_degree_one_constraints` holds; columns of R
    referencing the same factor accumulate.
    """
    if not has_degree_one_constraints(P):
        raise ValueError("constraints are not degree-1 in the factors")
    M = np.zeros((P.n_constraints, P.n_factors))
    if P.R.shape[1]:
        rows = np.argmax(P.R, axis=0)
        for i, k in enumerate(rows):
            M[:, k] += P.A[:, i]
    return M, P.b.copy()


def sample_feasible_factors(P: ConstrainedPolyZonotope, n: int, seed=None,
                            residual_tol: float = 1e-8) -> np.ndarray:
    """Draw ``n`` factor vectors (n x p) feasible for P's constraints.

    Degree-1 constraints are sampled exactly through the affine sampler;
    anything else falls back to rejection sampling.
    """
    if P.is_unconstrained():
        return sample_box_affine(np.zeros((0, P.n_factors)), np.zeros(0), n, seed)
    if has_degree_one_constraints(P):
        M, b = degree_one_constraint_system(P)
        return sample_box_affine(M, b, n, seed, residual_tol=residual_tol)

    def residual(alpha):
        return float(np.max(np.abs(P.A @ eval_monomials(P.R, alpha) - P.b)))

    return sample_box_rejection(residual, P.n_factors, n, seed,
                                residual_tol=residual_tol)


def sample_cpz(P: ConstrainedPolyZonotope, n: int, seed=None) -> np.ndarray:
    """Sample ``n`` points of P (rows); every point satisfies the
    constraints with residual at most 1e-8."""
    alphas = sample_feasible_factors(P, n, seed)
    points, _ = evaluate_cpz_batch(P, alphas.T)
    return points.T


def compact_generators(P: ConstrainedPolyZonotope) -> ConstrainedPolyZonotope:
    """Merge duplicate exponent columns by summing their generators.

    Optional utility; the pipeline never compacts so that worked examples
    stay bit-reproducible.
    """
    if P.n_generators == 0:
        return P
    seen: dict[bytes, int] = {}
    keep: list[int] = []
    G = np.array(P.G)
    for i in range(P.E.shape[1]):
        key = P.E[:, i].tobytes()
        if key in seen:
            G[:, seen[key]] += G[:, i]
        else:
            seen[key] = len(keep)
            keep.append(i)
    return ConstrainedPolyZonotope(P.c, G[:, keep], P.E[:, keep],
                                   P.A, P.b, P.R, P.id)


def rebind_ids(P: ConstrainedPolyZonotope, ctx: FactorContext
               ) -> ConstrainedPolyZonotope:
    """Copy of P whose factors use fresh ids from ``ctx``."""
    return ConstrainedPolyZonotope(P.c, P.G, P.E, P.A, P.b, P.R,
                                   ctx.allocate(P.n_factors))
