"""Matrix-valued set representations: MZ, CMZ, CPMZ.

Constrained matrix zonotopes describe sets of system matrices consistent
with data; their exact intersection (in vectorized ``n_a = 1`` form) drives
the online model refinement.  Generator and constraint blocks are stored as
stacked 3-D arrays, one block per factor, so the block bookkeeping of the
intersection and of the exact multiplication stays readable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.optimize import lsq_linear

from .factors import FactorAssignment, FactorContext, assignment_vector
from .numeric import eval_monomials
from .sampling import sample_box_affine


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, order="C", copy=True)
    a.flags.writeable = False
    return a


def _as_blocks(blocks, count: int | None, shape, name: str) -> np.ndarray:
    """Normalize a list of equally shaped matrices (or a 3-D array) to 3-D."""
    if blocks is None:
        blocks = np.zeros((0 if count is None else count, 0, 0))
    elif isinstance(blocks, (list, tuple)):
        blocks = np.stack([np.asarray(b, dtype=float) for b in blocks]) \
            if len(blocks) else np.zeros((0,) + tuple(shape or (0, 0)))
    else:
        blocks = np.asarray(blocks, dtype=float)
    if blocks.ndim != 3:
        raise ValueError(f"{name} must be a list of matrices")
    if count is not None and blocks.shape[0] != count:
        raise ValueError(f"{name} must have {count} blocks, got {blocks.shape[0]}")
    if shape is not None and blocks.shape[0] and blocks.shape[1:] != tuple(shape):
        raise ValueError(f"{name} blocks must be {shape}, got {blocks.shape[1:]}")
    return blocks


def vectorize(M: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization ``vec(M)``."""
    return np.asarray(M, dtype=float).ravel(order="F")


def convert(v: np.ndarray, n_c: int) -> np.ndarray:
    """Reshape a vectorized constraint column back to an ``n_c x (m/n_c)``
    matrix; inverse of :func:`vectorize` for divisible lengths."""
    v = np.asarray(v, dtype=float).ravel()
    if n_c <= 0 or v.size % n_c != 0:
        raise ValueError(
            f"cannot reshape length-{v.size} vector to {n_c} rows; "
            "keep the vectorized (n_a = 1) form")
    return v.reshape(n_c, v.size // n_c, order="F")


@dataclass(frozen=True)
class MatrixZonotope:
    """Matrix set ``{ C + sum_k alpha_k G[k] : alpha in [-1,1]^g }``."""

    C: np.ndarray
    G: np.ndarray  # (g, m, n)

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.ndim != 2:
            raise ValueError("C must be a matrix")
        G = _as_blocks(self.G, None, C.shape, "G")
        object.__setattr__(self, "C", _freeze(C))
        object.__setattr__(self, "G", _freeze(G))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.C.shape

    @property
    def n_generators(self) -> int:
        return self.G.shape[0]

    def point(self, alpha: np.ndarray) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=float)
        if alpha.size != self.n_generators:
            raise ValueError("coefficient vector has wrong length")
        return self.C + np.tensordot(alpha, self.G, axes=(0, 0)) \
            if alpha.size else self.C.copy()


@dataclass(frozen=True)
class ConstrainedMatZonotope:
    """Constrained matrix zonotope ``<C, G, A, B, id>``.

    Factor k contributes generator block ``G[k]`` and constraint block
    ``A[k]``; the constraint reads ``sum_k alpha_k A[k] = B``.  ``B`` with
    zero rows means unconstrained (plain matrix zonotope).
    """

    C: np.ndarray
    G: np.ndarray          # (g, m, n)
    A: np.ndarray          # (g, n_c, n_a)
    B: np.ndarray          # (n_c, n_a)
    id: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.ndim != 2:
            raise ValueError("C must be a matrix")
        G = _as_blocks(self.G, None, C.shape, "G")
        g = G.shape[0]
        B = np.zeros((0, 0)) if self.B is None else np.asarray(self.B, dtype=float)
        if B.ndim != 2:
            raise ValueError("B must be a matrix")
        A = _as_blocks(self.A, g, B.shape, "A")
        ids = np.asarray(self.id, dtype=np.int64).reshape(-1)
        if ids.size != g:
            raise ValueError("id must have one entry per generator")
        if len(set(ids.tolist())) != ids.size:
            raise ValueError("factor ids must be distinct")
        for name, val in (("C", C), ("G", G), ("A", A), ("B", B), ("id", ids)):
            object.__setattr__(self, name, _freeze(val))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.C.shape

    @property
    def n_generators(self) -> int:
        return self.G.shape[0]

    @property
    def n_constraint_rows(self) -> int:
        return self.B.shape[0]

    @property
    def n_constraint_cols(self) -> int:
        return self.B.shape[1]

    def is_unconstrained(self) -> bool:
        return self.B.size == 0


@dataclass(frozen=True)
class ConstrainedPolyMatZonotope:
    """Constrained polynomial matrix zonotope ``<C, G, E, A, B, R, id>``."""

    C: np.ndarray
    G: np.ndarray          # (g, m, n)
    E: np.ndarray          # (p, g)
    A: np.ndarray          # (q, n_c, n_a)
    B: np.ndarray          # (n_c, n_a)
    R: np.ndarray          # (p, q)
    id: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        if C.ndim != 2:
            raise ValueError("C must be a matrix")
        G = _as_blocks(self.G, None, C.shape, "G")
        B = np.zeros((0, 0)) if self.B is None else np.asarray(self.B, dtype=float)
        ids = np.asarray(self.id, dtype=np.int64).reshape(-1)
        E = np.asarray(self.E, dtype=np.int64)
        R = np.asarray(self.R, dtype=np.int64)
        A = _as_blocks(self.A, R.shape[1] if R.ndim == 2 else None, B.shape, "A")
        if E.shape != (ids.size, G.shape[0]):
            raise ValueError("E must be (p x gamma)")
        if R.shape != (ids.size, A.shape[0]):
            raise ValueError("R column count must equal the number of A blocks")
        if E.size and E.min() < 0 or R.size and R.min() < 0:
            raise ValueError("exponents must be nonnegative")
        if len(set(ids.tolist())) != ids.size:
            raise ValueError("factor ids must be distinct")
        for name, val in (("C", C), ("G", G), ("E", E), ("A", A), ("B", B),
                          ("R", R), ("id", ids)):
            object.__setattr__(self, name, _freeze(val))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.C.shape

    @property
    def n_generators(self) -> int:
        return self.G.shape[0]

    @property
    def n_factors(self) -> int:
        return self.id.size


def mz_to_cmz(M: MatrixZonotope, ctx: FactorContext) -> ConstrainedMatZonotope:
    """Attach fresh factor ids to a matrix zonotope (no constraints)."""
    g = M.n_generators
    return ConstrainedMatZonotope(M.C, M.G, np.zeros((g, 0, 0)),
                                  np.zeros((0, 0)), ctx.allocate(g))


def _vec_blocks(blocks: np.ndarray) -> np.ndarray:
    """Stack ``vec(block_k)`` as columns: (g, r, s) -> (r*s, g)."""
    g, r, s = blocks.shape
    if g == 0:
        return np.zeros((r * s, 0))
    return blocks.transpose(2, 1, 0).reshape(r * s, g)


def cmz_intersect(N1: ConstrainedMatZonotope, N2: ConstrainedMatZonotope,
                  ctx: FactorContext) -> ConstrainedMatZonotope:
    """Exact intersection of two CMZs over the same matrix space.

    The output keeps N1's center and generators (padded with zero blocks for
    N2's factors) and couples the two factor vectors through the stacked
    vectorized constraints; it is returned in vectorized ``n_a = 1`` form
    with fresh ids.
    """
    if N1.shape != N2.shape:
        raise ValueError(f"ambient shapes differ: {N1.shape} vs {N2.shape}")
    m, n = N1.shape
    g1, g2 = N1.n_generators, N2.n_generators
    r1 = N1.n_constraint_rows * N1.n_constraint_cols
    r2 = N2.n_constraint_rows * N2.n_constraint_cols
    mn = m * n

    Ahat1 = _vec_blocks(N1.A)
    Ahat2 = _vec_blocks(N2.A)
    Ghat1 = _vec_blocks(N1.G)
    Ghat2 = _vec_blocks(N2.G)

    rows = r1 + r2 + mn
    Ahat = np.zeros((rows, g1 + g2))
    Ahat[:r1, :g1] = Ahat1
    Ahat[r1:r1 + r2, g1:] = Ahat2
    Ahat[r1 + r2:, :g1] = Ghat1
    Ahat[r1 + r2:, g1:] = -Ghat2
    Bhat = np.concatenate([vectorize(N1.B), vectorize(N2.B),
                           vectorize(N2.C - N1.C)]).reshape(rows, 1)

    G = np.concatenate([N1.G, np.zeros((g2, m, n))]) if g1 + g2 else \
        np.zeros((0, m, n))
    A = Ahat.T.reshape(g1 + g2, rows, 1)
    return ConstrainedMatZonotope(N1.C, G, A, Bhat, ctx.allocate(g1 + g2))


def _membership_system(N) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stacked linear system (coefficient matrix, offset, constraint rhs)."""
    Ghat = _vec_blocks(N.G)
    if isinstance(N, ConstrainedMatZonotope) and not N.is_unconstrained():
        Ahat = _vec_blocks(N.A)
        return np.vstack([Ghat, Ahat]), vectorize(N.C), vectorize(N.B)
    return Ghat, vectorize(N.C), np.zeros(0)


@dataclass(frozen=True)
class MembershipResult:
    is_member: bool
    residual: float
    alpha: np.ndarray
    witness: dict | None

    def __bool__(self):
        return self.is_member


def cmz_membership(N, M: np.ndarray, tol: float = 1e-6) -> MembershipResult:
    """Decide ``M in N`` for a matrix zonotope or CMZ.

    Solves the box-constrained least-squares feasibility problem over the
    factor box with an active-set solver; membership holds when the stacked
    residual (generator equation and constraint equation) is at most
    ``tol``.  Non-membership is a result, not an error.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != N.shape:
        raise ValueError(f"matrix shape {M.shape} does not match set {N.shape}")
    Emat, offset, rhs = _membership_system(N)
    f = np.concatenate([vectorize(M) - offset, rhs])
    g = Emat.shape[1]
    if g == 0:
        resid = float(np.max(np.abs(f), initial=0.0))
        return MembershipResult(resid <= tol, resid, np.zeros(0), None)
    res = lsq_linear(Emat, f, bounds=(-1.0, 1.0), method="bvls",
                     tol=1e-12, max_iter=10_000)
    alpha = np.clip(res.x, -1.0, 1.0)
    resid = float(np.max(np.abs(Emat @ alpha - f)))
    member = resid <= tol
    witness = None
    if member and hasattr(N, "id"):
        witness = {int(i): float(a) for i, a in zip(N.id, alpha)}
    return MembershipResult(member, resid, alpha, witness)


def mz_evaluate(M: MatrixZonotope, coeffs: np.ndarray) -> np.ndarray:
    """Point of a matrix zonotope for explicit generator coefficients."""
    return M.point(coeffs)


def cmz_evaluate(N: ConstrainedMatZonotope, assignment: FactorAssignment
                 ) -> Tuple[np.ndarray, float]:
    """Evaluate a CMZ at a factor assignment; returns (matrix, residual)."""
    alpha = assignment_vector(N.id, assignment)
    point = N.C + (np.tensordot(alpha, N.G, axes=(0, 0)) if alpha.size else 0.0)
    if N.is_unconstrained():
        return point, 0.0
    lhs = np.tensordot(alpha, N.A, axes=(0, 0)) if alpha.size else np.zeros_like(N.B)
    return point, float(np.max(np.abs(lhs - N.B)))


def cpmz_evaluate(Y: ConstrainedPolyMatZonotope, assignment: FactorAssignment
                  ) -> Tuple[np.ndarray, float]:
    """Evaluate a CPMZ at a factor assignment; returns (matrix, residual)."""
    alpha = assignment_vector(Y.id, assignment)
    mono_e = eval_monomials(Y.E, alpha)
    point = Y.C + (np.tensordot(mono_e, Y.G, axes=(0, 0)) if mono_e.size else 0.0)
    if Y.B.size == 0:
        return point, 0.0
    mono_r = eval_monomials(Y.R, alpha)
    lhs = np.tensordot(mono_r, Y.A, axes=(0, 0)) if mono_r.size else np.zeros_like(Y.B)
    return point, float(np.max(np.abs(lhs - Y.B)))


def cmz_to_cpmz(N: ConstrainedMatZonotope) -> ConstrainedPolyMatZonotope:
    """Lift a CMZ to a CPMZ with identity exponent matrices (same set)."""
    g = N.n_generators
    eye = np.eye(g, dtype=np.int64)
    if N.is_unconstrained():
        return ConstrainedPolyMatZonotope(
            N.C, N.G, eye, np.zeros((0,) + N.B.shape), N.B,
            np.zeros((g, 0), dtype=np.int64), N.id)
    return ConstrainedPolyMatZonotope(N.C, N.G, eye, N.A, N.B, eye, N.id)


def sample_cmz(N, n: int, seed=None) -> np.ndarray:
    """Sample ``n`` member matrices (stacked along axis 0)."""
    if isinstance(N, MatrixZonotope) or N.is_unconstrained():
        M = np.zeros((0, N.n_generators))
        b = np.zeros(0)
    else:
        M = _vec_blocks(N.A)
        b = vectorize(N.B)
    alphas = sample_box_affine(M, b, n, seed)
    if N.n_generators == 0:
        return np.repeat(N.C[None, :, :], n, axis=0)
    return N.C[None, :, :] + np.tensordot(alphas, N.G, axes=(1, 0))
