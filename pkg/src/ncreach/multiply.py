"""Exact multiplication of a matrix set with a vector set.

``exact_multiply(Y, P)`` builds a CPZ whose evaluation at any joint factor
assignment equals ``Y(alpha) @ P(alpha)``, so the product of a set of system
matrices with a (possibly non-convex) set of states is propagated without
any over-approximation.  Constraints of both operands are carried along
unchanged in stacked vectorized form.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .factors import embed_rows, merge_id_lists
from .matsets import ConstrainedPolyMatZonotope, _vec_blocks, vectorize
from .sets import ConstrainedPolyZonotope


def merge_id_mixed(Y: ConstrainedPolyMatZonotope, P: ConstrainedPolyZonotope
                   ) -> Tuple[ConstrainedPolyMatZonotope,
                              ConstrainedPolyZonotope, np.ndarray]:
    """Rewrite a CPMZ/CPZ pair over the common id list ``[id_Y, id_P \\ id_Y]``.

    Same padding semantics as the CPZ-pair merge; the represented sets are
    unchanged.
    """
    merged, rows_p = merge_id_lists(Y.id, P.id)
    extra = merged.size - Y.id.size
    EY = np.vstack([Y.E, np.zeros((extra, Y.E.shape[1]), dtype=np.int64)])
    RY = np.vstack([Y.R, np.zeros((extra, Y.R.shape[1]), dtype=np.int64)])
    EP = embed_rows(P.E, rows_p, P.E.shape[1])
    RP = embed_rows(P.R, rows_p, P.R.shape[1])
    Ybar = ConstrainedPolyMatZonotope(Y.C, Y.G, EY, Y.A, Y.B, RY, merged)
    Pbar = ConstrainedPolyZonotope(P.c, P.G, EP, P.A, P.b, RP, merged)
    return Ybar, Pbar, merged


def exact_multiply(Y: ConstrainedPolyMatZonotope, P: ConstrainedPolyZonotope
                   ) -> ConstrainedPolyZonotope:
    """Exact product set ``{ Y p : Y in Y, p in P }`` honoring shared factors.

    Generator columns come in three blocks: the matrix generators applied to
    P's center, the matrix center applied to P's generators, and all
    pairwise generator products ``G_Y[i] @ G_P[:,j]`` laid out with i outer
    and j inner (column ``h_P*(i-1) + j``).  Exponent columns follow the
    same layout; constraints are stacked with Y's blocks vectorized, so a
    joint assignment is feasible for the output iff it is feasible for both
    operands.
    """
    nx, n = Y.shape
    if n != P.dim:
        raise ValueError(
            f"inner dimensions do not agree: Y is {Y.shape}, P is {P.dim}-dimensional")
    Ybar, Pbar, merged = merge_id_mixed(Y, P)
    g = Y.n_generators
    h = P.n_generators
    a = merged.size

    c_out = Y.C @ P.c

    blocks = []
    if g:
        blocks.append(np.tensordot(Ybar.G, P.c, axes=(2, 0)).T)     # (nx, g)
    if h:
        blocks.append(Y.C @ P.G)                                    # (nx, h)
    if g and h:
        gf = np.einsum("gij,jk->igk", Ybar.G, P.G).reshape(nx, g * h)
        blocks.append(gf)
    G_out = np.hstack(blocks) if blocks else np.zeros((nx, 0))

    e_blocks = [Ybar.E, Pbar.E]
    if g and h:
        e_blocks.append((Ybar.E[:, :, None] + Pbar.E[:, None, :])
                        .reshape(a, g * h))
    E_out = np.hstack(e_blocks)

    qy = Ybar.A.shape[0]
    qp = P.A.shape[1]
    rows_y = Y.B.shape[0] * Y.B.shape[1]
    rows_p = P.b.size
    if qy or qp:
        A_out = np.zeros((rows_y + rows_p, qy + qp))
        if qy:
            A_out[:rows_y, :qy] = _vec_blocks(Ybar.A)
        if qp:
            A_out[rows_y:, qy:] = P.A
        b_out = np.concatenate([vectorize(Y.B), P.b])
        R_out = np.hstack([Ybar.R, Pbar.R])
    else:
        A_out = np.zeros((0, 0))
        b_out = np.zeros(0)
        R_out = np.zeros((a, 0), dtype=np.int64)

    return ConstrainedPolyZonotope(c_out, G_out, E_out, A_out, b_out, R_out,
                                   merged)
