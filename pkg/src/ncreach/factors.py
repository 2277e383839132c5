"""Dependent-factor identifiers.

Every set in this library is parameterized by scalar factors alpha in
[-1, 1].  Two sets that share a factor id depend on the *same* alpha, and
the exact operations preserve that dependency.  Ids therefore have to be
unique within one analysis run; a :class:`FactorContext` hands them out.
"""

from __future__ import annotations

import threading
from typing import Mapping

import numpy as np

FactorAssignment = Mapping[int, float]


class FactorContext:
    """Monotonic allocator of factor ids (1, 2, 3, ...).

    Allocation is the only mutating operation in the library; it is guarded
    by a lock so contexts can be shared between threads.  Use one context
    per reachability run.
    """

    def __init__(self, start: int = 1):
        if start < 1:
            raise ValueError("factor ids start at 1")
        self._next = int(start)
        self._lock = threading.Lock()

    @property
    def next_id(self) -> int:
        return self._next

    def allocate(self, k: int) -> np.ndarray:
        """Return ``k`` fresh consecutive ids and advance the counter."""
        if k < 0:
            raise ValueError("cannot allocate a negative number of ids")
        with self._lock:
            ids = np.arange(self._next, self._next + k, dtype=np.int64)
            self._next += int(k)
        return ids

    def __repr__(self):
        return f"FactorContext(next={self._next})"


def allocate_ids(ctx: FactorContext, k: int) -> np.ndarray:
    """Allocate ``k`` fresh factor ids from ``ctx``."""
    return ctx.allocate(k)


def merge_id_lists(id1, id2):
    """Common id list for two sets plus the row map of the second one.

    The merged list is ``[id1, id2 minus id1]`` with the extra entries in
    their original order.  ``rows2[i]`` gives the row of the second set's
    exponent matrices that belongs at merged row ``i``, or -1 when the
    second set does not use that factor.
    """
    id1 = np.asarray(id1, dtype=np.int64).ravel()
    id2 = np.asarray(id2, dtype=np.int64).ravel()
    known = set(id1.tolist())
    extra = [v for v in id2.tolist() if v not in known]
    merged = np.concatenate([id1, np.asarray(extra, dtype=np.int64)])
    pos2 = {v: j for j, v in enumerate(id2.tolist())}
    rows2 = np.array([pos2.get(v, -1) for v in merged.tolist()], dtype=np.int64)
    return merged, rows2


def embed_rows(M: np.ndarray, rows: np.ndarray, width: int) -> np.ndarray:
    """Lift ``M`` to ``len(rows)`` rows: row i is ``M[rows[i]]`` or zeros."""
    out = np.zeros((len(rows), width), dtype=M.dtype)
    for i, j in enumerate(rows):
        if j >= 0:
            out[i] = M[j]
    return out


def assignment_vector(ids, assignment: FactorAssignment, check_box: bool = True) -> np.ndarray:
    """Look up factor values for ``ids``; raises KeyError on a missing id."""
    ids = np.asarray(ids, dtype=np.int64).ravel()
    vals = np.empty(ids.size, dtype=float)
    for i, d in enumerate(ids.tolist()):
        try:
            vals[i] = assignment[d]
        except KeyError:
            raise KeyError(f"assignment is missing factor id {d}") from None
    if check_box and vals.size and np.max(np.abs(vals)) > 1.0 + 1e-9:
        raise ValueError("factor values must lie in [-1, 1]")
    return vals
