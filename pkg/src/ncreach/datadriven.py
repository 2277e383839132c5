"""Model-set identification from data and the reachability loop.

From input-state data with zonotope-bounded noise, the set of all system
matrices ``[Phi Gamma]`` consistent with the data is a matrix zonotope
(pseudoinverse construction).  New data segments refine that set by exact
CMZ intersection, and reachable sets propagate through the exact
matrix-set / state-set multiplication, so every true state stays a
realized point of the reachable CPZ.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .factors import FactorContext
from .matsets import (ConstrainedMatZonotope, MatrixZonotope, cmz_intersect,
                      cmz_to_cpmz, mz_to_cmz)
from .multiply import exact_multiply
from .numeric import numerical_rank, svd_pinv
from .sampling import GeneratorLimitError
from .sets import (ConstrainedPolyZonotope, Zonotope, cartesian_product,
                   exact_add, has_degree_one_constraints, zonotope_to_cpz)


@dataclass(frozen=True)
class DataBatch:
    """Input-state data matrices of one trajectory segment.

    ``X_plus[:, t] = x_(t+1)``, ``X_minus[:, t] = x_(t)``,
    ``U_minus[:, t] = u_(t)``.  ``noise_coeffs`` optionally records the
    factor values of each noise sample (one column per step) so that
    membership witnesses can be constructed exactly.
    """

    X_plus: np.ndarray
    X_minus: np.ndarray
    U_minus: np.ndarray
    noise_coeffs: Optional[np.ndarray] = None

    def __post_init__(self):
        xp = np.atleast_2d(np.asarray(self.X_plus, dtype=float))
        xm = np.atleast_2d(np.asarray(self.X_minus, dtype=float))
        um = np.atleast_2d(np.asarray(self.U_minus, dtype=float))
        if not (xp.shape[1] == xm.shape[1] == um.shape[1]):
            raise ValueError("X_plus, X_minus, U_minus need equal column counts")
        if xp.shape[0] != xm.shape[0]:
            raise ValueError("X_plus and X_minus need equal row counts")
        nc = self.noise_coeffs
        if nc is not None:
            nc = np.atleast_2d(np.asarray(nc, dtype=float))
            if nc.shape[1] != xp.shape[1]:
                raise ValueError("noise_coeffs needs one column per data column")
        for name, val in (("X_plus", xp), ("X_minus", xm), ("U_minus", um),
                          ("noise_coeffs", nc)):
            object.__setattr__(self, name, val)

    @property
    def n_samples(self) -> int:
        return self.X_plus.shape[1]

    @property
    def n_x(self) -> int:
        return self.X_plus.shape[0]

    @property
    def n_u(self) -> int:
        return self.U_minus.shape[0]

    def stacked_regressor(self) -> np.ndarray:
        """The data matrix ``[X_minus; U_minus]``."""
        return np.vstack([self.X_minus, self.U_minus])

    @staticmethod
    def from_trajectory(states: np.ndarray, inputs: np.ndarray,
                        noise_coeffs: Optional[np.ndarray] = None) -> "DataBatch":
        states = np.atleast_2d(np.asarray(states, dtype=float))
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        if states.shape[1] != inputs.shape[1] + 1:
            raise ValueError("need one more state column than input columns")
        return DataBatch(states[:, 1:], states[:, :-1], inputs, noise_coeffs)

    @staticmethod
    def concat(batches: Sequence["DataBatch"]) -> "DataBatch":
        """Column-concatenate several segments (multi-trajectory data)."""
        coeffs = [b.noise_coeffs for b in batches]
        merged = np.hstack(coeffs) if all(c is not None for c in coeffs) else None
        return DataBatch(np.hstack([b.X_plus for b in batches]),
                         np.hstack([b.X_minus for b in batches]),
                         np.hstack([b.U_minus for b in batches]),
                         merged)


@dataclass(frozen=True)
class NoiseModel:
    """Zonotope noise bound; must contain the origin."""

    Z_w: Zonotope

    def __post_init__(self):
        if not self.Z_w.contains_origin():
            raise ValueError("noise zonotope must include the origin "
                             "(bounded-noise assumption)")

    def sample(self, rng: np.random.Generator):
        """Draw one noise vector together with its factor values."""
        beta = rng.uniform(-1.0, 1.0, size=self.Z_w.n_generators)
        return self.Z_w.c + self.Z_w.G @ beta, beta


def noise_mat_zonotope(Z_w: Zonotope, T: int) -> MatrixZonotope:
    """Matrix zonotope containing every horizontal stack of T noise samples.

    Generator ``(j-1)*T + t`` (1-based) places Z_w's j-th generator column
    in matrix column t and zeros elsewhere.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    n, g = Z_w.dim, Z_w.n_generators
    C = np.tile(Z_w.c[:, None], (1, T))
    G = np.zeros((g * T, n, T))
    for j in range(g):
        for t in range(T):
            G[j * T + t, :, t] = Z_w.G[:, j]
    return MatrixZonotope(C, G)


def noise_coeff_vector(noise_coeffs: np.ndarray) -> np.ndarray:
    """Flatten per-step noise factor values (g x T) to the generator
    ordering of :func:`noise_mat_zonotope`."""
    beta = np.atleast_2d(np.asarray(noise_coeffs, dtype=float))
    return beta.reshape(-1)  # row j gives generators j*T .. j*T+T-1


def model_set_from_data(D: DataBatch, Z_w: Zonotope) -> MatrixZonotope:
    """All matrices ``[Phi Gamma]`` consistent with the data batch.

    Computes ``(X_plus - M_w) @ pinv([X_minus; U_minus])``; requires the
    stacked data matrix to have full row rank.
    """
    reg = D.stacked_regressor()
    wanted = D.n_x + D.n_u
    if numerical_rank(reg) < wanted:
        raise ValueError(
            f"data matrix [X_minus; U_minus] must have full row rank "
            f"{wanted} (rank {numerical_rank(reg)}); collect more exciting data")
    pinv = svd_pinv(reg)
    Mw = noise_mat_zonotope(Z_w, D.n_samples)
    C = (D.X_plus - Mw.C) @ pinv
    G = -np.tensordot(Mw.G, pinv, axes=(2, 0)) if Mw.n_generators else \
        np.zeros((0, D.n_x, wanted))
    return MatrixZonotope(C, G)


def refine_model_set(prev: ConstrainedMatZonotope, new_mz,
                     ctx: FactorContext) -> ConstrainedMatZonotope:
    """Intersect a newly identified model set with the previous one.

    Contains the true model whenever both inputs do.
    """
    if isinstance(new_mz, MatrixZonotope):
        new_mz = mz_to_cmz(new_mz, ctx)
    return cmz_intersect(new_mz, prev, ctx)


def reach_step(model: ConstrainedMatZonotope, R_k: ConstrainedPolyZonotope,
               U_k: Zonotope, Z_w: Zonotope, ctx: FactorContext
               ) -> ConstrainedPolyZonotope:
    """One time update: ``model (x) (R_k x U_k) [+] Z_w``.

    Model factor ids are reused verbatim (the same matrix acts at every
    step); the input set and the noise set get fresh ids, allocated in that
    order.
    """
    state_input = cartesian_product(R_k, U_k, ctx)
    propagated = exact_multiply(cmz_to_cpmz(model), state_input)
    return exact_add(propagated, zonotope_to_cpz(Z_w, ctx))


@dataclass
class ReachRun:
    """State of one reachability run (inherently sequential in k)."""

    refined_model: ConstrainedMatZonotope
    reach_sets: list = field(default_factory=list)
    ctx: FactorContext = field(default_factory=FactorContext)
    metrics: dict = field(default_factory=dict)
    # Online buffers (grow column-wise until a refinement consumes them).
    buffer_x_plus: list = field(default_factory=list)
    buffer_x_minus: list = field(default_factory=list)
    buffer_u_minus: list = field(default_factory=list)
    buffer_noise_coeffs: list = field(default_factory=list)
    # Bookkeeping for witness construction and verification.
    models: list = field(default_factory=list)          # (cmz, witness or None)
    refinement_steps: list = field(default_factory=list)
    input_ids: list = field(default_factory=list)       # per step k >= 1
    noise_ids: list = field(default_factory=list)

    @property
    def model_witness(self) -> Optional[np.ndarray]:
        return self.models[-1][1] if self.models else None

    def buffered_batch(self) -> Optional[DataBatch]:
        if not self.buffer_x_plus:
            return None
        coeffs = None
        if all(c is not None for c in self.buffer_noise_coeffs):
            coeffs = np.stack(self.buffer_noise_coeffs, axis=1)
        return DataBatch(np.stack(self.buffer_x_plus, axis=1),
                         np.stack(self.buffer_x_minus, axis=1),
                         np.stack(self.buffer_u_minus, axis=1), coeffs)


@dataclass
class AlgorithmConfig:
    """Inputs of the reachability loop besides the data itself.

    ``input_sets`` may be a single zonotope (used at every step) or one per
    step.  ``ctx`` owns the factor-id namespace of the run; ``x0`` must have
    been built against the same context.
    """

    x0: ConstrainedPolyZonotope
    input_sets: Zonotope | Sequence[Zonotope]
    noise_set: Zonotope
    ctx: FactorContext
    max_generators: int = 200_000

    def input_set(self, k: int) -> Zonotope:
        if isinstance(self.input_sets, Zonotope):
            return self.input_sets
        return self.input_sets[k]


def _ingest(run: ReachRun, batch: DataBatch):
    for t in range(batch.n_samples):
        run.buffer_x_plus.append(batch.X_plus[:, t])
        run.buffer_x_minus.append(batch.X_minus[:, t])
        run.buffer_u_minus.append(batch.U_minus[:, t])
        run.buffer_noise_coeffs.append(
            None if batch.noise_coeffs is None else batch.noise_coeffs[:, t])


def run_algorithm1(cfg: AlgorithmConfig, offline: DataBatch,
                   online: Optional[Mapping[int, DataBatch]] = None,
                   horizon: int = 5) -> ReachRun:
    """Offline initialization plus the online refinement/reachability loop.

    ``online`` maps a step index k (1-based) to the data batch that becomes
    available at that step.  Each step first ingests arriving data into the
    buffers, performs a model refinement when the buffered ``[X-; U-]``
    reaches full row rank (clearing the buffers), and then always propagates
    the reachable set one step.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    ctx = cfg.ctx
    nx, nu = offline.n_x, offline.n_u

    M0 = model_set_from_data(offline, cfg.noise_set)
    model = mz_to_cmz(M0, ctx)
    witness = None
    if offline.noise_coeffs is not None:
        witness = noise_coeff_vector(offline.noise_coeffs)
    run = ReachRun(refined_model=model, reach_sets=[cfg.x0], ctx=ctx)
    run.models.append((model, witness))
    run.metrics["generator_counts"] = [cfg.x0.n_generators]
    run.metrics["step_runtimes"] = []

    online = dict(online or {})
    for k in range(1, horizon + 1):
        tic = time.perf_counter()
        if k in online:
            _ingest(run, online.pop(k))
        buffered = run.buffered_batch()
        if buffered is not None and \
                numerical_rank(buffered.stacked_regressor()) == nx + nu:
            M_new = model_set_from_data(buffered, cfg.noise_set)
            model = refine_model_set(run.refined_model, M_new, ctx)
            new_witness = None
            if buffered.noise_coeffs is not None and run.model_witness is not None:
                new_witness = np.concatenate(
                    [noise_coeff_vector(buffered.noise_coeffs), run.model_witness])
            run.refined_model = model
            run.models.append((model, new_witness))
            run.refinement_steps.append(k)
            run.buffer_x_plus.clear()
            run.buffer_x_minus.clear()
            run.buffer_u_minus.clear()
            run.buffer_noise_coeffs.clear()

        before = ctx.next_id
        u_set = cfg.input_set(k - 1)
        g = run.refined_model.n_generators
        h_pred = g + (run.reach_sets[-1].n_generators + u_set.n_generators) \
            * (1 + g) + cfg.noise_set.n_generators
        if h_pred > cfg.max_generators:
            raise GeneratorLimitError(
                f"reach set at step {k} would have {h_pred} generators "
                f"(ceiling {cfg.max_generators}); shorten the horizon or the "
                "data segments")
        R_next = reach_step(run.refined_model, run.reach_sets[-1], u_set,
                            cfg.noise_set, ctx)
        run.input_ids.append(np.arange(before, before + u_set.n_generators,
                                       dtype=np.int64))
        run.noise_ids.append(np.arange(before + u_set.n_generators,
                                       ctx.next_id, dtype=np.int64))
        if not has_degree_one_constraints(R_next):
            raise AssertionError("pipeline produced a non-degree-1 constraint")
        run.reach_sets.append(R_next)
        run.metrics["generator_counts"].append(R_next.n_generators)
        run.metrics["step_runtimes"].append(time.perf_counter() - tic)
    return run


def stream_columns(batch: DataBatch, start_step: int = 1
                   ) -> dict[int, DataBatch]:
    """Split a batch into single-column batches arriving one per step."""
    out = {}
    for t in range(batch.n_samples):
        coeffs = None if batch.noise_coeffs is None else \
            batch.noise_coeffs[:, t:t + 1]
        out[start_step + t] = DataBatch(batch.X_plus[:, t:t + 1],
                                        batch.X_minus[:, t:t + 1],
                                        batch.U_minus[:, t:t + 1], coeffs)
    return out
