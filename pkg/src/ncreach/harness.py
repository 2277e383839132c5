"""Experiment harness: LTI simulator, benchmark experiments, verification.

The benchmark plant is a five-dimensional discrete-time system driven by a
scalar input, with noise drawn from a small zonotope.  Experiment 1
propagates a non-convex initial set with and without one online model
refinement; experiment 2 starts from a convex initial set and compares the
refined pipeline against a one-shot model identified from the pooled data.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .datadriven import (AlgorithmConfig, DataBatch, NoiseModel, ReachRun,
                         run_algorithm1)
from .factors import FactorContext
from .sets import (ConstrainedPolyZonotope, Zonotope, evaluate_cpz_batch,
                   interval_enclosure, rebind_ids, sample_cpz,
                   sample_feasible_factors, zonotope_to_cpz)

VERIFY_TOL = 1e-8
EMIT_RESIDUAL_TOL = 1e-8
_EVAL_BATCH = 64


@dataclass(frozen=True)
class LtiSystem:
    """Discrete-time plant ``x+ = Phi x + Gamma u + w``."""

    Phi: np.ndarray
    Gamma: np.ndarray

    def __post_init__(self):
        Phi = np.asarray(self.Phi, dtype=float)
        Gamma = np.asarray(self.Gamma, dtype=float)
        if Gamma.ndim == 1:
            Gamma = Gamma[:, None]
        if Phi.ndim != 2 or Phi.shape[0] != Phi.shape[1]:
            raise ValueError("Phi must be square")
        if Gamma.shape[0] != Phi.shape[0] or min(Gamma.shape) < 1:
            raise ValueError("Gamma must be n_x x n_u with n_x, n_u >= 1")
        object.__setattr__(self, "Phi", Phi)
        object.__setattr__(self, "Gamma", Gamma)

    @property
    def n_x(self) -> int:
        return self.Phi.shape[0]

    @property
    def n_u(self) -> int:
        return self.Gamma.shape[1]

    def step(self, x, u, w):
        return self.Phi @ x + self.Gamma @ u + w


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce a run: plant, sets, lengths, seed."""

    system: LtiSystem
    x0: ConstrainedPolyZonotope
    input_set: Zonotope
    noise_set: Zonotope
    horizon: int = 4
    offline_length: int = 6
    online_lengths: tuple = (6,)
    seed: int = 20250811
    samples_per_set: int = 5000
    max_generators: int = 300_000
    data_x0: Optional[np.ndarray] = None

    def data_start(self) -> np.ndarray:
        return np.asarray(self.data_x0, dtype=float) if self.data_x0 is not None \
            else np.array(self.x0.c)


def paper_system() -> LtiSystem:
    phi = np.array([
        [0.9323, -0.1890, 0.0, 0.0, 0.0],
        [0.1890, 0.9323, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.8596, 0.0430, 0.0],
        [0.0, 0.0, -0.0430, 0.8596, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.9048],
    ])
    gamma = np.array([0.0436, 0.0533, 0.0475, 0.0453, 0.0476])
    return LtiSystem(phi, gamma)


def nonconvex_initial_set(ctx: FactorContext) -> ConstrainedPolyZonotope:
    """Benchmark initial set: unit center, 0.1-scaled axis generators with
    mixed-degree monomials, no constraints."""
    e0 = np.array([
        [2, 1, 0, 0, 0],
        [1, 2, 0, 0, 0],
        [0, 0, 2, 1, 0],
        [0, 0, 1, 2, 1],
        [0, 0, 0, 1, 2],
    ], dtype=np.int64)
    return ConstrainedPolyZonotope(
        np.ones(5), 0.1 * np.eye(5), e0,
        np.zeros((0, 0)), np.zeros(0), np.zeros((5, 0), dtype=np.int64),
        ctx.allocate(5))


def convex_initial_set(ctx: FactorContext) -> ConstrainedPolyZonotope:
    return zonotope_to_cpz(Zonotope(np.ones(5), 0.1 * np.eye(5)), ctx)


def benchmark_config(experiment: int, **overrides) -> ExperimentConfig:
    """Desk-scale configuration of the two benchmark experiments."""
    ctx = FactorContext()
    x0 = nonconvex_initial_set(ctx) if experiment == 1 else convex_initial_set(ctx)
    cfg = ExperimentConfig(
        system=paper_system(),
        x0=x0,
        input_set=Zonotope(np.array([10.0]), np.array([[0.25]])),
        noise_set=Zonotope(np.zeros(5), np.full((5, 1), 0.005)),
    )
    for key, val in overrides.items():
        setattr(cfg, key, val)
    return cfg


def _seed(cfg_seed: int, purpose: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg_seed, purpose]))


def simulate(sys: LtiSystem, x0, inputs, noise: NoiseModel,
             record_witness: bool = False, seed=None):
    """Forward-iterate the plant; optionally record noise factor values.

    Returns states (n_x x (N+1)) and, when recording, the per-step noise
    coefficients (gamma_w x N).
    """
    rng = seed if isinstance(seed, np.random.Generator) else \
        np.random.default_rng(seed)
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    n_steps = inputs.shape[1]
    states = np.empty((sys.n_x, n_steps + 1))
    states[:, 0] = np.asarray(x0, dtype=float)
    coeffs = np.empty((noise.Z_w.n_generators, n_steps)) if record_witness else None
    for t in range(n_steps):
        w, beta = noise.sample(rng)
        if record_witness:
            coeffs[:, t] = beta
        states[:, t + 1] = sys.step(states[:, t], inputs[:, t], w)
    return states, coeffs


def generate_data(cfg: ExperimentConfig, total_steps: int,
                  rng: np.random.Generator) -> DataBatch:
    """One recorded data trajectory with inputs drawn from the input set."""
    u_alpha = rng.uniform(-1.0, 1.0,
                          size=(cfg.input_set.n_generators, total_steps))
    inputs = cfg.input_set.c[:, None] + cfg.input_set.G @ u_alpha
    states, coeffs = simulate(cfg.system, cfg.data_start(), inputs,
                              NoiseModel(cfg.noise_set),
                              record_witness=True, seed=rng)
    return DataBatch.from_trajectory(states, inputs, coeffs)


def _slice_batch(batch: DataBatch, start: int, stop: int) -> DataBatch:
    coeffs = None if batch.noise_coeffs is None else \
        batch.noise_coeffs[:, start:stop]
    return DataBatch(batch.X_plus[:, start:stop], batch.X_minus[:, start:stop],
                     batch.U_minus[:, start:stop], coeffs)


def execute_run(cfg: ExperimentConfig, offline: DataBatch,
                online: Optional[dict] = None) -> ReachRun:
    """Run the reachability loop on a fresh factor-id namespace."""
    ctx = FactorContext()
    acfg = AlgorithmConfig(x0=rebind_ids(cfg.x0, ctx),
                           input_sets=cfg.input_set,
                           noise_set=cfg.noise_set, ctx=ctx,
                           max_generators=cfg.max_generators)
    return run_algorithm1(acfg, offline, online, cfg.horizon)


@dataclass
class ExperimentResult:
    cfg: ExperimentConfig
    runs: dict            # label -> ReachRun
    metadata: dict = field(default_factory=dict)


def run_experiment_1(cfg: ExperimentConfig) -> ExperimentResult:
    """Non-convex initial set: propagation without refinement (Rtilde) and
    with one online refinement at the first step (Rhat)."""
    data = generate_data(cfg, cfg.offline_length + sum(cfg.online_lengths),
                         _seed(cfg.seed, 0))
    offline = _slice_batch(data, 0, cfg.offline_length)
    segments = []
    pos = cfg.offline_length
    for length in cfg.online_lengths:
        segments.append(_slice_batch(data, pos, pos + length))
        pos += length
    run_tilde = execute_run(cfg, offline)
    run_hat = execute_run(cfg, offline,
                          {i + 1: seg for i, seg in enumerate(segments)})
    meta = {
        "experiment": 1,
        "seed": cfg.seed,
        "horizon": cfg.horizon,
        "offline_length": cfg.offline_length,
        "online_lengths": list(cfg.online_lengths),
        "refinement_steps": list(run_hat.refinement_steps),
        "generator_counts": {"Rtilde": run_tilde.metrics["generator_counts"],
                             "Rhat": run_hat.metrics["generator_counts"]},
    }
    return ExperimentResult(cfg, {"Rtilde": run_tilde, "Rhat": run_hat}, meta)


def run_experiment_2(cfg: ExperimentConfig) -> ExperimentResult:
    """Convex initial set: refined pipeline (Rhat) against the one-shot
    baseline identified from the pooled data (Rbar)."""
    if len(cfg.online_lengths) != 1 or cfg.online_lengths[0] != cfg.offline_length:
        cfg = replace(cfg, online_lengths=(cfg.offline_length,))
    total = cfg.offline_length + cfg.online_lengths[0]
    data = generate_data(cfg, total, _seed(cfg.seed, 0))
    offline = _slice_batch(data, 0, cfg.offline_length)
    fresh = _slice_batch(data, cfg.offline_length, total)
    run_hat = execute_run(cfg, offline, {1: fresh})
    run_bar = execute_run(cfg, _slice_batch(data, 0, total))
    meta = {
        "experiment": 2,
        "seed": cfg.seed,
        "horizon": cfg.horizon,
        "offline_length": cfg.offline_length,
        "online_lengths": list(cfg.online_lengths),
        "refinement_steps": list(run_hat.refinement_steps),
        "generator_counts": {"Rhat": run_hat.metrics["generator_counts"],
                             "Rbar": run_bar.metrics["generator_counts"]},
    }
    return ExperimentResult(cfg, {"Rhat": run_hat, "Rbar": run_bar}, meta)


def _witness_row_sources(run: ReachRun, k: int):
    """Map each factor id of reach set k to its witness source."""
    x0 = run.reach_sets[0]
    sources = {}
    for i, d in enumerate(x0.id.tolist()):
        sources[d] = ("x0", i)
    for m_idx, (model, _) in enumerate(run.models):
        for i, d in enumerate(model.id.tolist()):
            sources[d] = ("model", m_idx, i)
    for j in range(k):
        for i, d in enumerate(run.input_ids[j].tolist()):
            sources[d] = ("u", j, i)
        for i, d in enumerate(run.noise_ids[j].tolist()):
            sources[d] = ("w", j, i)
    return sources


@dataclass
class VerifyReport:
    trials: int
    tolerance: float
    rows: list          # one dict per step k >= 1
    passed: bool

    def to_dict(self) -> dict:
        return {"trials": self.trials, "tolerance": self.tolerance,
                "passed": self.passed, "steps": self.rows}


def verify_run(run: ReachRun, sys: LtiSystem, cfg: ExperimentConfig,
               trials: int, seed=None, tolerance: float = VERIFY_TOL
               ) -> VerifyReport:
    """Monte-Carlo exactness check of a run.

    Simulates witness-recorded trajectories from the initial set and checks
    at every step that the true state is a realized point of the reachable
    set: the witness evaluation must match the state and satisfy the set's
    constraints, both within ``tolerance``.
    """
    if trials == 0:
        return VerifyReport(0, tolerance, [], True)
    for _, witness in run.models:
        if witness is None:
            raise ValueError("run lacks recorded noise coefficients; "
                             "rebuild it from witness-recorded data")
    rng = seed if isinstance(seed, np.random.Generator) else \
        np.random.default_rng(seed if seed is not None else
                              np.random.SeedSequence([cfg.seed, 1]))
    x0_set = run.reach_sets[0]
    n_steps = len(run.reach_sets) - 1
    g_u = cfg.input_set.n_generators
    g_w = cfg.noise_set.n_generators

    a0 = sample_feasible_factors(x0_set, trials, rng).T          # (p0, trials)
    au = rng.uniform(-1.0, 1.0, size=(g_u, n_steps, trials))
    aw = rng.uniform(-1.0, 1.0, size=(g_w, n_steps, trials))

    states, _ = evaluate_cpz_batch(x0_set, a0)
    rows = []
    passed = True
    for k in range(1, n_steps + 1):
        u = cfg.input_set.c[:, None] + cfg.input_set.G @ au[:, k - 1, :]
        w = cfg.noise_set.c[:, None] + cfg.noise_set.G @ aw[:, k - 1, :]
        states = sys.Phi @ states + sys.Gamma @ u + w

        R = run.reach_sets[k]
        sources = _witness_row_sources(run, k)
        alpha = np.empty((R.n_factors, trials))
        for row, d in enumerate(R.id.tolist()):
            src = sources[d]
            if src[0] == "x0":
                alpha[row] = a0[src[1]]
            elif src[0] == "model":
                alpha[row] = run.models[src[1]][1][src[2]]
            elif src[0] == "u":
                alpha[row] = au[src[2], src[1], :]
            else:
                alpha[row] = aw[src[2], src[1], :]

        mismatch = 0.0
        residual = 0.0
        for lo in range(0, trials, _EVAL_BATCH):
            hi = min(lo + _EVAL_BATCH, trials)
            pts, res = evaluate_cpz_batch(R, alpha[:, lo:hi])
            mismatch = max(mismatch, float(np.max(np.abs(pts - states[:, lo:hi]))))
            residual = max(residual, float(np.max(res, initial=0.0)))
        ok = mismatch <= tolerance and residual <= tolerance
        passed = passed and ok
        rows.append({"k": k, "max_mismatch": mismatch,
                     "max_residual": residual, "ok": bool(ok)})
    return VerifyReport(trials, tolerance, rows, passed)


def compare_widths(sets_a: Sequence[ConstrainedPolyZonotope],
                   sets_b: Sequence[ConstrainedPolyZonotope],
                   n_samples: int = 1000, seed: int = 0,
                   first_step: int = 1) -> list:
    """Per-step, per-coordinate width table for two reach-set sequences.

    Reports interval-enclosure widths and sampled-support widths (max minus
    min over sampled points).  Margins are reported, not asserted.
    """
    if len(sets_a) != len(sets_b):
        raise ValueError("runs have different lengths")
    rows = []
    for k in range(first_step, len(sets_a)):
        widths = {}
        for tag, P in (("a", sets_a[k]), ("b", sets_b[k])):
            lo, hi = interval_enclosure(P)
            # same stream for both sides: identical sets give identical widths
            pts = sample_cpz(P, n_samples,
                             np.random.default_rng(
                                 np.random.SeedSequence([seed, k])))
            widths[tag] = (hi - lo, pts.max(axis=0) - pts.min(axis=0))
        for coord in range(sets_a[k].dim):
            rows.append({
                "k": k, "coord": coord + 1,
                "enclosure_width_a": float(widths["a"][0][coord]),
                "enclosure_width_b": float(widths["b"][0][coord]),
                "support_width_a": float(widths["a"][1][coord]),
                "support_width_b": float(widths["b"][1][coord]),
            })
    return rows


def projection_rows(labeled_sets, panels, density: int, seed: int) -> list:
    """Sample each labeled set once and project onto the requested panels.

    Every emitted point is checked against the set's constraints (residual
    at most 1e-8) before it is written; coordinates are 1-based.
    """
    rows = []
    for label, k, P in labeled_sets:
        for i, j in panels:
            if not (1 <= i < j <= P.dim):
                raise ValueError(f"panel ({i},{j}) out of range for dim {P.dim}")
        label_key = zlib.crc32(label.encode("utf-8"))
        alphas = sample_feasible_factors(
            P, density, np.random.default_rng(
                np.random.SeedSequence([seed, label_key, k])))
        pts, res = evaluate_cpz_batch(P, alphas.T)
        if res.size and float(np.max(res)) > EMIT_RESIDUAL_TOL:
            raise AssertionError("sampled point violates set constraints")
        for i, j in panels:
            for col in range(pts.shape[1]):
                rows.append((label, k, i, j, pts[i - 1, col], pts[j - 1, col]))
    return rows


def result_projection_rows(result: ExperimentResult, panels,
                           density: int | None = None,
                           seed: int | None = None) -> list:
    """Projection rows for an experiment: the initial set under label
    ``X0`` plus every run's propagated sets under its label."""
    cfg = result.cfg
    density = cfg.samples_per_set if density is None else density
    seed = cfg.seed if seed is None else seed
    first = next(iter(result.runs.values()))
    labeled = [("X0", 0, first.reach_sets[0])]
    for label, run in result.runs.items():
        for k in range(1, len(run.reach_sets)):
            labeled.append((label, k, run.reach_sets[k]))
    return projection_rows(labeled, panels, density, seed)


DEFAULT_PANELS = ((1, 2), (3, 4), (4, 5))
