"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Tolerances and runtime budgets are fixed here; nothing is calibrated at
runtime.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from ncreach import (ConstrainedPolyZonotope, FactorContext, Zonotope,
                     benchmark_config, cmz_evaluate, cmz_intersect,
                     cmz_membership, cmz_to_cpmz, compare_widths,
                     cpmz_evaluate, evaluate_cpz, exact_add, exact_multiply,
                     merge_id, model_set_from_data, mz_evaluate,
                     noise_coeff_vector, run_experiment_1, run_experiment_2,
                     sample_cmz, verify_run)
from ncreach.harness import _seed, _slice_batch, generate_data
from ncreach.serialize import write_widths_csv
from conftest import (joint_assignment, overlapping_cmz_pair, random_cmz,
                      random_cpmz, random_cpz)

_cache = {}


@contextmanager
def criterion(name, time_limit=None):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - t0
        if time_limit is not None and elapsed >= time_limit:
            raise AssertionError(
                f"runtime {elapsed:.2f}s exceeds the {time_limit}s budget")
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        print(f"{'PASS' if ok else 'FAIL'} ({elapsed:.2f}s): {name}")


def exp1_result():
    if "exp1" not in _cache:
        _cache["exp1"] = run_experiment_1(benchmark_config(1))
    return _cache["exp1"]


def exp2_result():
    if "exp2" not in _cache:
        _cache["exp2"] = run_experiment_2(benchmark_config(2))
    return _cache["exp2"]


def test_merge_id_golden():
    with criterion("mergeID reproduces the worked example bit-exactly",
                   time_limit=1.0):
        p1 = ConstrainedPolyZonotope(
            [0, 2, 1], [[0, 1], [3, 2], [1, 5]], [[4, 1], [0, 2]],
            [[1, 2], [0, 0], [3, 4]], [2, 0, 2], [[4, 2], [0, 2]], [1, 2])
        p2 = ConstrainedPolyZonotope(
            [3, 3, 4], [[2, 2], [3, 0], [1, 4]], [[3, 2], [3, 0]],
            [[1, 3], [2, 4]], [2, 5], [[2, 0], [2, 3]], [1, 3])
        q1, q2 = merge_id(p1, p2)
        assert q1.id.tolist() == [1, 2, 3] and q2.id.tolist() == [1, 2, 3]
        assert q1.E.tolist() == [[4, 1], [0, 2], [0, 0]]
        assert q1.R.tolist() == [[4, 2], [0, 2], [0, 0]]
        assert q2.E.tolist() == [[3, 2], [0, 0], [3, 0]]
        assert q2.R.tolist() == [[2, 0], [0, 0], [2, 3]]
        np.testing.assert_array_equal(q1.c, p1.c)
        np.testing.assert_array_equal(q1.G, p1.G)
        np.testing.assert_array_equal(q1.A, p1.A)
        np.testing.assert_array_equal(q1.b, p1.b)
        np.testing.assert_array_equal(q2.c, p2.c)
        np.testing.assert_array_equal(q2.G, p2.G)
        np.testing.assert_array_equal(q2.A, p2.A)
        np.testing.assert_array_equal(q2.b, p2.b)


def _random_pair(rng, with_constraints):
    """(CPMZ, CPZ) pair: dims <= 4, generators <= 5, mixed shared/fresh ids."""
    ctx = FactorContext()
    shared = ctx.allocate(int(rng.integers(0, 3)))
    nx, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    y_ids = np.concatenate([shared, ctx.allocate(int(rng.integers(1, 3)))])
    p_ids = np.concatenate([shared, ctx.allocate(int(rng.integers(1, 3)))])
    feas = rng.uniform(-1, 1, max(y_ids.size, p_ids.size))
    y = random_cpmz(rng, ctx, rows=nx, cols=n,
                    n_gens=int(rng.integers(0, 6)), ids=y_ids,
                    n_terms=int(rng.integers(1, 3)) if with_constraints else 0,
                    nc=int(rng.integers(1, 3)), na=int(rng.integers(1, 3)),
                    feasible_at=feas[:y_ids.size])
    p = random_cpz(rng, ctx, dim=n, n_gens=int(rng.integers(0, 6)), ids=p_ids,
                   n_terms=int(rng.integers(1, 3)) if with_constraints else 0,
                   feasible_at=feas[:p_ids.size])
    return y, p


def test_exact_multiplication_oracle_suite():
    with criterion("exact multiplication: 200 randomized pairs x 100 "
                   "assignments, evaluation and residual within 1e-9",
                   time_limit=30.0):
        rng = np.random.default_rng(20250811)
        for trial in range(200):
            y, p = _random_pair(rng, with_constraints=bool(trial % 2))
            out = exact_multiply(y, p)
            for _ in range(100):
                a = joint_assignment(rng, out)
                ym, ry = cpmz_evaluate(y, a)
                pv, rp = evaluate_cpz(p, a)
                ov, ro = evaluate_cpz(out, a)
                assert np.max(np.abs(ov - ym @ pv), initial=0.0) <= 1e-9
                assert abs(ro - max(ry, rp)) <= 1e-9


def test_exact_addition_and_merge_homomorphism_suite():
    with criterion("exact addition and mergeID homomorphisms at 1e-12",
                   time_limit=30.0):
        rng = np.random.default_rng(11)
        for trial in range(200):
            ctx = FactorContext()
            shared = ctx.allocate(int(rng.integers(0, 3)))
            n = int(rng.integers(1, 5))
            ids1 = np.concatenate([shared, ctx.allocate(int(rng.integers(1, 3)))])
            ids2 = np.concatenate([shared, ctx.allocate(int(rng.integers(1, 3)))])
            terms = int(rng.integers(0, 3))
            p1 = random_cpz(rng, ctx, dim=n, n_gens=int(rng.integers(0, 6)),
                            ids=ids1, n_terms=terms)
            p2 = random_cpz(rng, ctx, dim=n, n_gens=int(rng.integers(0, 6)),
                            ids=ids2, n_terms=int(rng.integers(0, 3)))
            q1, q2 = merge_id(p1, p2)
            s = exact_add(p1, p2)
            for _ in range(100):
                a = joint_assignment(rng, s)
                v1, r1 = evaluate_cpz(p1, a)
                w1, t1 = evaluate_cpz(q1, a)
                assert np.max(np.abs(v1 - w1), initial=0.0) <= 1e-12
                assert abs(r1 - t1) <= 1e-12
                v2, r2 = evaluate_cpz(p2, a)
                w2, t2 = evaluate_cpz(q2, a)
                assert np.max(np.abs(v2 - w2), initial=0.0) <= 1e-12
                assert abs(r2 - t2) <= 1e-12
                vs, rs = evaluate_cpz(s, a)
                assert np.max(np.abs(vs - (v1 + v2)), initial=0.0) <= 1e-12
                assert abs(rs - max(r1, r2)) <= 1e-12


def test_cmz_intersection():
    with criterion("CMZ intersection: interval case analytic, 50 random "
                   "pairs sound and complete at 1e-6", time_limit=60.0):
        ctx = FactorContext()
        n1 = cmz_from_interval(ctx, 0.0)
        n2 = cmz_from_interval(ctx, 1.0)
        inter = cmz_intersect(n1, n2, ctx)
        vals = sample_cmz(inter, 400, 7)[:, 0, 0]
        assert vals.min() >= -1e-9 and vals.max() <= 1 + 1e-9
        assert vals.min() <= 1e-6 and vals.max() >= 1 - 1e-6

        rng = np.random.default_rng(12)
        for _ in range(50):
            a, b, shared = overlapping_cmz_pair(rng, ctx, rows=2, cols=2,
                                                with_constraints=True)
            cut = cmz_intersect(a, b, ctx)
            for m in sample_cmz(cut, 20, rng):
                assert cmz_membership(a, m, 1e-6).is_member
                assert cmz_membership(b, m, 1e-6).is_member
            for m in sample_cmz(a, 30, rng):
                if cmz_membership(b, m, 1e-6).is_member:
                    assert cmz_membership(cut, m, 1e-6).is_member


def cmz_from_interval(ctx, center):
    from ncreach import ConstrainedMatZonotope
    return ConstrainedMatZonotope(np.array([[float(center)]]),
                                  np.array([[[1.0]]]), None, None,
                                  ctx.allocate(1))


def test_lemma1_containment():
    with criterion("model identification: 20 noisy datasets (T=60) contain "
                   "the true model; noiseless control recovers it to 1e-10",
                   time_limit=60.0):
        cfg = benchmark_config(1)
        true = np.hstack([cfg.system.Phi, cfg.system.Gamma])
        for trial in range(20):
            data = generate_data(cfg, 60, np.random.default_rng(
                np.random.SeedSequence([cfg.seed, 100 + trial])))
            m0 = model_set_from_data(data, cfg.noise_set)
            witnessed = mz_evaluate(m0, noise_coeff_vector(data.noise_coeffs))
            assert np.max(np.abs(witnessed - true)) <= 1e-6
            assert cmz_membership(m0, true, 1e-6).is_member
        quiet = benchmark_config(
            1, noise_set=Zonotope(np.zeros(5), np.zeros((5, 0))))
        data = generate_data(quiet, 60, np.random.default_rng(0))
        m0 = model_set_from_data(data, quiet.noise_set)
        assert m0.n_generators == 0
        assert np.max(np.abs(m0.C - true)) <= 1e-10


def test_experiment1_reproduction():
    with criterion("experiment 1 (N=4): 1000 witness trajectories realized "
                   "in the reachable sets within 1e-8", time_limit=120.0):
        res = exp1_result()
        cfg = res.cfg
        assert cfg.horizon == 4
        report = verify_run(res.runs["Rhat"], cfg.system, cfg, trials=1000,
                            tolerance=1e-8)
        assert report.trials == 1000
        for row in report.rows:
            assert row["max_mismatch"] <= 1e-8, row
            assert row["max_residual"] <= 1e-8, row
        assert report.passed


def test_prop3_refinement():
    with criterion("refinement: true model stays a member and 200 samples "
                   "lie in both parents at 1e-6", time_limit=120.0):
        res = exp2_result()
        cfg = res.cfg
        run = res.runs["Rhat"]
        true = np.hstack([cfg.system.Phi, cfg.system.Gamma])
        assert run.refinement_steps == [1]
        refined, witness = run.models[-1]
        assignment = dict(zip((int(d) for d in refined.id), witness))
        mat, resid = cmz_evaluate(refined, assignment)
        assert np.max(np.abs(mat - true)) <= 1e-6
        assert resid <= 1e-6
        assert cmz_membership(refined, true, 1e-6).is_member

        # parents: the previous model set and the fresh-data model set
        prev = run.models[0][0]
        total = cfg.offline_length + cfg.online_lengths[0]
        data = generate_data(cfg, total, _seed(cfg.seed, 0))
        fresh = _slice_batch(data, cfg.offline_length, total)
        m_new = model_set_from_data(fresh, cfg.noise_set)
        for m in sample_cmz(refined, 200, 13):
            assert cmz_membership(prev, m, 1e-6).is_member
            assert cmz_membership(m_new, m, 1e-6).is_member


def test_experiment2_width_claim(tmp_path):
    with criterion("experiment 2: refined run at most as wide as one-shot "
                   "in >= 60% of sampled-support cells", time_limit=300.0):
        res = exp2_result()
        rows = compare_widths(res.runs["Rhat"].reach_sets,
                              res.runs["Rbar"].reach_sets,
                              n_samples=1000, seed=res.cfg.seed)
        table = tmp_path / "experiment2_widths.csv"
        write_widths_csv(table, rows)
        print(f"width table emitted: {table}")
        wins = sum(r["support_width_a"] <= r["support_width_b"] for r in rows)
        assert len(rows) == 4 * 5
        assert wins / len(rows) >= 0.60, f"only {wins}/{len(rows)} cells"


def test_shape_and_complexity_smoke():
    with criterion("shape smoke test: generator recursion and intersection "
                   "constraint-row formula hold exactly", time_limit=60.0):
        for res in (exp1_result(), exp2_result()):
            for run in res.runs.values():
                g = run.refined_model.n_generators
                g_u = res.cfg.input_set.n_generators
                g_w = res.cfg.noise_set.n_generators
                h = run.reach_sets[0].n_generators
                for k in range(1, len(run.reach_sets)):
                    h = g + (h + g_u) * (1 + g) + g_w
                    assert run.reach_sets[k].n_generators == h
                    assert run.metrics["generator_counts"][k] == h
        # refined model of experiment 2: two unconstrained parents in R^{5x6}
        refined = exp2_result().runs["Rhat"].refined_model
        assert refined.n_constraint_rows == 0 + 0 + 5 * 6
        assert refined.n_constraint_cols == 1
        # synthetic constrained pair
        rng = np.random.default_rng(14)
        ctx = FactorContext()
        n1 = random_cmz(rng, ctx, rows=3, cols=2, n_gens=2, nc=2, na=3)
        n2 = random_cmz(rng, ctx, rows=3, cols=2, n_gens=4, nc=1, na=2)
        cut = cmz_intersect(n1, n2, ctx)
        assert cut.n_constraint_rows == 2 * 3 + 1 * 2 + 3 * 2
        assert cut.n_generators == 2 + 4
