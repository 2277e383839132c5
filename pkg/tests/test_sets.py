import numpy as np
import pytest

from ncreach import (ConstrainedPolyZonotope, ConstrainedZonotope,
                     FactorContext, InfeasibleSetError, Zonotope,
                     cartesian_product, compact_generators, evaluate_cpz,
                     evaluate_cpz_batch, exact_add, has_degree_one_constraints,
                     interval_enclosure, merge_id, sample_cpz,
                     sample_feasible_factors, zonotope_to_cpz)
from conftest import joint_assignment, random_cpz


def poly_p1():
    """Running example: two factors (ids 1, 2), three constraints."""
    return ConstrainedPolyZonotope(
        [0, 2, 1], [[0, 1], [3, 2], [1, 5]], [[4, 1], [0, 2]],
        [[1, 2], [0, 0], [3, 4]], [2, 0, 2], [[4, 2], [0, 2]], [1, 2])


def poly_p2():
    """Companion example sharing factor 1 (ids 1, 3)."""
    return ConstrainedPolyZonotope(
        [3, 3, 4], [[2, 2], [3, 0], [1, 4]], [[3, 2], [3, 0]],
        [[1, 3], [2, 4]], [2, 5], [[2, 0], [2, 3]], [1, 3])


class TestMergeId:
    def test_golden_padding(self):
        q1, q2 = merge_id(poly_p1(), poly_p2())
        assert q1.id.tolist() == [1, 2, 3]
        assert q2.id.tolist() == [1, 2, 3]
        assert q1.E.tolist() == [[4, 1], [0, 2], [0, 0]]
        assert q1.R.tolist() == [[4, 2], [0, 2], [0, 0]]
        assert q2.E.tolist() == [[3, 2], [0, 0], [3, 0]]
        assert q2.R.tolist() == [[2, 0], [0, 0], [2, 3]]
        np.testing.assert_array_equal(q1.G, poly_p1().G)
        np.testing.assert_array_equal(q2.A, poly_p2().A)

    def test_identical_ids_unchanged(self):
        p = poly_p1()
        q1, q2 = merge_id(p, p)
        np.testing.assert_array_equal(q1.E, p.E)
        np.testing.assert_array_equal(q2.E, p.E)
        np.testing.assert_array_equal(q1.R, p.R)

    def test_disjoint_ids_full_union(self):
        rng = np.random.default_rng(0)
        ctx = FactorContext()
        p1 = random_cpz(rng, ctx, n_factors=2, n_terms=1)
        p2 = random_cpz(rng, ctx, n_factors=3, n_terms=2)
        q1, q2 = merge_id(p1, p2)
        assert q1.id.size == 5
        np.testing.assert_array_equal(q1.E[2:], np.zeros((3, p1.n_generators)))

    def test_evaluation_preserved_exactly(self):
        rng = np.random.default_rng(1)
        q1, q2 = merge_id(poly_p1(), poly_p2())
        for _ in range(50):
            a = joint_assignment(rng, q1, q2)
            for before, after in ((poly_p1(), q1), (poly_p2(), q2)):
                pt0, r0 = evaluate_cpz(before, a)
                pt1, r1 = evaluate_cpz(after, a)
                np.testing.assert_array_equal(pt0, pt1)
                assert r0 == r1


class TestEvaluate:
    def test_running_example_at_zero(self):
        pt, res = evaluate_cpz(poly_p1(), {1: 0.0, 2: 0.0})
        np.testing.assert_allclose(pt, [0, 2, 1])
        assert res == 2.0

    def test_running_example_at_one(self):
        pt, res = evaluate_cpz(poly_p1(), {1: 1.0, 2: 1.0})
        np.testing.assert_allclose(pt, [1, 7, 7])

    def test_unconstrained_zero_alpha_gives_center(self):
        rng = np.random.default_rng(2)
        p = random_cpz(rng, FactorContext(), n_terms=0)
        pt, res = evaluate_cpz(p, {int(d): 0.0 for d in p.id})
        np.testing.assert_allclose(pt, p.c)
        assert res == 0.0

    def test_missing_id_raises(self):
        with pytest.raises(KeyError):
            evaluate_cpz(poly_p1(), {1: 0.0})

    def test_batch_matches_single(self):
        rng = np.random.default_rng(3)
        p = poly_p1()
        alphas = rng.uniform(-1, 1, size=(2, 20))
        pts, res = evaluate_cpz_batch(p, alphas)
        for i in range(20):
            pt, r = evaluate_cpz(p, {1: alphas[0, i], 2: alphas[1, i]})
            np.testing.assert_allclose(pts[:, i], pt, atol=1e-14)
            np.testing.assert_allclose(res[i], r, atol=1e-14)


class TestExactAdd:
    def test_add_point_zero_is_identity(self):
        rng = np.random.default_rng(4)
        p = poly_p1()
        out = exact_add(p, ConstrainedPolyZonotope.point(np.zeros(3)))
        for _ in range(20):
            a = joint_assignment(rng, p)
            np.testing.assert_allclose(evaluate_cpz(out, a)[0],
                                       evaluate_cpz(p, a)[0], atol=1e-14)

    def test_disjoint_minkowski_homomorphism(self):
        rng = np.random.default_rng(5)
        ctx = FactorContext()
        p1 = random_cpz(rng, ctx, n_terms=0)
        p2 = random_cpz(rng, ctx, n_terms=0)
        out = exact_add(p1, p2)
        for _ in range(100):
            a = joint_assignment(rng, p1, p2)
            expect = evaluate_cpz(p1, a)[0] + evaluate_cpz(p2, a)[0]
            np.testing.assert_allclose(evaluate_cpz(out, a)[0], expect,
                                       atol=1e-12)

    def test_shared_ids_doubles(self):
        rng = np.random.default_rng(6)
        p = poly_p1()
        out = exact_add(p, p)
        for _ in range(50):
            a = joint_assignment(rng, p)
            np.testing.assert_allclose(evaluate_cpz(out, a)[0],
                                       2 * evaluate_cpz(p, a)[0], atol=1e-12)

    def test_residual_is_max_of_parents(self):
        rng = np.random.default_rng(7)
        p1, p2 = poly_p1(), poly_p2()
        out = exact_add(p1, p2)
        for _ in range(100):
            a = joint_assignment(rng, p1, p2)
            r = evaluate_cpz(out, a)[1]
            assert r == pytest.approx(
                max(evaluate_cpz(p1, a)[1], evaluate_cpz(p2, a)[1]), abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            exact_add(poly_p1(), ConstrainedPolyZonotope.point([0.0]))


class TestZonotopeConversions:
    def test_single_generator_noise(self):
        ctx = FactorContext()
        p = zonotope_to_cpz(Zonotope(np.zeros(5), np.full((5, 1), 0.005)), ctx)
        assert p.E.tolist() == [[1]]
        assert p.is_unconstrained()

    def test_no_generators_is_point(self):
        ctx = FactorContext()
        p = zonotope_to_cpz(Zonotope([1.0, 2.0], np.zeros((2, 0))), ctx)
        assert p.n_generators == 0 and p.n_factors == 0

    def test_scalar_interval(self):
        ctx = FactorContext()
        p = zonotope_to_cpz(Zonotope([10.0], [[0.25]]), ctx)
        d = int(p.id[0])
        assert evaluate_cpz(p, {d: -1.0})[0][0] == pytest.approx(9.75)
        assert evaluate_cpz(p, {d: 1.0})[0][0] == pytest.approx(10.25)

    def test_round_trip_affine(self):
        rng = np.random.default_rng(8)
        z = Zonotope(rng.normal(size=3), rng.normal(size=(3, 4)))
        p = zonotope_to_cpz(z, FactorContext())
        for _ in range(30):
            alpha = rng.uniform(-1, 1, 4)
            pt, _ = evaluate_cpz(p, dict(zip(p.id.tolist(), alpha)))
            np.testing.assert_allclose(pt, z.c + z.G @ alpha, atol=1e-14)

    def test_cz_to_cpz_linear_constraints(self):
        cz = ConstrainedZonotope([0.0], [[1.0, 1.0]], [[1.0, -1.0]], [0.5],
                                 [1, 2])
        p = cz.to_cpz()
        assert has_degree_one_constraints(p)
        pt, res = evaluate_cpz(p, {1: 0.75, 2: 0.25})
        assert res == pytest.approx(0.0, abs=1e-15)
        assert pt[0] == pytest.approx(1.0)


class TestCartesianProduct:
    def test_point_times_point(self):
        ctx = FactorContext()
        p = ConstrainedPolyZonotope.point([1.0, 2.0])
        z = Zonotope([3.0], np.zeros((1, 0)))
        out = cartesian_product(p, z, ctx)
        np.testing.assert_allclose(out.c, [1, 2, 3])
        assert out.n_generators == 0

    def test_evaluation_matches_stacked(self):
        rng = np.random.default_rng(9)
        ctx = FactorContext()
        p = random_cpz(rng, ctx, dim=2, n_terms=1)
        z = Zonotope(rng.normal(size=2), rng.normal(size=(2, 3)))
        out = cartesian_product(p, z, ctx)
        z_ids = out.id[p.n_factors:]
        for _ in range(100):
            a = joint_assignment(rng, out)
            top, res_p = evaluate_cpz(p, a)
            alpha_z = np.array([a[int(d)] for d in z_ids])
            bottom = z.c + z.G @ alpha_z
            pt, res = evaluate_cpz(out, a)
            np.testing.assert_allclose(pt, np.concatenate([top, bottom]),
                                       atol=1e-13)
            assert res == pytest.approx(res_p, abs=1e-14)

    def test_shape_arithmetic(self):
        rng = np.random.default_rng(10)
        ctx = FactorContext()
        p = random_cpz(rng, ctx, dim=2, n_gens=4, n_factors=3, n_terms=2)
        z = Zonotope(np.zeros(2), np.eye(2))
        out = cartesian_product(p, z, ctx)
        assert out.n_generators == 4 + 2
        assert out.n_factors == 3 + 2
        assert out.n_constraint_terms == p.n_constraint_terms


class TestIntervalEnclosure:
    def test_unit_generator(self):
        p = ConstrainedPolyZonotope(
            [0.0], [[1.0]], [[1]], np.zeros((0, 0)), np.zeros(0),
            np.zeros((1, 0), dtype=np.int64), [1])
        lo, hi = interval_enclosure(p)
        assert lo[0] == -1.0 and hi[0] == 1.0

    def test_point_set(self):
        p = ConstrainedPolyZonotope.point([2.0, -3.0])
        lo, hi = interval_enclosure(p)
        np.testing.assert_allclose(lo, [2, -3])
        np.testing.assert_allclose(hi, [2, -3])

    def test_running_example_first_coordinate(self):
        lo, hi = interval_enclosure(poly_p1())
        assert lo[0] == -1.0 and hi[0] == 1.0

    def test_soundness_on_samples(self):
        rng = np.random.default_rng(11)
        p = random_cpz(rng, FactorContext(), n_terms=0)
        pts = sample_cpz(p, 200, 12)
        lo, hi = interval_enclosure(p)
        assert np.all(pts >= lo - 1e-12) and np.all(pts <= hi + 1e-12)


class TestSampling:
    def test_unconstrained_residuals_zero(self):
        rng = np.random.default_rng(13)
        p = random_cpz(rng, FactorContext(), n_terms=0)
        alphas = sample_feasible_factors(p, 5, 14)
        _, res = evaluate_cpz_batch(p, alphas.T)
        assert alphas.shape == (5, p.n_factors)
        np.testing.assert_array_equal(res, np.zeros(5))

    def test_degree_one_constrained_residuals(self):
        # pipeline-style set: degree-1 constraint alpha_1 - alpha_2 = 0.3
        p = ConstrainedPolyZonotope(
            [0.0], [[1.0, 0.5]], [[1, 0], [0, 1]],
            [[1.0, -1.0]], [0.3], [[1, 0], [0, 1]], [1, 2])
        alphas = sample_feasible_factors(p, 100, 15)
        _, res = evaluate_cpz_batch(p, alphas.T)
        assert np.max(res) <= 1e-8

    def test_zero_samples(self):
        p = poly_p1()
        assert sample_cpz(p, 0, 0).shape == (0, 3)

    def test_infeasible_raises(self):
        p = ConstrainedPolyZonotope(
            [0.0], [[1.0]], [[1]], [[1.0]], [5.0], [[1]], [1])
        with pytest.raises(InfeasibleSetError):
            sample_cpz(p, 4, 0)

    def test_rejection_fallback_degree_two(self):
        # alpha^2 * 1 = 0.25 has solutions alpha = +-0.5
        p = ConstrainedPolyZonotope(
            [0.0], [[1.0]], [[1]], [[1.0]], [0.25], [[2]], [1])
        assert not has_degree_one_constraints(p)
        alphas = sample_feasible_factors(p, 5, 16, residual_tol=1e-3)
        assert np.all(np.abs(np.abs(alphas) - 0.5) < 0.1)


class TestCompaction:
    def test_merges_duplicate_columns(self):
        p = ConstrainedPolyZonotope(
            [0.0], [[1.0, 2.0, 3.0]], [[1, 0, 1]], np.zeros((0, 0)),
            np.zeros(0), np.zeros((1, 0), dtype=np.int64), [1])
        q = compact_generators(p)
        assert q.n_generators == 2
        rng = np.random.default_rng(17)
        for _ in range(20):
            a = {1: float(rng.uniform(-1, 1))}
            np.testing.assert_allclose(evaluate_cpz(q, a)[0],
                                       evaluate_cpz(p, a)[0], atol=1e-14)


class TestValidation:
    def test_distinct_ids_required(self):
        with pytest.raises(ValueError, match="distinct"):
            ConstrainedPolyZonotope(
                [0.0], [[1.0, 1.0]], [[1, 0], [0, 1]], np.zeros((0, 0)),
                np.zeros(0), np.zeros((2, 0), dtype=np.int64), [1, 1])

    def test_exponent_shape_checked(self):
        with pytest.raises(ValueError, match="E must be"):
            ConstrainedPolyZonotope(
                [0.0], [[1.0]], [[1, 0]], np.zeros((0, 0)), np.zeros(0),
                np.zeros((1, 0), dtype=np.int64), [1])

    def test_negative_exponent_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            ConstrainedPolyZonotope(
                [0.0], [[1.0]], [[-1]], np.zeros((0, 0)), np.zeros(0),
                np.zeros((1, 0), dtype=np.int64), [1])

    def test_constraint_emptiness_consistency(self):
        with pytest.raises(ValueError):
            ConstrainedPolyZonotope(
                [0.0], [[1.0]], [[1]], np.zeros((0, 0)), [1.0],
                np.zeros((1, 0), dtype=np.int64), [1])

    def test_values_immutable(self):
        p = poly_p1()
        with pytest.raises(ValueError):
            p.G[0, 0] = 5.0
