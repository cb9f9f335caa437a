import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.optimize import brentq

from palmvar.objective import ProblemSpec
from palmvar.proximal import (
    Constraint,
    l1_threshold,
    project_cardinality,
    project_l1_ball,
    project_nuclear_ball,
    project_rank,
    prox_x,
    prox_x_direct,
    prox_x_woodbury,
    prox_y,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
matrices = st.integers(1, 5).flatmap(lambda p: arrays(np.float64, (p, p), elements=finite))


def spec_cd(rng, p, n):
    c = rng.standard_normal((p, n - 1))
    d = rng.standard_normal((p, n - 1))
    return ProblemSpec(c, d, np.eye(p), np.eye(p), 1.0, 1.0)


def prox_objective(spec, x, u, ck):
    return 0.5 * np.linalg.norm(x @ spec.c - spec.d) ** 2 + 0.5 * ck * np.linalg.norm(x - u) ** 2


def brute_cardinality(v, s):
    flat = v.reshape(-1)
    best, best_d = None, np.inf
    for supp in itertools.combinations(range(flat.size), s):
        w = np.zeros_like(flat)
        w[list(supp)] = flat[list(supp)]
        dist = np.linalg.norm(flat - w)
        if dist < best_d - 1e-15:
            best, best_d = w, dist
    return best.reshape(v.shape), best_d


def kkt_l1(v, radius):
    # independent route: root of sum max(|v| - t, 0) = radius
    a = np.abs(v).reshape(-1)
    if a.sum() <= radius:
        return v.copy()
    theta = brentq(lambda t: np.maximum(a - t, 0).sum() - radius, 0.0, a.max(), xtol=1e-14, rtol=1e-15)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


class TestProxX:
    def test_normal_equation(self, rng):
        spec = spec_cd(rng, 4, 6)
        u = rng.standard_normal((4, 4))
        ck = 2.5
        x = prox_x_direct(spec, u, ck)
        resid = x @ (spec.c @ spec.c.T + ck * np.eye(4)) - (spec.d @ spec.c.T + ck * u)
        assert np.linalg.norm(resid) <= 1e-10 * np.linalg.norm(spec.d @ spec.c.T + ck * u)

    def test_local_optimality(self, rng):
        spec = spec_cd(rng, 4, 6)
        u = rng.standard_normal((4, 4))
        x = prox_x_direct(spec, u, 1.7)
        f0 = prox_objective(spec, x, u, 1.7)
        for _ in range(1000):
            pert = x + rng.standard_normal((4, 4)) * 10 ** rng.uniform(-6, 0)
            assert f0 <= prox_objective(spec, pert, u, 1.7)

    @pytest.mark.parametrize("p,n", [(10, 4), (10, 30), (3, 2), (6, 7)])
    def test_woodbury_agrees(self, rng, p, n):
        spec = spec_cd(rng, p, n)
        for ck in (1e-3, 1.0, 1e3):
            u = rng.standard_normal((p, p))
            a = prox_x_direct(spec, u, ck)
            b = prox_x_woodbury(spec, u, ck)
            assert np.linalg.norm(a - b) <= 1e-8 * np.linalg.norm(a)
            np.testing.assert_array_equal(prox_x(spec, u, ck), a if p <= n - 1 else b)

    def test_rejects_nonpositive_weight(self, rng):
        spec = spec_cd(rng, 3, 5)
        with pytest.raises(ValueError):
            prox_x_direct(spec, np.zeros((3, 3)), 0.0)
        with pytest.raises(ValueError):
            prox_y(np.zeros((3, 3)), -1.0, Constraint.rank(1))


class TestCardinality:
    def test_example(self):
        out = project_cardinality(np.array([[3.0, -1.0], [0.5, 2.0]]), 2)
        np.testing.assert_array_equal(out, [[3.0, 0.0], [0.0, 2.0]])

    def test_ties_prefer_lower_index(self):
        out = project_cardinality(np.array([[1.0, -1.0], [1.0, 1.0]]), 2)
        np.testing.assert_array_equal(out, [[1.0, -1.0], [0.0, 0.0]])

    def test_exhaustive(self, rng):
        for _ in range(200):
            v = rng.standard_normal((3, 3))
            s = int(rng.integers(1, 9))
            ref, ref_d = brute_cardinality(v, s)
            out = project_cardinality(v, s)
            assert abs(np.linalg.norm(v - out) - ref_d) <= 1e-12
            np.testing.assert_array_equal(out, ref)

    @given(matrices, st.integers(1, 25))
    def test_properties(self, v, s):
        out = project_cardinality(v, s)
        assert np.count_nonzero(out) <= s
        np.testing.assert_array_equal(project_cardinality(out, s), out)
        kept = out != 0
        np.testing.assert_array_equal(out[kept], v[kept])


class TestRank:
    def test_random_candidates(self, rng):
        v = rng.standard_normal((6, 6))
        out = project_rank(v, 2)
        d0 = np.linalg.norm(v - out)
        for _ in range(1000):
            w = rng.standard_normal((6, 2)) @ rng.standard_normal((2, 6))
            w *= rng.uniform(0.1, 3)
            assert d0 <= np.linalg.norm(v - w)
        sv = np.linalg.svd(v, compute_uv=False)
        assert abs(d0**2 - np.sum(sv[2:] ** 2)) <= 1e-10 * np.sum(sv**2)

    @given(matrices, st.integers(1, 5))
    def test_idempotent(self, v, r):
        out = project_rank(v, r)
        assert np.linalg.norm(project_rank(out, r) - out) <= 1e-10 * max(1.0, np.linalg.norm(v))


class TestL1:
    def test_example(self):
        out, theta = project_l1_ball(np.array([[3.0, 1.0]]), 2.0, return_threshold=True)
        np.testing.assert_allclose(out, [[2.0, 0.0]], atol=1e-15)
        assert theta == pytest.approx(1.0)

    def test_grid_search(self):
        # feasible points (a, b) with |a| + |b| <= 2 on a fine grid
        g = np.linspace(-2, 2, 801)
        a, b = np.meshgrid(g, g)
        ok = np.abs(a) + np.abs(b) <= 2 + 1e-12
        dist = (a - 3) ** 2 + (b - 1) ** 2
        i = np.argmin(np.where(ok, dist, np.inf))
        assert abs(a.flat[i] - 2) < 1e-2 and abs(b.flat[i]) < 1e-2

    def test_kkt_oracle(self, rng):
        for _ in range(100):
            p = int(rng.integers(1, 8))
            v = rng.standard_normal((p, p)) * rng.uniform(0.1, 10)
            radius = rng.uniform(0.01, 1.5) * np.abs(v).sum()
            np.testing.assert_allclose(project_l1_ball(v, radius), kkt_l1(v, radius), atol=1e-6)

    @given(matrices, st.floats(1e-3, 100))
    def test_properties(self, v, radius):
        out = project_l1_ball(v, radius)
        assert np.abs(out).sum() <= radius * (1 + 1e-12) + 1e-12
        assert np.linalg.norm(project_l1_ball(out, radius) - out) <= 1e-10 * max(1.0, radius)
        assert l1_threshold(v, radius) >= 0

    def test_inside_untouched(self):
        v = np.array([[0.1, -0.2]])
        np.testing.assert_array_equal(project_l1_ball(v, 1.0), v)


class TestNuclear:
    def test_example(self):
        np.testing.assert_allclose(project_nuclear_ball(np.diag([3.0, 1.0]), 2.0), np.diag([2.0, 0.0]), atol=1e-14)

    def test_norm(self, rng):
        for _ in range(20):
            v = rng.standard_normal((5, 5))
            u = rng.uniform(0.5, 8)
            out = project_nuclear_ball(v, u)
            nuc = np.linalg.svd(out, compute_uv=False).sum()
            assert abs(nuc - min(u, np.linalg.svd(v, compute_uv=False).sum())) <= 1e-10 * max(1, u)

    @given(matrices, st.floats(1e-3, 100))
    def test_idempotent(self, v, radius):
        out = project_nuclear_ball(v, radius)
        assert np.linalg.norm(project_nuclear_ball(out, radius) - out) <= 1e-10 * max(1.0, radius)


class TestConstraint:
    def test_validation(self):
        with pytest.raises(ValueError):
            Constraint("box", 1)
        with pytest.raises(ValueError):
            Constraint.cardinality(2.5)
        with pytest.raises(ValueError):
            Constraint.l1_ball(0.0)
        with pytest.raises(ValueError):
            Constraint.rank(4).check_dimension(3)
        with pytest.raises(ValueError):
            Constraint.cardinality(10).check_dimension(3)

    @pytest.mark.parametrize("con", [Constraint.cardinality(3), Constraint.rank(1),
                                     Constraint.l1_ball(1.0), Constraint.nuclear_ball(1.0)])
    def test_project_lands_inside(self, rng, con):
        for _ in range(20):
            v = rng.standard_normal((3, 3)) * 5
            y = prox_y(v, 3.0, con)
            assert con.contains(y)
            assert np.linalg.norm(con.project(y) - y) <= 1e-10 * max(1.0, np.linalg.norm(y))

    def test_convexity_flag(self):
        assert Constraint.l1_ball(1).convex and Constraint.nuclear_ball(1).convex
        assert not Constraint.cardinality(1).convex and not Constraint.rank(1).convex
