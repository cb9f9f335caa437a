import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_spec
from palmvar.evaluation import (
    DegenerateStepWarning,
    bisect_l1_threshold,
    cosine_score,
    count_nonzeros,
    cross_validate,
    evaluate,
    normalized_error,
)
from palmvar.model_data import (
    TimeSeriesData,
    generate_sparse_stable,
    sample_steady_state,
    simulate,
)
from palmvar.palm import PalmConfig
from palmvar.proximal import Constraint


def naive_metrics(a, x):
    ne, cs = [], []
    for t in range(x.shape[1] - 1):
        step = x[:, t + 1] - x[:, t]
        res = x[:, t] - a @ x[:, t]
        ne.append(np.linalg.norm(x[:, t + 1] - a @ x[:, t]) / np.linalg.norm(step))
        cs.append(abs(step @ res) / (np.linalg.norm(step) * np.linalg.norm(res)))
    return np.mean(ne), np.mean(cs)


class TestMetrics:
    def test_identity_is_one(self, rng):
        x = rng.standard_normal((4, 30))
        assert normalized_error(np.eye(4), x) == 1.0

    def test_true_model_noiseless(self):
        m = generate_sparse_stable(5, 10, 0.9, seed=1)
        ts = simulate(m, np.ones(5), 20, sigma=0.0)
        assert normalized_error(m.a, ts) == pytest.approx(0.0, abs=1e-14)
        # x(t) - A x(t) = x(t) - x(t+1): perfectly aligned
        assert cosine_score(m.a, ts) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        # steps along e1, residuals along e2
        x = np.array([[0.0, 1.0, 2.0, 3.0], [1.0, 1.0, 1.0, 1.0]])
        a = np.array([[1.0, 0.0], [0.0, 0.0]])
        assert cosine_score(a, x) == pytest.approx(0.0, abs=1e-15)

    def test_matches_naive(self, rng):
        x = rng.standard_normal((3, 25))
        a = rng.standard_normal((3, 3))
        ne, cs = naive_metrics(a, x)
        res = evaluate(a, x)
        assert res.normalized_error == pytest.approx(ne, rel=1e-12)
        assert res.cosine_score == pytest.approx(cs, rel=1e-12)
        assert res.to_dict()["m"] == 25

    def test_degenerate_steps_skipped(self):
        x = np.array([[1.0, 1.0, 2.0, 0.5]])
        with pytest.warns(DegenerateStepWarning):
            res = evaluate(np.array([[0.5]]), x)
        assert res.skipped_terms == 1
        assert np.isfinite(res.normalized_error)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            evaluate(np.eye(3), rng.standard_normal((4, 10)))
        with pytest.raises(ValueError):
            evaluate(np.eye(2), rng.standard_normal((2, 1)))

    @given(st.integers(0, 2**31), st.integers(1, 6))
    def test_cosine_bounded(self, seed, p):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((p, 12)) * rng.uniform(1e-3, 1e3)
        a = rng.standard_normal((p, p))
        assert 0.0 <= cosine_score(a, x) <= 1 + 1e-12

    def test_count_nonzeros(self):
        assert count_nonzeros(np.array([[1.0, 1e-9], [0.0, -2.0]])) == 2
        assert count_nonzeros(np.zeros((2, 2))) == 0


class TestBisection:
    def test_dense_target(self, rng):
        spec = random_spec(rng, 4, 10)
        res = bisect_l1_threshold(spec, 16, interval=(1e-2, 1e4), palm_config=PalmConfig(max_iters=500))
        assert res.converged and res.nnz == 16

    def test_hits_target_and_brackets(self, rng):
        spec = random_spec(rng, 6, 10)
        cfg = PalmConfig(max_iters=1000)
        res = bisect_l1_threshold(spec, 9, tol_nnz=0, palm_config=cfg)
        assert res.converged
        assert abs(res.nnz - 9) == 0
        lo, hi = res.bracket_nnz
        assert lo <= res.nnz <= hi
        assert count_nonzeros(res.report.estimate) == res.nnz

    def test_gp_route(self, rng):
        spec = random_spec(rng, 5, 10)
        res = bisect_l1_threshold(spec, 6, tol_nnz=1, solver="gp")
        assert res.converged and abs(res.nnz - 6) <= 1
        assert res.report.solver == "gp"

    def test_bad_args(self, rng):
        spec = random_spec(rng, 3, 6)
        with pytest.raises(ValueError):
            bisect_l1_threshold(spec, 0)
        with pytest.raises(ValueError):
            bisect_l1_threshold(spec, 3, interval=(2.0, 1.0))


class TestCrossValidation:
    @pytest.fixture
    def data(self):
        m = generate_sparse_stable(20, 80, 0.9, seed=3)
        train = simulate(m, np.zeros(20), 60, seed=4)
        steady = sample_steady_state(m, 200, seed=5)
        return train, steady

    def test_single_cell(self, data):
        res = cross_validate(*data, Constraint.cardinality(80), [1.0], [1.0],
                             palm_config=PalmConfig(max_iters=50))
        assert (res.best["rho1"], res.best["sigma"]) == (1.0, 1.0)

    @pytest.mark.parametrize("metric", ["normalized_error", "cosine_score"])
    def test_grid_argmin(self, data, metric, tmp_path):
        res = cross_validate(*data, Constraint.cardinality(80), [0.1, 1.0, 10.0], [0.5, 1.0, 2.0],
                             metric=metric, palm_config=PalmConfig(max_iters=100))
        vals = [r["value"] for r in res.table]
        assert len(vals) == 9 and all(np.isfinite(vals))
        target = min(vals) if metric == "normalized_error" else max(vals)
        assert res.best["value"] == target
        assert res.best is res.table[vals.index(target)]
        res.write_csv(tmp_path / "cv.csv")
        lines = open(tmp_path / "cv.csv").read().splitlines()
        assert lines[0] == "rho1,sigma,metric,value,status" and len(lines) == 10

    def test_folds(self, data):
        res = cross_validate(*data, Constraint.rank(5), [1.0], [1.0, 2.0], folds=3,
                             palm_config=PalmConfig(max_iters=30))
        assert len(res.table) == 2

    def test_failed_cell_marked(self, data):
        # a cardinality above p^2 fails every cell, which is the only fatal case
        with pytest.raises(RuntimeError, match="every"):
            cross_validate(*data, Constraint.cardinality(401), [1.0], [1.0])

    def test_rejects_short_series(self):
        short = TimeSeriesData(np.ones((2, 3)))
        with pytest.raises(ValueError):
            cross_validate(short, np.ones((2, 5)), Constraint.rank(1), [1.0], [1.0])
