"""Test-set metrics, l1-radius bisection and hyperparameter search."""

from __future__ import annotations

import csv
import itertools
import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .gp import gp_solve
from .model_data import SteadyStateData, TimeSeriesData, sample_covariance
from .objective import ProblemSpec, default_rho2
from .palm import palm_solve
from .proximal import Constraint

__all__ = [
    "EvalResult",
    "DegenerateStepWarning",
    "normalized_error",
    "cosine_score",
    "evaluate",
    "count_nonzeros",
    "bisect_l1_threshold",
    "BisectionResult",
    "cross_validate",
    "CrossValidationResult",
]

log = logging.getLogger(__name__)


class DegenerateStepWarning(RuntimeWarning):
    """A test step had a zero-norm factor and was left out of the average."""


@dataclass(frozen=True)
class EvalResult:
    normalized_error: float
    cosine_score: float
    test_length: int
    skipped_terms: int = 0

    def to_dict(self):
        return {
            "normalized_error": self.normalized_error,
            "cosine_score": self.cosine_score,
            "m": self.test_length,
            "skipped_terms": self.skipped_terms,
        }


def _states(test):
    x = test.states if isinstance(test, TimeSeriesData) else np.asarray(test, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValueError("test data must be a p x m matrix with m >= 2")
    return x


def _check_shapes(estimate, x):
    estimate = np.asarray(estimate, dtype=float)
    if estimate.shape != (x.shape[0], x.shape[0]):
        raise ValueError(f"estimate shape {estimate.shape} does not match state dimension {x.shape[0]}")
    return estimate


def _mean_skipping(num, den, what):
    ok = den > 0
    skipped = int(np.count_nonzero(~ok))
    if skipped:
        warnings.warn(f"{what}: skipped {skipped} degenerate test step(s)", DegenerateStepWarning,
                      stacklevel=3)
    if not np.any(ok):
        return math.nan, skipped
    return float(np.mean(num[ok] / den[ok])), skipped


def _normalized_error(estimate, x):
    num = np.linalg.norm(x[:, 1:] - estimate @ x[:, :-1], axis=0)
    den = np.linalg.norm(x[:, 1:] - x[:, :-1], axis=0)
    return _mean_skipping(num, den, "normalized error")


def _cosine_score(estimate, x):
    change = x[:, 1:] - x[:, :-1]
    resid = x[:, :-1] - estimate @ x[:, :-1]
    num = np.abs(np.einsum("ij,ij->j", change, resid))
    den = np.linalg.norm(change, axis=0) * np.linalg.norm(resid, axis=0)
    return _mean_skipping(num, den, "cosine score")


def normalized_error(estimate, test) -> float:
    """Mean of ``||x(t+1) - A x(t)|| / ||x(t+1) - x(t)||`` over the test series.

    Lower is better; ``estimate = I`` scores exactly 1.
    """
    x = _states(test)
    return _normalized_error(_check_shapes(estimate, x), x)[0]


def cosine_score(estimate, test) -> float:
    """Mean absolute cosine between ``x(t+1) - x(t)`` and ``x(t) - A x(t)``. Higher is better."""
    x = _states(test)
    return _cosine_score(_check_shapes(estimate, x), x)[0]


def evaluate(estimate, test) -> EvalResult:
    x = _states(test)
    estimate = _check_shapes(estimate, x)
    ne, sk1 = _normalized_error(estimate, x)
    cs, sk2 = _cosine_score(estimate, x)
    return EvalResult(ne, cs, x.shape[1], max(sk1, sk2))


def count_nonzeros(a, rel_tol=1e-8) -> int:
    """Entries with ``|a_ij| > rel_tol * max |a_ij|``."""
    a = np.abs(np.asarray(a))
    top = a.max() if a.size else 0.0
    if top == 0.0:
        return 0
    return int(np.count_nonzero(a > rel_tol * top))


@dataclass
class BisectionResult:
    radius: float
    report: object
    nnz: int
    converged: bool
    bracket: tuple
    bracket_nnz: tuple
    rounds: int
    history: list


def _solve_l1(spec, radius, solver, palm_config, gp_config, init):
    con = Constraint.l1_ball(radius)
    if solver == "palm":
        x0 = None if init is None else (init, init)
        return palm_solve(spec, con, init=x0, config=palm_config)
    if solver == "gp":
        return gp_solve(spec, con, init=init, config=gp_config)
    raise ValueError(f"unknown solver {solver!r}")


def bisect_l1_threshold(spec: ProblemSpec, target_nnz: int, interval=None, tol_nnz: int = 0,
                        max_rounds: int = 40, solver: str = "palm", palm_config=None, gp_config=None,
                        init=None, max_widen: int = 20) -> BisectionResult:
    """Find an l1 radius whose solution has ``target_nnz`` nonzeros (within ``tol_nnz``).

    Each probe solves the l1-constrained problem with ``solver`` and counts
    nonzeros of the estimate with :func:`count_nonzeros`. The bracket
    ``[low, up]`` must satisfy ``nnz(low) <= target <= nnz(up)``; it is
    widened geometrically until it does.

    Raises
    ------
    RuntimeError
        If no valid bracket is found after ``max_widen`` widenings.
    """
    p = spec.p
    if not 1 <= target_nnz <= p * p:
        raise ValueError(f"target_nnz must lie in [1, {p * p}]")
    history = []
    cache = {}

    def probe(radius):
        if radius not in cache:
            rep = _solve_l1(spec, radius, solver, palm_config, gp_config, init)
            nnz = count_nonzeros(rep.estimate)
            cache[radius] = (nnz, rep)
            history.append((radius, nnz))
            log.debug("l1 radius %.6g -> %d nonzeros", radius, nnz)
        return cache[radius]

    if interval is None:
        interval = (1e-3, 10.0 * p)
    low, up = map(float, interval)
    if not 0 < low < up:
        raise ValueError("interval must satisfy 0 < low < up")

    for _ in range(max_widen):
        n_low = probe(low)[0]
        if n_low <= target_nnz:
            break
        low /= 10.0
    else:
        raise RuntimeError(f"could not find a lower l1 radius giving <= {target_nnz} nonzeros")
    for _ in range(max_widen):
        n_up = probe(up)[0]
        if n_up >= target_nnz:
            break
        low, up = up, up * 10.0
    else:
        raise RuntimeError(f"could not find an upper l1 radius giving >= {target_nnz} nonzeros")

    def result(radius, converged, rounds):
        nnz, rep = probe(radius)
        return BisectionResult(radius, rep, nnz, converged, (low, up),
                               (probe(low)[0], probe(up)[0]), rounds, history)

    for radius in (low, up):
        if abs(probe(radius)[0] - target_nnz) <= tol_nnz:
            return result(radius, True, 0)

    for rnd in range(1, max_rounds + 1):
        mid = 0.5 * (low + up)
        nnz = probe(mid)[0]
        if abs(nnz - target_nnz) <= tol_nnz:
            return result(mid, True, rnd)
        if nnz < target_nnz:
            low = mid
        else:
            up = mid

    best = min((low, up), key=lambda r: abs(probe(r)[0] - target_nnz))
    return result(best, False, max_rounds)


@dataclass
class CrossValidationResult:
    best: dict
    table: list

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rho1", "sigma", "metric", "value", "status"])
            for row in self.table:
                w.writerow([repr(row["rho1"]), repr(row["sigma"]), row["metric"],
                            repr(row["value"]), row["status"]])


def cross_validate(train: TimeSeriesData, steady: SteadyStateData, constraint: Constraint,
                   rho1_grid, sigma_grid, metric="normalized_error", holdout=0.25, folds=None,
                   solver="palm", palm_config=None, gp_config=None, rho2=None, mu=0.0):
    """Grid search over ``(rho1, sigma)`` with validation on held-out data.

    The default scheme fits on the first ``1 - holdout`` fraction of the
    training series and scores on the rest (chronological, no shuffling).
    With ``folds=k`` the series is cut into ``k`` contiguous blocks and each
    block serves once as validation set; scores are averaged.

    Returns
    -------
    CrossValidationResult
        ``best`` is the first grid cell (in grid order) attaining the best
        score; cells whose fit raised are marked ``failed`` and skipped.
    """
    if metric not in ("normalized_error", "cosine_score"):
        raise ValueError(f"unknown metric {metric!r}")
    rho1_grid = list(rho1_grid)
    sigma_grid = list(sigma_grid)
    if not rho1_grid or not sigma_grid:
        raise ValueError("grids must be nonempty")
    splits = _splits(train, holdout, folds)
    s_cov = sample_covariance(steady)
    p = train.p

    table = []
    for rho1, sigma in itertools.product(rho1_grid, sigma_grid):
        scores = []
        status = "ok"
        try:
            for c, d, val_part in splits:
                r2 = default_rho2(s_cov, rho1) if rho2 is None else rho2
                spec = ProblemSpec(c, d, s_cov, sigma**2 * np.eye(p), rho1, r2, mu)
                if solver == "palm":
                    rep = palm_solve(spec, constraint, config=palm_config)
                else:
                    rep = gp_solve(spec, constraint, config=gp_config)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DegenerateStepWarning)
                    res = evaluate(rep.estimate, val_part)
                scores.append(getattr(res, metric))
            value = float(np.mean(scores))
            if not np.isfinite(value):
                status = "failed"
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            log.warning("cross-validation cell rho1=%g sigma=%g failed: %s", rho1, sigma, exc)
            value = math.nan
            status = "failed"
        table.append({"rho1": float(rho1), "sigma": float(sigma), "metric": metric,
                      "value": value, "status": status})

    ok = [row for row in table if row["status"] == "ok"]
    if not ok:
        raise RuntimeError("every cross-validation cell failed")
    sign = 1.0 if metric == "normalized_error" else -1.0
    best = min(ok, key=lambda row: sign * row["value"])
    return CrossValidationResult(best=best, table=table)


def _splits(train, holdout, folds):
    """List of ``(C, D, validation series)``; transition pairs never straddle a held-out block."""
    x = train.states
    n = train.n
    if folds is None:
        n_fit = int(round(n * (1 - holdout)))
        if n_fit < 2 or n - n_fit < 2:
            raise ValueError(f"series of length {n} too short for a {holdout:.2f} holdout")
        fit, val = train.split(n_fit)
        return [(fit.c, fit.d, val)]
    if folds < 2 or n // folds < 2:
        raise ValueError(f"cannot cut a series of length {n} into {folds} folds")
    edges = np.linspace(0, n, folds + 1).astype(int)
    out = []
    for i in range(folds):
        lo, hi = edges[i], edges[i + 1]
        pieces = [x[:, :lo], x[:, hi:]]
        c = np.hstack([seg[:, :-1] for seg in pieces if seg.shape[1] >= 2])
        d = np.hstack([seg[:, 1:] for seg in pieces if seg.shape[1] >= 2])
        out.append((c, d, TimeSeriesData(x[:, lo:hi])))
    return out
