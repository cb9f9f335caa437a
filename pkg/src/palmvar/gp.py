"""Gradient projection with the Armijo rule along the projection arc.

Baseline solver for the single-variable problem ``min F(X)`` over a convex
set (l1 or nuclear-norm ball). Every trial step costs one projection, which
is what :func:`projection_count` reports.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .objective import ProblemSpec, full_gradient, full_objective
from .palm import BACKTRACK_FAILURE, CONVERGED, MAX_ITERS, SolveReport
from .proximal import Constraint

__all__ = ["GpConfig", "GpStep", "gp_solve", "projection_count", "GP_TRACE_FIELDS"]

GP_TRACE_FIELDS = ("iter", "f_value", "step_size", "backtracks", "projections_cum")


@dataclass(frozen=True)
class GpConfig:
    armijo_sigma: float = 0.1
    armijo_beta: float = 0.5
    initial_step: float = 1.0
    max_backtracks: int = 50
    max_iters: int = 5000
    tol_step: float = 1e-5

    def __post_init__(self):
        if not 0 < self.armijo_sigma < 1 or not 0 < self.armijo_beta < 1:
            raise ValueError("armijo_sigma and armijo_beta must lie in (0, 1)")
        if self.initial_step <= 0 or self.max_backtracks < 0 or self.max_iters < 1:
            raise ValueError("invalid GP step or iteration limits")


@dataclass
class GpStep:
    iter: int
    f_value: float
    step_size: float
    backtracks: int
    projections_cum: int
    e_x: float = np.nan

    def row(self):
        return [self.iter, self.f_value, self.step_size, self.backtracks, self.projections_cum]


def gp_solve(spec: ProblemSpec, constraint: Constraint, init=None, config: GpConfig | None = None,
             callback=None) -> SolveReport:
    """Projected gradient descent ``X+ = P(X - a grad F(X))`` with Armijo backtracking.

    The step ``a = initial_step * beta**m`` uses the smallest ``m`` with
    ``F(X) - F(X+) >= sigma <grad F(X), X - X+>``. The step restarts from
    ``initial_step`` at every iteration. ``callback(k, x)`` is called with
    every accepted iterate.

    Raises
    ------
    ValueError
        For a nonconvex constraint.
    """
    if not constraint.convex:
        raise ValueError(f"gradient projection needs a convex constraint, got {constraint.kind}")
    config = config or GpConfig()
    t0 = time.perf_counter()
    x = np.zeros((spec.p, spec.p)) if init is None else np.array(init, dtype=float)
    x = constraint.project(x)
    projections = 1
    fx = full_objective(spec, x)
    trace = []
    status = MAX_ITERS
    iters = 0
    for k in range(config.max_iters):
        g = full_gradient(spec, x)
        alpha = config.initial_step
        accepted = False
        for m in range(config.max_backtracks + 1):
            x_new = constraint.project(x - alpha * g)
            projections += 1
            f_new = full_objective(spec, x_new)
            decrease = float(np.vdot(g, x - x_new))
            if np.isfinite(f_new) and fx - f_new >= config.armijo_sigma * decrease:
                accepted = True
                break
            alpha *= config.armijo_beta
        if not accepted:
            status = BACKTRACK_FAILURE
            trace.append(GpStep(k, fx, alpha, m, projections))
            break
        e_x = float(np.linalg.norm(x_new - x))
        trace.append(GpStep(k, f_new, alpha, m, projections, e_x))
        x, fx = x_new, f_new
        iters = k + 1
        if callback is not None:
            callback(k, x)
        if e_x <= config.tol_step:
            status = CONVERGED
            break
    return SolveReport(
        estimate=x,
        status=status,
        trace=trace,
        iters=iters,
        final_phi=fx,
        wall_time=time.perf_counter() - t0,
        x=x,
        projections=projections,
        solver="gp",
        diagnostics={"constraint": constraint.to_dict()},
    )


def projection_count(report: SolveReport) -> int:
    """Total projections performed by a solve, backtracking trials included."""
    return int(report.projections)
