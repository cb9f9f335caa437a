"""Proximal alternating linearized minimization for the split problem."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .objective import (
    ProblemSpec,
    f_value,
    grad_x_h,
    grad_y_h,
    h_value,
    lipschitz_x,
    lipschitz_y,
)
from .proximal import Constraint, prox_x, prox_y

__all__ = [
    "PalmConfig",
    "IterateState",
    "SolveReport",
    "default_init",
    "palm_solve",
    "sufficient_decrease_margin",
    "write_trace_csv",
]

CONVERGED = "converged"
MAX_ITERS = "max_iters"
MONOTONICITY_VIOLATION = "monotonicity_violation"
BACKTRACK_FAILURE = "backtrack_failure"

TRACE_FIELDS = ("iter", "phi", "e_x", "e_y", "e_xy", "c_k", "d_k")
_DENSE_TRACE_UNTIL = 1000
_TRACE_STRIDE = 10


@dataclass(frozen=True)
class PalmConfig:
    gamma1: float = 2.0
    gamma2: float = 2.0
    max_iters: int = 5000
    tol_step: float = 1e-5
    # reported against e_xy in the summary, never used to stop
    tol_couple: float = 1e-7
    assert_monotone: bool = True
    monotone_rtol: float = 1e-9

    def __post_init__(self):
        if not (self.gamma1 > 1 and self.gamma2 > 1):
            raise ValueError("gamma1 and gamma2 must exceed 1")
        if self.max_iters < 1 or self.tol_step < 0:
            raise ValueError("max_iters must be >= 1 and tol_step >= 0")


@dataclass
class IterateState:
    """Summary of iterate ``k``.

    ``phi`` is evaluated at ``(X^k, Y^k)``; ``e_x``, ``e_y`` are the lengths
    of the step to iterate ``k+1``; ``e_xy = ||X^k - Y^k||_F``; ``c_k`` and
    ``d_k`` are the proximal weights used for that step. ``margin`` is the
    sufficient-decrease margin of the step.
    """

    iter: int
    phi: float
    e_x: float
    e_y: float
    e_xy: float
    c_k: float
    d_k: float
    margin: float = np.nan

    def row(self):
        return [self.iter, self.phi, self.e_x, self.e_y, self.e_xy, self.c_k, self.d_k]


@dataclass
class SolveReport:
    estimate: np.ndarray
    status: str
    trace: list
    iters: int
    final_phi: float
    wall_time: float
    delta_min: float = np.nan
    x: np.ndarray | None = None
    projections: int = 0
    solver: str = "palm"
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def last(self):
        return self.trace[-1] if self.trace else None

    def summary(self) -> dict:
        out = {
            "solver": self.solver,
            "status": self.status,
            "iters": self.iters,
            "final_phi": self.final_phi,
            "wall_time_s": self.wall_time,
            "projections": self.projections,
        }
        last = self.last
        if isinstance(last, IterateState):
            out.update(e_x=last.e_x, e_y=last.e_y, e_xy=last.e_xy, delta_min=self.delta_min)
        out.update(self.diagnostics)
        return out


def default_init(spec: ProblemSpec, constraint: Constraint):
    """Ridge least-squares start and its projection onto the constraint."""
    c, d = spec.c, spec.d
    p = spec.p
    cct = c @ c.T
    eps = 1e-6 * np.trace(cct) / p
    if eps <= 0:
        x0 = np.zeros((p, p))
    else:
        x0 = np.linalg.solve(cct + eps * np.eye(p), c @ d.T).T
    return x0, constraint.project(x0)


def sufficient_decrease_margin(prev_phi, next_phi, step_sq, q1_minus, q2_minus, config: PalmConfig):
    """``Phi(Z^k) - Phi(Z^{k+1}) - delta/2 ||Z^{k+1} - Z^k||^2``.

    ``delta = min((gamma1 - 1) q1_minus, (gamma2 - 1) q2_minus)``; a
    correct PALM step keeps this nonnegative up to roundoff.
    """
    delta = min((config.gamma1 - 1) * q1_minus, (config.gamma2 - 1) * q2_minus)
    return (prev_phi - next_phi) - 0.5 * delta * step_sq


def _keep_in_trace(k):
    return k <= _DENSE_TRACE_UNTIL or k % _TRACE_STRIDE == 0


def palm_solve(spec: ProblemSpec, constraint: Constraint, init=None, config: PalmConfig | None = None,
               callback=None) -> SolveReport:
    """Run PALM on ``f(X) + g(Y) + H(X, Y)``.

    Parameters
    ----------
    spec : ProblemSpec
    constraint : Constraint
        Feasible set for the ``Y`` block.
    init : tuple of (p, p) ndarray, optional
        Starting point ``(X0, Y0)``; ``Y0`` is projected if infeasible.
        Defaults to :func:`default_init`.
    config : PalmConfig, optional
    callback : callable, optional
        Called as ``callback(k, x, y)`` after every step.

    Returns
    -------
    SolveReport
        ``estimate`` is the final ``Y`` block, which is always feasible.

    Raises
    ------
    FloatingPointError
        If an iterate becomes non-finite.
    """
    config = config or PalmConfig()
    p = spec.p
    constraint.check_dimension(p)
    if init is None:
        x, y = default_init(spec, constraint)
    else:
        x = np.array(init[0], dtype=float)
        y = np.array(init[1], dtype=float)
        if not constraint.contains(y):
            y = constraint.project(y)
    t0 = time.perf_counter()

    phi = f_value(spec, x) + h_value(spec, x, y)
    trace = []
    q1_min = q2_min = np.inf
    delta_min = np.inf
    margin_min = np.inf
    status = MAX_ITERS
    projections = 0
    k = 0
    for k in range(config.max_iters):
        l1 = lipschitz_x(spec, y)
        ck = config.gamma1 * l1
        u = x - grad_x_h(spec, x, y) / ck
        x_new = prox_x(spec, u, ck)

        l2 = lipschitz_y(spec, x_new)
        dk = config.gamma2 * l2
        v = y - grad_y_h(spec, x_new, y) / dk
        y_new = prox_y(v, dk, constraint)
        projections += 1

        if not (np.all(np.isfinite(x_new)) and np.all(np.isfinite(y_new))):
            raise FloatingPointError(f"non-finite PALM iterate at k={k + 1}")

        phi_new = f_value(spec, x_new) + h_value(spec, x_new, y_new)
        e_x = float(np.linalg.norm(x_new - x))
        e_y = float(np.linalg.norm(y_new - y))
        e_xy = float(np.linalg.norm(x - y))

        q1_min = min(q1_min, l1)
        q2_min = min(q2_min, l2)
        delta_min = min(config.gamma1 - 1, config.gamma2 - 1) * min(q1_min, q2_min)
        margin = sufficient_decrease_margin(phi, phi_new, e_x**2 + e_y**2, q1_min, q2_min, config)
        margin_min = min(margin_min, margin)

        state = IterateState(k, phi, e_x, e_y, e_xy, ck, dk, margin)
        if _keep_in_trace(k):
            trace.append(state)
        if callback is not None:
            callback(k, x_new, y_new)

        slack = config.monotone_rtol * (1.0 + abs(phi))
        if config.assert_monotone and (phi_new > phi + slack or margin < -slack):
            if trace[-1] is not state:
                trace.append(state)
            status = MONOTONICITY_VIOLATION
            x, y, phi = x_new, y_new, phi_new
            break

        x, y, phi = x_new, y_new, phi_new
        if max(e_x, e_y) <= config.tol_step:
            if trace[-1] is not state:
                trace.append(state)
            status = CONVERGED
            break

    return SolveReport(
        estimate=y,
        status=status,
        trace=trace,
        iters=k + 1,
        final_phi=phi,
        wall_time=time.perf_counter() - t0,
        delta_min=delta_min,
        x=x,
        projections=projections,
        solver="palm",
        diagnostics={"margin_min": margin_min, "final_e_xy": float(np.linalg.norm(x - y)),
                     "constraint": constraint.to_dict()},
    )


def write_trace_csv(report: SolveReport, path):
    """Write the iterate trace with full float precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if report.solver == "palm":
            w.writerow(TRACE_FIELDS)
        else:
            from .gp import GP_TRACE_FIELDS

            w.writerow(GP_TRACE_FIELDS)
        for st in report.trace:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else int(v) for v in st.row()])
