"""Objective terms, gradients and Lipschitz constants.

Two formulations share one :class:`ProblemSpec`:

* the split form used by PALM, ``Phi(X, Y) = f(X) + g(Y) + H(X, Y)`` with

  .. math::
     f(X) = \\tfrac12 \\|XC - D\\|_F^2, \\qquad
     H(X, Y) = \\tfrac{\\rho_1}{2}\\|Y S X^T + Q - S\\|_F^2
             + \\tfrac{\\rho_2}{2}\\|X - Y\\|_F^2
             + \\tfrac{\\mu}{2}\\|Y X^T\\|_F^2,

* the single-variable form used by gradient projection,

  .. math::
     F(X) = \\tfrac12 \\|XC - D\\|_F^2 + \\tfrac{\\rho_1}{2}\\|X S X^T + Q - S\\|_F^2
          + \\tfrac{\\mu}{2}\\|X X^T\\|_F^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model_data import SteadyStateData, TimeSeriesData, sample_covariance

__all__ = [
    "ProblemSpec",
    "f_value",
    "h_value",
    "phi_value",
    "grad_x_h",
    "grad_y_h",
    "lipschitz_x",
    "lipschitz_y",
    "full_objective",
    "full_gradient",
]

_SYM_TOL = 1e-12


def _is_symmetric(m):
    return np.linalg.norm(m - m.T) <= _SYM_TOL * max(np.linalg.norm(m), 1.0)


@dataclass(frozen=True)
class ProblemSpec:
    """Fixed data of the estimation problem.

    Attributes
    ----------
    c, d : (p, n-1) ndarray
        Lagged and led states of the training series.
    s_cov : (p, p) ndarray
        Sample covariance of the steady-state data.
    q : (p, p) ndarray
        Noise covariance used in the Lyapunov penalty.
    rho1 : float
        Weight of the Lyapunov penalty.
    rho2 : float
        Weight of the ``X = Y`` coupling term (PALM only).
    mu : float
        Weight of the stability penalty ``||X X^T||_F^2``; 0 disables it.
    """

    c: np.ndarray
    d: np.ndarray
    s_cov: np.ndarray
    q: np.ndarray
    rho1: float
    rho2: float
    mu: float = 0.0

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        d = np.array(self.d, dtype=float)
        s = np.array(self.s_cov, dtype=float)
        q = np.array(self.q, dtype=float)
        if c.ndim != 2 or c.shape != d.shape:
            raise ValueError(f"c and d must share a 2-d shape, got {c.shape} and {d.shape}")
        p = c.shape[0]
        if s.shape != (p, p) or q.shape != (p, p):
            raise ValueError(f"s_cov and q must be {p} x {p}")
        if not (_is_symmetric(s) and _is_symmetric(q)):
            raise ValueError("s_cov and q must be symmetric")
        # rho1 = 0 is allowed: it reduces the model to plain least squares
        if self.rho1 < 0 or self.rho2 <= 0 or self.mu < 0:
            raise ValueError(
                f"need rho1 >= 0, rho2 > 0, mu >= 0; got {self.rho1}, {self.rho2}, {self.mu}"
            )
        for name, val in (("c", c), ("d", d), ("s_cov", s), ("q", q)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "rho1", float(self.rho1))
        object.__setattr__(self, "rho2", float(self.rho2))
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def p(self) -> int:
        return self.c.shape[0]

    @property
    def q_minus_s(self) -> np.ndarray:
        return self.q - self.s_cov

    @classmethod
    def from_data(cls, train, steady, rho1, sigma=1.0, rho2=None, mu=0.0, q=None):
        """Build a problem from a training series and steady-state samples.

        ``q`` defaults to ``sigma**2 I``. ``rho2`` defaults to
        ``rho1 * ||S||_F**2`` (or ``||S||_F**2`` when ``rho1 == 0``).
        """
        if not isinstance(train, TimeSeriesData):
            train = TimeSeriesData(train)
        if not isinstance(steady, SteadyStateData):
            steady = SteadyStateData(steady)
        s = sample_covariance(steady)
        p = train.p
        if q is None:
            q = sigma**2 * np.eye(p)
        if rho2 is None:
            rho2 = default_rho2(s, rho1)
        return cls(train.c, train.d, s, q, rho1, rho2, mu)


def default_rho2(s_cov, rho1) -> float:
    """Coupling weight matched to the scale of the Lyapunov term."""
    scale = float(np.linalg.norm(s_cov)) ** 2
    return (rho1 if rho1 > 0 else 1.0) * max(scale, 1e-12)


def f_value(spec: ProblemSpec, x) -> float:
    r = x @ spec.c - spec.d
    return 0.5 * float(np.vdot(r, r))


def lyapunov_residual(spec: ProblemSpec, x, y) -> np.ndarray:
    """``Y S X^T + Q - S``."""
    return y @ spec.s_cov @ x.T + spec.q_minus_s


def h_value(spec: ProblemSpec, x, y) -> float:
    r = lyapunov_residual(spec, x, y)
    val = 0.5 * spec.rho1 * float(np.vdot(r, r))
    diff = x - y
    val += 0.5 * spec.rho2 * float(np.vdot(diff, diff))
    if spec.mu:
        yx = y @ x.T
        val += 0.5 * spec.mu * float(np.vdot(yx, yx))
    return val


def phi_value(spec: ProblemSpec, constraint, x, y) -> float:
    """``f(X) + H(X, Y)`` when ``Y`` is feasible, ``inf`` otherwise."""
    if not constraint.contains(y):
        return np.inf
    return f_value(spec, x) + h_value(spec, x, y)


def grad_x_h(spec: ProblemSpec, x, y) -> np.ndarray:
    s = spec.s_cov
    ys = y @ s
    g = spec.rho1 * (x @ (ys.T @ ys) + spec.q_minus_s.T @ ys)
    g += spec.rho2 * (x - y)
    if spec.mu:
        g += spec.mu * x @ (y.T @ y)
    return g


def grad_y_h(spec: ProblemSpec, x, y) -> np.ndarray:
    s = spec.s_cov
    xs = x @ s.T
    g = spec.rho1 * (y @ (s @ x.T @ xs) + spec.q_minus_s @ xs)
    g += spec.rho2 * (y - x)
    if spec.mu:
        g += spec.mu * y @ (x.T @ x)
    return g


def lipschitz_x(spec: ProblemSpec, y) -> float:
    """Frobenius-norm bound on the Lipschitz constant of ``X -> grad_x_h(X, Y)``."""
    ys = y @ spec.s_cov
    m = spec.rho1 * (ys.T @ ys)
    if spec.mu:
        m += spec.mu * (y.T @ y)
    m[np.diag_indices_from(m)] += spec.rho2
    return float(np.linalg.norm(m))


def lipschitz_y(spec: ProblemSpec, x) -> float:
    """Frobenius-norm bound on the Lipschitz constant of ``Y -> grad_y_h(X, Y)``."""
    xs = x @ spec.s_cov.T
    m = spec.rho1 * (xs.T @ xs)
    if spec.mu:
        m += spec.mu * (x.T @ x)
    m[np.diag_indices_from(m)] += spec.rho2
    return float(np.linalg.norm(m))


def full_objective(spec: ProblemSpec, x) -> float:
    r = x @ spec.s_cov @ x.T + spec.q_minus_s
    val = f_value(spec, x) + 0.5 * spec.rho1 * float(np.vdot(r, r))
    if spec.mu:
        xx = x @ x.T
        val += 0.5 * spec.mu * float(np.vdot(xx, xx))
    return val


def full_gradient(spec: ProblemSpec, x) -> np.ndarray:
    """Gradient of :func:`full_objective`; relies on symmetric ``S`` and ``Q``."""
    s = spec.s_cov
    r = x @ s @ x.T + spec.q_minus_s
    g = (x @ spec.c - spec.d) @ spec.c.T + 2.0 * spec.rho1 * (r @ x @ s)
    if spec.mu:
        g += 2.0 * spec.mu * (x @ x.T) @ x
    return g
