"""Proximal operators: the least-squares X-update and constraint projections."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .model_data import numerical_rank

__all__ = [
    "Constraint",
    "prox_x",
    "prox_x_direct",
    "prox_x_woodbury",
    "project_cardinality",
    "project_rank",
    "project_l1_ball",
    "l1_threshold",
    "project_nuclear_ball",
    "prox_y",
]

KINDS = ("cardinality", "rank", "l1_ball", "nuclear_ball")
_NORM_SLACK = 1e-12


@dataclass(frozen=True)
class Constraint:
    """One of the four low-complexity constraint sets.

    ``bound`` is the maximum number of nonzeros (``cardinality``), the maximum
    rank (``rank``), or the radius of the ball (``l1_ball``, ``nuclear_ball``).
    """

    kind: str
    bound: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("cardinality", "rank"):
            if int(self.bound) != self.bound or self.bound < 1:
                raise ValueError(f"{self.kind} bound must be a positive integer, got {self.bound}")
            object.__setattr__(self, "bound", int(self.bound))
        elif not self.bound > 0:
            raise ValueError(f"{self.kind} radius must be positive, got {self.bound}")

    @classmethod
    def cardinality(cls, s):
        return cls("cardinality", s)

    @classmethod
    def rank(cls, r):
        return cls("rank", r)

    @classmethod
    def l1_ball(cls, radius):
        return cls("l1_ball", radius)

    @classmethod
    def nuclear_ball(cls, radius):
        return cls("nuclear_ball", radius)

    @property
    def convex(self) -> bool:
        return self.kind in ("l1_ball", "nuclear_ball")

    def check_dimension(self, p):
        if self.kind == "cardinality" and self.bound > p * p:
            raise ValueError(f"cardinality bound {self.bound} exceeds p^2 = {p * p}")
        if self.kind == "rank" and self.bound > p:
            raise ValueError(f"rank bound {self.bound} exceeds p = {p}")

    def contains(self, y) -> bool:
        y = np.asarray(y)
        if self.kind == "cardinality":
            return int(np.count_nonzero(y)) <= self.bound
        if self.kind == "rank":
            return numerical_rank(y) <= self.bound
        if self.kind == "l1_ball":
            return float(np.abs(y).sum()) <= self.bound * (1 + _NORM_SLACK) + _NORM_SLACK
        sv = np.linalg.svd(y, compute_uv=False)
        return float(sv.sum()) <= self.bound * (1 + _NORM_SLACK) + 1e-10

    def project(self, v) -> np.ndarray:
        if self.kind == "cardinality":
            return project_cardinality(v, self.bound)
        if self.kind == "rank":
            return project_rank(v, self.bound)
        if self.kind == "l1_ball":
            return project_l1_ball(v, self.bound)
        return project_nuclear_ball(v, self.bound)

    def to_dict(self):
        return {"kind": self.kind, "bound": self.bound}


def prox_x_direct(spec, u, ck):
    """Minimize ``1/2 ||XC - D||^2 + ck/2 ||X - U||^2`` via ``X (CC^T + ck I) = DC^T + ck U``."""
    c, d = spec.c, spec.d
    if ck <= 0:
        raise ValueError("ck must be positive")
    p = c.shape[0]
    lhs = c @ c.T + ck * np.eye(p)
    rhs = d @ c.T + ck * u
    # lhs is SPD and symmetric: X lhs = rhs  <=>  lhs X^T = rhs^T
    return la.solve(lhs, rhs.T, assume_a="pos").T


def prox_x_woodbury(spec, u, ck):
    """Same minimizer as :func:`prox_x_direct`, inverting an (n-1) x (n-1) system instead."""
    c, d = spec.c, spec.d
    if ck <= 0:
        raise ValueError("ck must be positive")
    m = c.shape[1]
    w = (d @ c.T) / ck + u
    small = ck * np.eye(m) + c.T @ c
    wc = w @ c
    return w - la.solve(small, wc.T, assume_a="pos").T @ c.T


def prox_x(spec, u, ck):
    """Branch on problem shape: direct form when ``p <= n - 1``, Woodbury otherwise."""
    if spec.c.shape[0] <= spec.c.shape[1]:
        return prox_x_direct(spec, u, ck)
    return prox_x_woodbury(spec, u, ck)


def project_cardinality(v, s):
    """Keep the ``s`` entries of largest magnitude; ties go to the smaller row-major index."""
    v = np.asarray(v, dtype=float)
    flat = v.reshape(-1)
    if s >= flat.size:
        return v.copy()
    order = np.argsort(-np.abs(flat), kind="stable")
    out = np.zeros_like(flat)
    keep = order[:s]
    out[keep] = flat[keep]
    return out.reshape(v.shape)


def project_rank(v, r):
    """Best rank-``r`` approximation in Frobenius norm (truncated SVD)."""
    v = np.asarray(v, dtype=float)
    if r >= min(v.shape):
        return v.copy()
    u, sv, vt = np.linalg.svd(v, full_matrices=False)
    return (u[:, :r] * sv[:r]) @ vt[:r]


def l1_threshold(v, radius):
    """Soft threshold ``theta >= 0`` of the Euclidean projection onto the l1 ball.

    Returns 0 when ``v`` is already inside the ball.
    """
    a = np.abs(np.asarray(v, dtype=float)).reshape(-1)
    if a.sum() <= radius:
        return 0.0
    mu = np.sort(a)[::-1]
    cssv = np.cumsum(mu) - radius
    ind = np.arange(1, a.size + 1)
    rho = np.nonzero(mu * ind > cssv)[0][-1]
    return float(cssv[rho] / (rho + 1))


def project_l1_ball(v, radius, return_threshold=False):
    """Euclidean projection onto ``{Y : sum |Y_ij| <= radius}`` by the sort-based method."""
    v = np.asarray(v, dtype=float)
    theta = l1_threshold(v, radius)
    if theta == 0.0:
        out = v.copy()
    else:
        out = np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)
    return (out, theta) if return_threshold else out


def project_nuclear_ball(v, radius):
    """Projection onto the nuclear-norm ball: l1-project the singular values."""
    v = np.asarray(v, dtype=float)
    u, sv, vt = np.linalg.svd(v, full_matrices=False)
    if sv.sum() <= radius:
        return v.copy()
    sv = project_l1_ball(sv, radius)
    return (u * sv) @ vt


def prox_y(v, dk, constraint: Constraint):
    """Y-update of PALM. The quadratic weight ``dk`` does not move the minimizer of a projection."""
    if dk <= 0:
        raise ValueError("dk must be positive")
    return constraint.project(v)
