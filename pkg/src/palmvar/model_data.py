"""Ground-truth VAR(1) models, data generation and small linear-algebra helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "VarModel",
    "TimeSeriesData",
    "SteadyStateData",
    "spectral_radius",
    "numerical_rank",
    "generate_sparse_stable",
    "generate_lowrank_stable",
    "rescale_to_stable",
    "expm_taylor",
    "discretize",
    "simulate",
    "sample_steady_state",
    "sample_stationary_state",
    "sample_covariance",
    "solve_lyapunov",
]

_MAX_REDRAWS = 100
# p above this uses the doubling iteration instead of the p^2 x p^2 Kronecker solve
_KRON_MAX_P = 20


def spectral_radius(a: np.ndarray) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def numerical_rank(a: np.ndarray, rtol: float = 1e-10) -> int:
    """Number of singular values above ``rtol * sigma_max``."""
    sv = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


@dataclass(frozen=True)
class VarModel:
    """VAR(1) model ``x(t+1) = a x(t) + eps(t)`` with ``cov(eps) = q``."""

    a: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        q = np.array(self.q, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"a must be square, got shape {a.shape}")
        if q.shape != a.shape:
            raise ValueError(f"q shape {q.shape} does not match a shape {a.shape}")
        qnorm = np.linalg.norm(q)
        if np.linalg.norm(q - q.T) > 1e-12 * max(qnorm, 1.0):
            raise ValueError("q must be symmetric")
        if qnorm > 0 and np.min(np.linalg.eigvalsh(q)) < -1e-10 * qnorm:
            raise ValueError("q must be positive semidefinite")
        a.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "q", q)

    @property
    def p(self) -> int:
        return self.a.shape[0]

    @property
    def spectral_radius(self) -> float:
        return spectral_radius(self.a)

    @property
    def stable(self) -> bool:
        return self.spectral_radius < 1.0


@dataclass(frozen=True)
class TimeSeriesData:
    """Sequential states stored column-wise, ``states[:, t]`` is ``x(t+1)``."""

    states: np.ndarray

    def __post_init__(self):
        x = np.array(self.states, dtype=float)
        if x.ndim != 2:
            raise ValueError("states must be a p x n matrix")
        if x.shape[1] < 2:
            raise ValueError(f"need at least 2 time points, got {x.shape[1]}")
        x.setflags(write=False)
        object.__setattr__(self, "states", x)

    @property
    def p(self) -> int:
        return self.states.shape[0]

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def c(self) -> np.ndarray:
        """Lagged states ``[x(1), ..., x(n-1)]``."""
        return self.states[:, :-1]

    @property
    def d(self) -> np.ndarray:
        """Led states ``[x(2), ..., x(n)]``."""
        return self.states[:, 1:]

    def split(self, n_first: int) -> tuple[TimeSeriesData, TimeSeriesData]:
        """Chronological split into the first ``n_first`` points and the rest."""
        return TimeSeriesData(self.states[:, :n_first]), TimeSeriesData(self.states[:, n_first:])


@dataclass(frozen=True)
class SteadyStateData:
    """Non-sequential draws from the stationary distribution, one per column."""

    samples: np.ndarray

    def __post_init__(self):
        z = np.array(self.samples, dtype=float)
        if z.ndim != 2:
            raise ValueError("samples must be a p x N matrix")
        if z.shape[1] < 2:
            raise ValueError(f"need at least 2 samples, got {z.shape[1]}")
        z.setflags(write=False)
        object.__setattr__(self, "samples", z)

    @property
    def p(self) -> int:
        return self.samples.shape[0]

    @property
    def N(self) -> int:
        return self.samples.shape[1]


def generate_sparse_stable(p, nnz, target_radius=0.95, seed=None, q=None) -> VarModel:
    """Random sparse transition matrix with a prescribed spectral radius.

    ``nnz`` standard normal entries are placed at uniformly random positions
    (without replacement) and the result is scaled so that its spectral
    radius equals ``target_radius``.

    Parameters
    ----------
    p : int
        State dimension.
    nnz : int
        Number of nonzero entries, ``1 <= nnz <= p**2``.
    target_radius : float
        Spectral radius of the returned matrix, in (0, 1).
    seed : int or numpy Generator, optional
    q : (p, p) ndarray, optional
        Noise covariance; identity by default.
    """
    if not 1 <= nnz <= p * p:
        raise ValueError(f"nnz must lie in [1, {p * p}], got {nnz}")
    if not 0.0 < target_radius < 1.0:
        raise ValueError(f"target_radius must lie in (0, 1), got {target_radius}")
    rng = np.random.default_rng(seed)
    for _ in range(_MAX_REDRAWS):
        m = np.zeros(p * p)
        pos = rng.choice(p * p, size=nnz, replace=False)
        m[pos] = rng.standard_normal(nnz)
        m = m.reshape(p, p)
        tau = spectral_radius(m)
        if tau > 1e-12 and np.count_nonzero(m) == nnz:
            a = m * (target_radius / tau)
            return VarModel(a, np.eye(p) if q is None else q)
    raise RuntimeError(
        f"could not draw a sparse matrix with nonzero spectral radius "
        f"after {_MAX_REDRAWS} attempts (p={p}, nnz={nnz})"
    )


def generate_lowrank_stable(p, r, seed=None, q=None) -> VarModel:
    """Random rank-``r`` transition matrix ``U diag(sv) V`` with ``sv`` uniform on [0, 1).

    Stability follows from ``tau(A) <= sigma_max(A) < 1``.
    """
    if not 1 <= r <= p:
        raise ValueError(f"rank must lie in [1, {p}], got {r}")
    rng = np.random.default_rng(seed)
    u, _ = np.linalg.qr(rng.standard_normal((p, r)))
    v, _ = np.linalg.qr(rng.standard_normal((p, r)))
    sv = rng.uniform(0.0, 1.0, size=r)
    a = (u * sv) @ v.T
    return VarModel(a, np.eye(p) if q is None else q)


def rescale_to_stable(a, factor=2.0):
    """Return ``a / (factor * tau(a))``; with the default the spectral radius becomes 1/2."""
    a = np.asarray(a, dtype=float)
    tau = spectral_radius(a)
    if tau == 0.0:
        raise ValueError("cannot rescale a matrix with zero spectral radius")
    return a / (factor * tau)


def expm_taylor(m, tol=1e-16):
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    The argument is scaled by ``2**-j`` so that its 1-norm is at most 1/2,
    the series is summed until the next term falls below ``tol`` relative to
    the partial sum, then the result is squared ``j`` times.
    """
    m = np.asarray(m, dtype=float)
    p = m.shape[0]
    norm = np.linalg.norm(m, 1)
    j = 0
    if norm > 0.5:
        j = int(np.ceil(np.log2(norm / 0.5)))
    ms = m / 2.0**j
    result = np.eye(p)
    term = np.eye(p)
    for k in range(1, 60):
        term = term @ ms / k
        result = result + term
        if np.linalg.norm(term, 1) <= tol * np.linalg.norm(result, 1):
            break
    for _ in range(j):
        result = result @ result
    return result


def discretize(a_c, dt=1.0):
    """Zero-order sampling of a continuous-time system, ``exp(a_c * dt)``."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return expm_taylor(np.asarray(a_c, dtype=float) * dt)


def _noise_factor(q):
    # symmetric square root tolerates singular PSD covariances
    w, v = np.linalg.eigh(q)
    return v * np.sqrt(np.clip(w, 0.0, None))


def simulate(model: VarModel, x0, steps: int, sigma=None, seed=None) -> TimeSeriesData:
    """Run the recursion from ``x0`` and return ``steps`` consecutive states.

    Noise is ``N(0, sigma**2 I)`` when ``sigma`` is given, otherwise
    ``N(0, model.q)``. The first column of the result is ``x0`` itself.
    """
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    rng = np.random.default_rng(seed)
    p = model.p
    x = np.empty((p, steps))
    x[:, 0] = np.asarray(x0, dtype=float).reshape(p)
    if sigma is None:
        factor = _noise_factor(model.q)
        noise = factor @ rng.standard_normal((p, steps - 1))
    else:
        noise = sigma * rng.standard_normal((p, steps - 1))
    for t in range(steps - 1):
        x[:, t + 1] = model.a @ x[:, t] + noise[:, t]
    return TimeSeriesData(x)


def sample_stationary_state(model: VarModel, rng) -> np.ndarray:
    """One exact draw from ``N(0, P)`` where ``P`` solves the Lyapunov equation."""
    pmat = solve_lyapunov(model.a, model.q)
    return _noise_factor((pmat + pmat.T) / 2) @ rng.standard_normal(model.p)


def sample_steady_state(model: VarModel, N: int, burn_in=None, spacing=None, seed=None) -> SteadyStateData:
    """Subsample a long trajectory to get approximately independent stationary draws.

    The trajectory starts from an exact stationary draw, runs ``burn_in``
    steps (default ``10 p``) and then keeps every ``spacing``-th state
    (default ``p``).
    """
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    tau = model.spectral_radius
    if tau >= 1.0:
        raise ValueError(f"model is not stable: spectral radius {tau:.6g} >= 1")
    p = model.p
    burn_in = 10 * p if burn_in is None else int(burn_in)
    spacing = p if spacing is None else int(spacing)
    if spacing < 1 or burn_in < 0:
        raise ValueError("spacing must be >= 1 and burn_in >= 0")
    rng = np.random.default_rng(seed)
    x = sample_stationary_state(model, rng)
    factor = _noise_factor(model.q)
    total = burn_in + (N - 1) * spacing + 1
    out = np.empty((p, N))
    j = 0
    for t in range(total):
        if t >= burn_in and (t - burn_in) % spacing == 0:
            out[:, j] = x
            j += 1
        x = model.a @ x + factor @ rng.standard_normal(p)
    return SteadyStateData(out)


def sample_covariance(data) -> np.ndarray:
    """Unbiased sample covariance ``1/(N-1) sum (z - zbar)(z - zbar)^T``, exactly symmetric."""
    z = data.samples if isinstance(data, SteadyStateData) else np.asarray(data, dtype=float)
    if z.ndim != 2 or z.shape[1] < 2:
        raise ValueError("need at least 2 samples to form a covariance")
    dev = z - z.mean(axis=1, keepdims=True)
    s = dev @ dev.T / (z.shape[1] - 1)
    return (s + s.T) / 2


def solve_lyapunov(a, q) -> np.ndarray:
    """Solve ``a P a^T + q = P`` for a stable ``a``.

    Small problems use the vectorized ``(I - a kron a) vec(P) = vec(q)``
    system; larger ones use the doubling iteration
    ``P <- P + A_k P A_k^T, A_k <- A_k^2``.
    """
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    tau = spectral_radius(a)
    if tau >= 1.0:
        raise ValueError(f"Lyapunov equation needs a stable matrix, spectral radius is {tau:.6g}")
    p = a.shape[0]
    if p <= _KRON_MAX_P:
        lhs = np.eye(p * p) - np.kron(a, a)
        pmat = np.linalg.solve(lhs, q.reshape(-1)).reshape(p, p)
    else:
        pmat = q.copy()
        ak = a.copy()
        for _ in range(200):
            incr = ak @ pmat @ ak.T
            pmat = pmat + incr
            ak = ak @ ak
            if np.linalg.norm(incr) <= 1e-17 * np.linalg.norm(pmat):
                break
    return (pmat + pmat.T) / 2 if np.allclose(q, q.T) else pmat
