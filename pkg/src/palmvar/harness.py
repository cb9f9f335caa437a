"""Experiment configs and the commands behind the command-line interface.

Every command takes a parsed config, writes its outputs into
``config.output_dir`` and returns an exit code: 0 on success, 1 when a
solver stopped without converging. Configuration and file errors raise
:class:`ConfigError`, which the CLI maps to exit code 2.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .evaluation import (
    DegenerateStepWarning,
    bisect_l1_threshold,
    count_nonzeros,
    cross_validate,
    evaluate,
)
from .gp import GpConfig, gp_solve
from .io import read_json, read_matrix, write_json, write_matrix, write_model_bundle
from .model_data import (
    SteadyStateData,
    TimeSeriesData,
    VarModel,
    discretize,
    generate_lowrank_stable,
    generate_sparse_stable,
    rescale_to_stable,
    sample_stationary_state,
    sample_steady_state,
    simulate,
    spectral_radius,
)
from .objective import ProblemSpec
from .palm import PalmConfig, default_init, palm_solve, write_trace_csv
from .proximal import Constraint

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SuiteConfig",
    "load_experiment_config",
    "load_suite_config",
    "cmd_generate",
    "cmd_fit",
    "cmd_eval",
    "cmd_compare",
    "cmd_sweep",
    "METHODS",
]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_CONFIG = 0, 1, 2
# order also breaks ties in the win tally
METHODS = ("palm_card", "palm_l1", "gp_l1")


class ConfigError(ValueError):
    """Invalid configuration document or unreadable input file."""


# ----------------------------------------------------------------- config types


@dataclass
class ModelSection:
    kind: str = "sparse"
    p: int = 200
    nnz: int | None = None
    rank: int | None = None
    target_radius: float = 0.95
    noise_scale: float = 1.0
    a_path: str | None = None
    q_path: str | None = None
    continuous: bool = False
    dt: float = 1.0
    rescale: bool = False


@dataclass
class DataSection:
    n: int = 50
    m: int = 800
    N: int = 1600
    burn_in: int | None = None
    spacing: int | None = None
    train_path: str | None = None
    test_path: str | None = None
    steady_path: str | None = None


@dataclass
class ProblemSection:
    rho1: float = 1.0
    rho2: float | None = None
    mu: float = 0.0
    sigma: float = 1.0


@dataclass
class ConstraintSection:
    kind: str = "cardinality"
    bound: float = 5000


@dataclass
class SolverSection:
    name: str = "palm"
    init: str = "ridge"
    palm: dict = field(default_factory=dict)
    gp: dict = field(default_factory=dict)


@dataclass
class SweepSection:
    rho1_grid: list = field(default_factory=lambda: [0.1, 1.0, 10.0])
    sigma_grid: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    metric: str = "normalized_error"
    holdout: float = 0.25
    folds: int | None = None


@dataclass
class ExperimentConfig:
    seed: int = 0
    output_dir: str = "out"
    # where fit and sweep look for train/steady CSVs; defaults to output_dir
    data_dir: str | None = None
    model: ModelSection = field(default_factory=ModelSection)
    data: DataSection = field(default_factory=DataSection)
    problem: ProblemSection = field(default_factory=ProblemSection)
    constraint: ConstraintSection = field(default_factory=ConstraintSection)
    solver: SolverSection = field(default_factory=SolverSection)
    sweep: SweepSection = field(default_factory=SweepSection)

    def palm_config(self) -> PalmConfig:
        return _sub_config(PalmConfig, self.solver.palm, "solver.palm")

    def gp_config(self) -> GpConfig:
        return _sub_config(GpConfig, self.solver.gp, "solver.gp")

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class BisectionSection:
    tol_frac: float = 0.02
    max_rounds: int = 40
    interval: list | None = None


@dataclass
class SuiteConfig:
    """Comparison suite of small systems, synthetic or imported.

    ``systems`` synthetic continuous-time matrices are drawn with ``p``
    uniform on ``p_range``; files listed in ``import_paths`` are used
    instead when given. Every matrix is discretized and rescaled to
    spectral radius 1/2.
    """

    seed: int = 0
    output_dir: str = "compare_out"
    systems: int = 40
    p_range: list = field(default_factory=lambda: [3, 40])
    density: float = 0.5
    import_paths: list = field(default_factory=list)
    dt: float = 1.0
    alphas: list = field(default_factory=lambda: [0.25, 0.125])
    min_n: int = 3
    problem: ProblemSection = field(default_factory=ProblemSection)
    palm: dict = field(default_factory=dict)
    gp: dict = field(default_factory=dict)
    bisection: BisectionSection = field(default_factory=BisectionSection)

    def palm_config(self) -> PalmConfig:
        return _sub_config(PalmConfig, self.palm, "palm")

    def gp_config(self) -> GpConfig:
        return _sub_config(GpConfig, self.gp, "gp")

    def to_dict(self):
        return dataclasses.asdict(self)


_NESTED = {
    "model": ModelSection,
    "data": DataSection,
    "problem": ProblemSection,
    "constraint": ConstraintSection,
    "solver": SolverSection,
    "sweep": SweepSection,
    "bisection": BisectionSection,
}


def _sub_config(cls, values, where):
    try:
        return cls(**values)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _build(cls, doc, where="config"):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(doc) - names)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")
    kwargs = {}
    for key, value in doc.items():
        if key in _NESTED and isinstance(value, dict):
            value = _build(_NESTED[key], value, f"{where}.{key}")
        kwargs[key] = value
    return cls(**kwargs)


def _need(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _is_int(v):
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _check_file(path, what):
    _need(path is None or Path(path).is_file(), f"{what}: file not found: {path}")


def _validate_experiment(cfg: ExperimentConfig):
    _need(_is_int(cfg.seed) and cfg.seed >= 0, "seed must be a nonnegative integer")
    m = cfg.model
    _need(m.kind in ("sparse", "lowrank", "imported"), f"model.kind: unknown kind {m.kind!r}")
    if m.kind == "imported":
        _need(m.a_path is not None, "model.a_path is required for an imported model")
    else:
        _need(_is_int(m.p) and m.p >= 1, "model.p must be a positive integer")
    if m.kind == "sparse":
        _need(_is_int(m.nnz) and 1 <= m.nnz <= m.p**2, "model.nnz must be an integer in [1, p^2]")
        _need(0 < m.target_radius < 1, "model.target_radius must lie in (0, 1)")
    if m.kind == "lowrank":
        _need(_is_int(m.rank) and 1 <= m.rank <= m.p, "model.rank must be an integer in [1, p]")
    _need(m.noise_scale > 0, "model.noise_scale must be positive")
    _need(m.dt > 0, "model.dt must be positive")
    _check_file(m.a_path, "model.a_path")
    _check_file(m.q_path, "model.q_path")

    d = cfg.data
    for name in ("n", "m", "N"):
        v = getattr(d, name)
        _need(_is_int(v) and v >= 2, f"data.{name} must be an integer >= 2")
    _need(cfg.data_dir is None or Path(cfg.data_dir).is_dir(), f"data_dir: not a directory: {cfg.data_dir}")
    for name in ("train_path", "test_path", "steady_path"):
        _check_file(getattr(d, name), f"data.{name}")

    pr = cfg.problem
    _need(pr.rho1 >= 0 and pr.mu >= 0, "problem.rho1 and problem.mu must be nonnegative")
    _need(pr.rho2 is None or pr.rho2 > 0, "problem.rho2 must be positive")
    _need(pr.sigma > 0, "problem.sigma must be positive")

    c = cfg.constraint
    try:
        Constraint(c.kind, c.bound)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"constraint: {exc}") from exc

    s = cfg.solver
    _need(s.name in ("palm", "gp"), f"solver.name: unknown solver {s.name!r}")
    _need(s.init in ("ridge", "zeros") or Path(s.init).is_file(),
          "solver.init must be 'ridge', 'zeros' or an existing CSV path")
    cfg.palm_config()
    cfg.gp_config()

    sw = cfg.sweep
    _need(len(sw.rho1_grid) > 0 and len(sw.sigma_grid) > 0, "sweep grids must be nonempty")
    _need(sw.metric in ("normalized_error", "cosine_score"), f"sweep.metric: unknown metric {sw.metric!r}")
    _need(0 < sw.holdout < 1, "sweep.holdout must lie in (0, 1)")


def _validate_suite(cfg: SuiteConfig):
    _need(_is_int(cfg.seed) and cfg.seed >= 0, "seed must be a nonnegative integer")
    lo, hi = cfg.p_range
    _need(_is_int(lo) and _is_int(hi) and 2 <= lo <= hi, "p_range must be integers 2 <= lo <= hi")
    n_sys = len(cfg.import_paths) if cfg.import_paths else cfg.systems
    _need(_is_int(n_sys) and n_sys >= 1, "the suite needs at least one system")
    for path in cfg.import_paths:
        _check_file(path, "import_paths")
    _need(0 < cfg.density <= 1, "density must lie in (0, 1]")
    _need(all(0 < a <= 1 for a in cfg.alphas) and cfg.alphas, "alphas must lie in (0, 1]")
    _need(_is_int(cfg.min_n) and cfg.min_n >= 2, "min_n must be an integer >= 2")
    _need(cfg.dt > 0, "dt must be positive")
    _need(0 <= cfg.bisection.tol_frac < 1, "bisection.tol_frac must lie in [0, 1)")
    cfg.palm_config()
    cfg.gp_config()


def _load(path, cls, validate, overrides):
    try:
        doc = read_json(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        cfg = _build(cls, doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    try:
        validate(cfg)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_experiment_config(path, seed=None, output_dir=None) -> ExperimentConfig:
    """Parse and validate an experiment config; unknown keys are rejected."""
    return _load(path, ExperimentConfig, _validate_experiment, {"seed": seed, "output_dir": output_dir})


def load_suite_config(path, seed=None, output_dir=None) -> SuiteConfig:
    return _load(path, SuiteConfig, _validate_suite, {"seed": seed, "output_dir": output_dir})


# ----------------------------------------------------------------- helpers


def _out_dir(path):
    d = Path(path)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {d}: {exc}") from exc
    return d


def _seeds(seed, k):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(k)]


def _build_model(cfg: ExperimentConfig, seed) -> VarModel:
    m = cfg.model
    if m.kind == "imported":
        a = read_matrix(m.a_path)
        if m.continuous:
            a = discretize(a, m.dt)
        if m.rescale or spectral_radius(a) >= 1.0:
            a = rescale_to_stable(a)
        p = a.shape[0]
        q = read_matrix(m.q_path, (p, p)) if m.q_path else m.noise_scale**2 * np.eye(p)
        return VarModel(a, q)
    q = read_matrix(m.q_path, (m.p, m.p)) if m.q_path else m.noise_scale**2 * np.eye(m.p)
    if m.kind == "sparse":
        return generate_sparse_stable(m.p, m.nnz, m.target_radius, seed=seed, q=q)
    return generate_lowrank_stable(m.p, m.rank, seed=seed, q=q)


def generate_data(model: VarModel, n, m, N, seed, burn_in=None, spacing=None):
    """Training series, test series and steady-state samples for ``model``.

    One trajectory of ``n + m`` states, started from an exact stationary
    draw, is cut chronologically into training and test parts. Steady-state
    samples come from an independent run.
    """
    s_x0, s_series, s_steady = _seeds(seed, 3)
    x0 = sample_stationary_state(model, np.random.default_rng(s_x0))
    series = simulate(model, x0, n + m, seed=s_series)
    train, test = series.split(n)
    steady = sample_steady_state(model, N, burn_in=burn_in, spacing=spacing, seed=s_steady)
    return train, test, steady


def _load_fit_inputs(cfg: ExperimentConfig):
    d = cfg.data
    out = Path(cfg.data_dir or cfg.output_dir)
    train_path = Path(d.train_path) if d.train_path else out / "train.csv"
    steady_path = Path(d.steady_path) if d.steady_path else out / "steady.csv"
    try:
        x = read_matrix(train_path)
        z = read_matrix(steady_path, (x.shape[0], None))
    except OSError as exc:
        raise ConfigError(f"cannot read fit inputs: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        return TimeSeriesData(x), SteadyStateData(z)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_spec(cfg: ExperimentConfig, train, steady):
    pr = cfg.problem
    q = None
    if cfg.model.q_path and cfg.model.kind == "imported":
        q = read_matrix(cfg.model.q_path, (train.p, train.p))
    try:
        return ProblemSpec.from_data(train, steady, pr.rho1, sigma=pr.sigma, rho2=pr.rho2, mu=pr.mu, q=q)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _init_point(cfg: ExperimentConfig, spec, constraint):
    if cfg.solver.init == "ridge":
        return default_init(spec, constraint)
    if cfg.solver.init == "zeros":
        z = np.zeros((spec.p, spec.p))
        return z, z
    x0 = read_matrix(cfg.solver.init, (spec.p, spec.p))
    return x0, constraint.project(x0)


def _quiet_evaluate(estimate, test):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateStepWarning)
        return evaluate(estimate, test)


# ----------------------------------------------------------------- commands


def cmd_generate(cfg: ExperimentConfig) -> int:
    """Write the model bundle and data files; deterministic given ``cfg.seed``."""
    out = _out_dir(cfg.output_dir)
    s_model, s_data = _seeds(cfg.seed, 2)
    try:
        model = _build_model(cfg, s_model)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc
    d = cfg.data
    train, test, steady = generate_data(model, d.n, d.m, d.N, s_data, d.burn_in, d.spacing)
    extra = {}
    if cfg.model.kind == "sparse":
        extra["nnz"] = cfg.model.nnz
    elif cfg.model.kind == "lowrank":
        extra["rank"] = cfg.model.rank
    meta = write_model_bundle(out, model, cfg.model.kind, seed=cfg.seed,
                              n=d.n, m=d.m, N=d.N, **extra)
    write_matrix(out / "train.csv", train.states)
    write_matrix(out / "test.csv", test.states)
    write_matrix(out / "steady.csv", steady.samples)
    write_json(out / "report.json", {"command": "generate", "meta": meta, "config": cfg.to_dict()})
    log.info("generated p=%d model (tau=%.4f) in %s", model.p, meta["spectral_radius"], out)
    return EXIT_OK


def cmd_fit(cfg: ExperimentConfig) -> int:
    """Fit an estimate; writes ``estimate.csv``, ``trace.csv`` and ``report.json``."""
    out = _out_dir(cfg.output_dir)
    train, steady = _load_fit_inputs(cfg)
    spec = _build_spec(cfg, train, steady)
    constraint = Constraint(cfg.constraint.kind, cfg.constraint.bound)
    try:
        constraint.check_dimension(spec.p)
    except ValueError as exc:
        raise ConfigError(f"constraint: {exc}") from exc
    x0, y0 = _init_point(cfg, spec, constraint)
    if cfg.solver.name == "palm":
        report = palm_solve(spec, constraint, init=(x0, y0), config=cfg.palm_config())
    else:
        if not constraint.convex:
            raise ConfigError(f"solver gp needs a convex constraint, got {constraint.kind}")
        report = gp_solve(spec, constraint, init=x0, config=cfg.gp_config())
    write_matrix(out / "estimate.csv", report.estimate)
    write_trace_csv(report, out / "trace.csv")
    summary = report.summary()
    summary.update(command="fit", rho2=spec.rho2, nnz=count_nonzeros(report.estimate),
                   config=cfg.to_dict())
    write_json(out / "report.json", summary)
    log.info("%s finished with status %s after %d iterations", report.solver, report.status, report.iters)
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_eval(estimate_path, test_path, output_dir=None) -> tuple[int, dict]:
    """Score an estimate on a test series; writes ``metrics.json`` when ``output_dir`` is set."""
    try:
        est = read_matrix(estimate_path)
        test = read_matrix(test_path)
    except OSError as exc:
        raise ConfigError(f"cannot read inputs: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        res = evaluate(est, test)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    metrics = res.to_dict()
    if output_dir is not None:
        out = _out_dir(output_dir)
        write_json(out / "metrics.json", metrics)
        write_json(out / "report.json", {"command": "eval", "estimate": str(estimate_path),
                                         "test": str(test_path), "metrics": metrics})
    return EXIT_OK, metrics


def cmd_sweep(cfg: ExperimentConfig) -> int:
    """Cross-validate ``(rho1, sigma)``; writes ``cv_table.csv`` and ``report.json``."""
    out = _out_dir(cfg.output_dir)
    train, steady = _load_fit_inputs(cfg)
    constraint = Constraint(cfg.constraint.kind, cfg.constraint.bound)
    sw = cfg.sweep
    try:
        result = cross_validate(train, steady, constraint, sw.rho1_grid, sw.sigma_grid, metric=sw.metric,
                                holdout=sw.holdout, folds=sw.folds, solver=cfg.solver.name,
                                palm_config=cfg.palm_config(), gp_config=cfg.gp_config(),
                                rho2=cfg.problem.rho2, mu=cfg.problem.mu)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result.write_csv(out / "cv_table.csv")
    write_json(out / "report.json", {"command": "sweep", "best": result.best, "table": result.table,
                                     "config": cfg.to_dict()})
    return EXIT_OK


# ----------------------------------------------------------------- comparison suite


def synthetic_suite(count, p_range, density=0.5, seed=0):
    """Random continuous-time system matrices with ``p`` uniform on ``p_range``.

    Each matrix has Gaussian entries (kept with probability ``density``)
    scaled by ``1/sqrt(p)``, shifted by ``-I``.
    """
    rng = np.random.default_rng(seed)
    lo, hi = p_range
    out = []
    for _ in range(count):
        p = int(rng.integers(lo, hi + 1))
        m = rng.standard_normal((p, p)) * (rng.random((p, p)) < density) / math.sqrt(p)
        out.append(m - np.eye(p))
    return out


def suite_sizes(p, min_n=3):
    """``(n, m, N)`` for a suite system: ``n = p/2``, ``m = p``, ``N = 5 n`` with a floor on ``n`` and ``m``."""
    n = max(int(math.ceil(p / 2)), min_n)
    m = max(p, min_n)
    return n, m, 5 * n


def tally_wins(rows, alphas):
    """Count, per ``alpha`` and metric, the systems where each method scores best.

    Only systems where all three methods produced finite metrics count. Ties
    go to the method listed first in :data:`METHODS`.
    """
    by_key = {}
    for r in rows:
        by_key.setdefault((r["alpha"], r["system"]), {})[r["method"]] = r
    summary = []
    for alpha in alphas:
        for metric, better in (("normalized_error", min), ("cosine_score", max)):
            wins = dict.fromkeys(METHODS, 0)
            solved = 0
            for (a, _), methods in sorted(by_key.items(), key=lambda kv: kv[0][1]):
                if a != alpha or set(methods) != set(METHODS):
                    continue
                vals = [methods[k][metric] for k in METHODS]
                if not all(np.isfinite(vals)):
                    continue
                solved += 1
                best = better(vals)
                wins[METHODS[vals.index(best)]] += 1
            summary.append({"alpha": alpha, "metric": metric, "systems": solved, **wins})
    return summary


_RESULT_FIELDS = ("system", "p", "alpha", "s", "method", "status", "nnz", "radius",
                  "normalized_error", "cosine_score", "projections", "iters", "wall_time_s")


def _run_system(idx, a, cfg: SuiteConfig, seed):
    p = a.shape[0]
    model = VarModel(a, np.eye(p))
    n, m, N = suite_sizes(p, cfg.min_n)
    train, test, steady = generate_data(model, n, m, N, seed)
    pr = cfg.problem
    spec = ProblemSpec.from_data(train, steady, pr.rho1, sigma=pr.sigma, rho2=pr.rho2, mu=pr.mu)
    palm_cfg, gp_cfg = cfg.palm_config(), cfg.gp_config()
    rows = []
    for alpha in cfg.alphas:
        s = max(1, int(round(alpha * p * p)))
        tol = int(math.floor(cfg.bisection.tol_frac * s))
        base = {"system": idx, "p": p, "alpha": alpha, "s": s}

        def record(method, fn):
            t0 = time.perf_counter()
            try:
                report, radius, ok = fn()
                res = _quiet_evaluate(report.estimate, test)
                rows.append({**base, "method": method, "status": report.status if ok else "bisection_failed",
                             "nnz": count_nonzeros(report.estimate), "radius": radius,
                             "normalized_error": res.normalized_error, "cosine_score": res.cosine_score,
                             "projections": report.projections, "iters": report.iters,
                             "wall_time_s": time.perf_counter() - t0})
            except (ValueError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
                log.warning("system %d alpha %g %s failed: %s", idx, alpha, method, exc)
                rows.append({**base, "method": method, "status": "error", "nnz": -1, "radius": math.nan,
                             "normalized_error": math.nan, "cosine_score": math.nan, "projections": 0,
                             "iters": 0, "wall_time_s": time.perf_counter() - t0})

        def card():
            return palm_solve(spec, Constraint.cardinality(s), config=palm_cfg), math.nan, True

        def l1(solver):
            def run():
                b = bisect_l1_threshold(spec, s, interval=cfg.bisection.interval, tol_nnz=tol,
                                        max_rounds=cfg.bisection.max_rounds, solver=solver,
                                        palm_config=palm_cfg, gp_config=gp_cfg)
                return b.report, b.radius, b.converged
            return run

        record("palm_card", card)
        record("palm_l1", l1("palm"))
        record("gp_l1", l1("gp"))
    return rows


def cmd_compare(cfg: SuiteConfig) -> int:
    """Run PALM-card, PALM-l1 and GP-l1 on every suite system and tally wins.

    Writes ``results.csv`` (one row per system, alpha and method),
    ``summary.csv`` and ``report.json``. Failures of single systems are
    recorded and the suite continues.
    """
    out = _out_dir(cfg.output_dir)
    s_suite, s_data = _seeds(cfg.seed, 2)
    if cfg.import_paths:
        mats = [read_matrix(path) for path in cfg.import_paths]
    else:
        mats = synthetic_suite(cfg.systems, cfg.p_range, cfg.density, s_suite)
    data_seeds = _seeds(s_data, len(mats))
    rows = []
    for idx, a_c in enumerate(mats):
        try:
            a = rescale_to_stable(discretize(a_c, cfg.dt))
        except ValueError as exc:
            log.warning("system %d skipped: %s", idx, exc)
            continue
        t0 = time.perf_counter()
        rows.extend(_run_system(idx, a, cfg, data_seeds[idx]))
        log.info("system %d (p=%d) done in %.1fs", idx, a.shape[0], time.perf_counter() - t0)

    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=_RESULT_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(float(v)) if isinstance(v, (float, np.floating)) else v for k, v in r.items()})
    summary = tally_wins(rows, cfg.alphas)
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=("alpha", "metric", "systems") + METHODS)
        w.writeheader()
        w.writerows(summary)
    write_json(out / "report.json", {"command": "compare", "summary": summary, "systems": len(mats),
                                     "config": cfg.to_dict()})
    return EXIT_OK
