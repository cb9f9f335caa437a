import numpy as np
import pytest
from hypothesis import settings

from palmvar.model_data import generate_sparse_stable, sample_steady_state, simulate
from palmvar.objective import ProblemSpec

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed after the run
ACCEPTANCE = {}


def record_acceptance(number, passed, detail):
    ACCEPTANCE[number] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def random_spec(rng, p, n, rho1=1.0, rho2=None, mu=0.0, N=None):
    """Small random problem with a well-scaled sample covariance."""
    model = generate_sparse_stable(p, max(1, p * p // 3), 0.8, seed=rng)
    x0 = rng.standard_normal(p)
    train = simulate(model, x0, n, seed=rng)
    steady = sample_steady_state(model, N or 4 * p + 10, seed=rng)
    return ProblemSpec.from_data(train, steady, rho1, rho2=rho2, mu=mu)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_spec(rng):
    return random_spec(rng, 4, 8)
