import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rabinovich import (
    ControllerConfig,
    Params,
    State,
    TimeGrid,
    equilibria,
    run_uncontrolled,
)

# One profile for the whole suite: deterministic, no wall-clock deadline
# (RK4-backed properties are slow per example under load).
settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def params() -> Params:
    # chaotic reference parameter set
    return Params(4.0, 1.0, 1.0, 6.75)


@pytest.fixture(scope="session")
def s0() -> State:
    return State(1.5, -1.25, 3.5)


@pytest.fixture(scope="session")
def grid() -> TimeGrid:
    return TimeGrid(0.0, 200.0, 0.1)


@pytest.fixture(scope="session")
def eqs(params):
    return equilibria(params)


@pytest.fixture(scope="session")
def controller() -> ControllerConfig:
    return ControllerConfig(K=-0.6, epsilon=0.1, t_on=40.0)


@pytest.fixture(scope="session")
def free_run(params, s0, grid):
    """The standard uncontrolled run, shared by boundedness/report tests."""
    return run_uncontrolled(params, s0, grid)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
