import sys

import numpy as np
import pytest
from hypothesis import settings

from capdrop.checks import random_series, random_state
from capdrop.trig import SolverGrid

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


@pytest.fixture
def grid():
    return SolverGrid(32)


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


@pytest.fixture
def small_state(rng):
    def make(N=32, xi_h3=0.1, chi_h3=0.1):
        return random_state(rng, N, xi_h3, chi_h3)

    return make


@pytest.fixture
def series(rng):
    def make(N=32, modes=8, **kw):
        return random_series(rng, N, modes, **kw)

    return make


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        r = results[k]
        terminalreporter.write_line(f"{r.line()}  ({r.seconds:.1f} s)  {r.details}")
