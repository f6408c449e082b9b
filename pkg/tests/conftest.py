import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from mvrel import sampling as smp
from mvrel import subspace as sp

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SCALARS = ["real", "complex"]

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 6)
scalars = st.sampled_from(SCALARS)


def e(i, n):
    v = np.zeros(n)
    v[i] = 1.0
    return v


def sub(*vectors, n=None):
    vs = [np.asarray(v, dtype=float) for v in vectors]
    return sp.span(vs, n if n is not None else len(vs[0]))


def pair(seed, n, scalar="real"):
    return smp.random_pair(np.random.default_rng(seed), n, scalar)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=SCALARS)
def scalar(request):
    return request.param


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
