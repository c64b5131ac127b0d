import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hilbmod.fdcstar import FdAlgebra
from hilbmod.fixtures import load_fixture
from hilbmod.hmod import HModule

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def modules(draw, max_blocks=3, max_dim=3, max_mult=3, full=False):
    r = draw(st.integers(1, max_blocks))
    n = tuple(draw(st.integers(1, max_dim)) for _ in range(r))
    low = 1 if full else 0
    m = tuple(draw(st.integers(low, max_mult)) for _ in range(r))
    if not any(m):
        m = (1,) + m[1:]
    return HModule(FdAlgebra(n), m)


def rand_c(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(scope="session")
def kol17():
    return load_fixture("kol17")


@pytest.fixture(scope="session")
def fixture_d():
    return load_fixture("fixture-d")
