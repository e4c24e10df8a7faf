import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dyadic_sobolev import StepFunction

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

S_VALUES = (0.1, 0.25, 0.5, 0.75, 0.9)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
smoothness = st.floats(0.05, 0.95)


@st.composite
def step_functions(draw, min_depth=0, max_depth=6):
    depth = draw(st.integers(min_depth, max_depth))
    values = draw(st.lists(finite, min_size=1 << depth, max_size=1 << depth))
    return StepFunction(depth, np.array(values))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
