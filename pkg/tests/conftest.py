import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile(
    "thorough", deadline=None, max_examples=1000, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def signed_matrices(draw, min_n=1, max_n=7, density=0.5):
    """Small dense matrices with entries in {-1, 0, +1} scaled by random magnitudes."""
    n = draw(st.integers(min_n, max_n))
    signs = draw(hnp.arrays(np.int8, (n, n), elements=st.sampled_from([-1, 0, 0, 1])))
    mags = draw(
        hnp.arrays(np.float64, (n, n), elements=st.floats(0.1, 1.0, allow_nan=False))
    )
    return signs * mags


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
